#include "polclust/hardware.hpp"

#include <algorithm>
#include <cmath>

#include "polclust/errors.hpp"

namespace polclust {

void DeviceConfig::validate() const {
  if (!(angle_quantum > 0.0) || !std::isfinite(angle_quantum))
    throw InvalidArgument("angle_quantum must be positive");
  if (!(max_speed > 0.0) || !std::isfinite(max_speed)) throw InvalidArgument("max_speed must be positive");
  if (!(stokes_noise_sigma >= 0.0) || !std::isfinite(stokes_noise_sigma))
    throw InvalidArgument("stokes_noise_sigma must be non-negative");
  if (!std::isfinite(hwp_retardance_error) || !std::isfinite(qwp_retardance_error))
    throw InvalidArgument("retardance errors must be finite");
}

DeviceState make_device_state(std::size_t plate_count) {
  DeviceState s;
  s.steps.assign(plate_count, 0);
  return s;
}

std::int64_t quantize_steps(double angle_deg, double quantum_deg) {
  const double q = angle_deg / quantum_deg;
  const double whole = std::trunc(q);
  const double frac = std::abs(q - whole);
  if (frac == 0.5) return static_cast<std::int64_t>(whole);
  return static_cast<std::int64_t>(std::llround(q));
}

DeviceState set_plate_angles(DeviceState dev, const DeviceConfig& cfg, std::span<const double> targets_deg) {
  if (targets_deg.size() != dev.plate_count())
    throw InvalidArgument("expected " + std::to_string(dev.plate_count()) + " plate angles, got " +
                          std::to_string(targets_deg.size()));
  double longest = 0.0;
  for (std::size_t i = 0; i < targets_deg.size(); ++i) {
    if (!std::isfinite(targets_deg[i])) throw InvalidArgument("plate angle must be finite");
    const std::int64_t next = quantize_steps(targets_deg[i], cfg.angle_quantum);
    longest = std::max(longest, std::abs(static_cast<double>(next - dev.steps[i])) * cfg.angle_quantum);
    dev.steps[i] = next;
  }
  dev.motion_time += longest / cfg.max_speed;
  return dev;
}

JonesMatrix stack_matrix(const DeviceState& dev, const DeviceConfig& cfg) {
  JonesMatrix total = JonesMatrix::identity();
  for (std::size_t i = 0; i < dev.plate_count(); ++i) {
    const double axis = to_radians(dev.angle_deg(i, cfg));
    JonesMatrix plate;
    if (i % 2 == 0) {
      plate = cfg.qwp_retardance_error == 0.0 ? qwp(axis)
                                              : retarder(kPi / 2 + cfg.qwp_retardance_error, axis);
    } else {
      plate = cfg.hwp_retardance_error == 0.0 ? hwp(axis)
                                              : retarder(kPi + cfg.hwp_retardance_error, axis);
    }
    total = plate * total;
  }
  return total;
}

StokesVector measure_stokes(const DeviceState& dev, const DeviceConfig& cfg, const JonesVector& input,
                            Rng& rng) {
  StokesVector s = jones_to_stokes(apply(stack_matrix(dev, cfg), input));
  if (cfg.stokes_noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.stokes_noise_sigma);
    s.s1 += noise(rng);
    s.s2 += noise(rng);
    s.s3 += noise(rng);
    const double r = std::sqrt(s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3);
    if (r > s.s0) {
      const double shrink = s.s0 / r;
      s.s1 *= shrink;
      s.s2 *= shrink;
      s.s3 *= shrink;
    }
  }
  return s;
}

SimulatedDevice::SimulatedDevice(std::size_t plate_count, const DeviceConfig& cfg)
    : cfg_(cfg), state_(make_device_state(plate_count)), rng_(cfg.seed) {
  cfg_.validate();
}

void SimulatedDevice::set_plate_angles(std::span<const double> targets_deg) {
  state_ = polclust::set_plate_angles(state_, cfg_, targets_deg);
}

StokesVector SimulatedDevice::measure() { return measure_stokes(state_, cfg_, horizontal(), rng_); }

DeviceInfo SimulatedDevice::info() { return {state_.plate_count(), cfg_.angle_quantum, state_.motion_time}; }

StateSource device_source(const ClusterProblem& problem, Device& device) {
  const std::size_t expected = 2 + 2 * problem.layers();
  if (device.plate_count() != expected)
    throw InvalidArgument("device has " + std::to_string(device.plate_count()) + " plates, problem needs " +
                          std::to_string(expected));
  return [&problem, &device](const CircuitParams& params) {
    std::vector<double> targets(2 + params.size());
    std::size_t t = 2;
    for (const auto& l : params.layers()) {
      targets[t++] = to_degrees(l.alpha);
      targets[t++] = to_degrees(l.beta);
    }
    std::vector<JonesVector> out;
    out.reserve(problem.embedded().size());
    for (const auto& e : problem.embedded()) {
      targets[0] = to_degrees(e.plates.alpha);
      targets[1] = to_degrees(e.plates.beta);
      device.set_plate_angles(targets);
      out.push_back(stokes_to_jones(device.measure()));
    }
    return out;
  };
}

Backend device_backend(const ClusterProblem& problem, Device& device, double angle_quantum_deg) {
  return Backend{device_source(problem, device), false, to_radians(angle_quantum_deg)};
}

}  // namespace polclust
