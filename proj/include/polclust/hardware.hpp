#pragma once

// Simulated optical bench: quantized rotary stages, imperfect retarders and a
// noisy polarimeter. Angles at this boundary are degrees.
//
// Plate order is the beam order: Q_in, H_in, Q_1, H_1, ..., Q_m, H_m. Even
// indices are quarter-wave plates, odd indices half-wave plates.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "polclust/clustering.hpp"
#include "polclust/optimizer.hpp"
#include "polclust/polarization.hpp"

namespace polclust {

struct DeviceConfig {
  double angle_quantum = 0.08;  // degrees
  double max_speed = 450.0;     // degrees per second
  double hwp_retardance_error = 0.0;  // radians
  double qwp_retardance_error = 0.0;  // radians
  double stokes_noise_sigma = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct DeviceState {
  // Stage positions in whole steps of angle_quantum.
  std::vector<std::int64_t> steps;
  double motion_time = 0.0;  // seconds, simulated

  std::size_t plate_count() const { return steps.size(); }
  double angle_deg(std::size_t plate, const DeviceConfig& cfg) const {
    return static_cast<double>(steps[plate]) * cfg.angle_quantum;
  }
};

DeviceState make_device_state(std::size_t plate_count);

// Nearest whole step; exact half steps round toward zero.
std::int64_t quantize_steps(double angle_deg, double quantum_deg);

// Moves all stages simultaneously; motion time grows by the largest move over
// max_speed. Throws InvalidArgument on a count mismatch or non-finite target.
DeviceState set_plate_angles(DeviceState dev, const DeviceConfig& cfg, std::span<const double> targets_deg);

// Jones matrix of the whole stack at its current (quantized) positions.
JonesMatrix stack_matrix(const DeviceState& dev, const DeviceConfig& cfg);

// Noise is added to s1..s3 and the result is pulled back inside s0's ball.
StokesVector measure_stokes(const DeviceState& dev, const DeviceConfig& cfg, const JonesVector& input,
                            Rng& rng);

struct DeviceInfo {
  std::size_t plates = 0;
  double angle_quantum = 0.0;
  double motion_time = 0.0;
};

// Anything that can position plates and read a polarimeter.
class Device {
 public:
  virtual ~Device() = default;
  virtual std::size_t plate_count() const = 0;
  virtual void set_plate_angles(std::span<const double> targets_deg) = 0;
  // Readout for the fixed horizontal input beam.
  virtual StokesVector measure() = 0;
  virtual DeviceInfo info() = 0;
};

class SimulatedDevice : public Device {
 public:
  SimulatedDevice(std::size_t plate_count, const DeviceConfig& cfg);

  std::size_t plate_count() const override { return state_.plate_count(); }
  void set_plate_angles(std::span<const double> targets_deg) override;
  StokesVector measure() override;
  DeviceInfo info() override;

  const DeviceState& state() const { return state_; }
  const DeviceConfig& config() const { return cfg_; }

 private:
  DeviceConfig cfg_;
  DeviceState state_;
  Rng rng_;
};

// Drives every data point through the device: preparation plates from the
// point's embedding, variational plates from the parameters. Not thread safe.
StateSource device_source(const ClusterProblem& problem, Device& device);

// Backend for optimize(); min_step is the stage quantum in radians.
Backend device_backend(const ClusterProblem& problem, Device& device, double angle_quantum_deg);

inline double to_degrees(double rad) { return rad * 180.0 / kPi; }
inline double to_radians(double deg) { return deg * kPi / 180.0; }

}  // namespace polclust
