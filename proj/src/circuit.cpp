#include "polclust/circuit.hpp"

#include <json.hpp>

#include "polclust/errors.hpp"

namespace polclust {

CircuitParams::CircuitParams(std::vector<Layer> layers) : layers_(std::move(layers)) {
  for (auto& l : layers_) {
    l.alpha = wrap_angle(l.alpha);
    l.beta = wrap_angle(l.beta);
  }
}

CircuitParams CircuitParams::from_vector(std::span<const double> theta) {
  if (theta.size() % 2 != 0) throw InvalidArgument("parameter vector length must be even");
  std::vector<Layer> layers(theta.size() / 2);
  for (std::size_t k = 0; k < layers.size(); ++k) layers[k] = {theta[2 * k], theta[2 * k + 1]};
  return CircuitParams(std::move(layers));
}

std::vector<double> CircuitParams::to_vector() const {
  std::vector<double> theta;
  theta.reserve(size());
  for (const auto& l : layers_) {
    theta.push_back(l.alpha);
    theta.push_back(l.beta);
  }
  return theta;
}

std::vector<JonesMatrix> CircuitParams::plates() const {
  std::vector<JonesMatrix> out;
  out.reserve(size());
  for (const auto& l : layers_) {
    out.push_back(qwp(l.alpha));
    out.push_back(hwp(l.beta));
  }
  return out;
}

std::string CircuitParams::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& l : layers_) j.push_back({l.alpha, l.beta});
  return j.dump();
}

CircuitParams CircuitParams::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("circuit params: ") + e.what());
  }
  if (!j.is_array()) throw InvalidArgument("circuit params must be a JSON array");
  std::vector<Layer> layers;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw InvalidArgument("each layer must be an [alpha, beta] pair");
    layers.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return CircuitParams(std::move(layers));
}

JonesVector run_circuit(const CircuitParams& params, const JonesVector& input) {
  JonesVector v = input;
  for (const auto& l : params.layers()) {
    v = apply(qwp(l.alpha), v);
    v = apply(hwp(l.beta), v);
  }
  return v;
}

std::vector<JonesVector> batch_states(const CircuitParams& params,
                                      std::span<const JonesVector> embedded) {
  std::vector<JonesVector> out(embedded.size());
  if (embedded.empty()) return out;
  if (params.layer_count() == 0) {
    std::copy(embedded.begin(), embedded.end(), out.begin());
    return out;
  }
  // One product for the whole stack, applied to every state.
  const auto plates = params.plates();
  const JonesMatrix total = compose(plates);
  const auto n = static_cast<std::ptrdiff_t>(embedded.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = apply(total, embedded[i]);
  return out;
}

FidelityMatrix fidelity_matrix(std::span<const JonesVector> states, std::span<const JonesVector> refs) {
  FidelityMatrix f(states.size(), refs.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t a = 0; a < refs.size(); ++a) f(i, a) = fidelity(states[i], refs[a]);
  return f;
}

}  // namespace polclust
