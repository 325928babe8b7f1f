#include "fedroute/batchnorm.hpp"

#include <cstring>

namespace fedroute {

BatchNormState BatchNormState::init(int channels) {
  BatchNormState s;
  s.running_mean.assign(channels, 0.0);
  s.running_var.assign(channels, 1.0);
  return s;
}

bool BatchNormState::bitwise_equal(const BatchNormState& other) const {
  if (running_mean.size() != other.running_mean.size()) return false;
  if (momentum != other.momentum || epsilon != other.epsilon) return false;
  auto eq = [](const std::vector<double>& a, const std::vector<double>& b) {
    return a.empty() ||
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
  };
  return eq(running_mean, other.running_mean) && eq(running_var, other.running_var);
}

ModelState ModelState::init(const ModelSpec& spec) {
  ModelState s;
  for (const LayerDesc& d : spec.layers) {
    if (d.kind == LayerKind::BatchNorm) {
      s.bn.push_back(BatchNormState::init(d.channels));
    }
  }
  return s;
}

bool ModelState::bitwise_equal(const ModelState& other) const {
  if (bn.size() != other.bn.size()) return false;
  for (std::size_t i = 0; i < bn.size(); ++i) {
    if (!bn[i].bitwise_equal(other.bn[i])) return false;
  }
  return true;
}

}  // namespace fedroute
