#pragma once

#include <vector>

#include "fedroute/model.hpp"

namespace fedroute {

enum class Mode { Train, Eval };

// Running statistics of one batch-norm layer. Scale/shift live in the
// ParameterVector; only the non-learnable state is here.
struct BatchNormState {
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.1;
  double epsilon = 1e-5;

  static BatchNormState init(int channels);
  int channels() const { return static_cast<int>(running_mean.size()); }
  bool bitwise_equal(const BatchNormState& other) const;
};

// Per-model container: one BatchNormState per batch-norm layer, in layer
// order. Empty for batch-norm-free models such as FLNet.
struct ModelState {
  std::vector<BatchNormState> bn;

  static ModelState init(const ModelSpec& spec);
  bool bitwise_equal(const ModelState& other) const;
};

}  // namespace fedroute
