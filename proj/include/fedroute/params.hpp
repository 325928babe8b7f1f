#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fedroute/model.hpp"

namespace fedroute {

enum class BlockKind : std::uint32_t {
  ConvWeight = 0,  // [out][in][ky][kx]
  ConvBias = 1,    // [out]
  BnScale = 2,     // gamma, [channel]
  BnShift = 3,     // beta, [channel]
};

struct ParamBlock {
  int layer = 0;  // index into ModelSpec::layers
  BlockKind kind = BlockKind::ConvWeight;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Flat parameter layout derived from a ModelSpec. Shared between all
// ParameterVectors of the same architecture.
struct ParamLayout {
  std::uint64_t spec_hash = 0;
  std::size_t total = 0;
  std::vector<ParamBlock> blocks;

  static std::shared_ptr<const ParamLayout> for_spec(const ModelSpec& spec);

  // Blocks belonging to a given layer, in declaration order.
  std::vector<const ParamBlock*> layer_blocks(int layer) const;
};

// The unit exchanged between clients and the server: a flat, layer-indexed
// block of doubles. All arithmetic is element-wise and deterministic.
class ParameterVector {
 public:
  ParameterVector() = default;

  static ParameterVector zeros(const ModelSpec& spec);
  static ParameterVector zeros_like(const ParameterVector& other);

  const std::shared_ptr<const ParamLayout>& layout() const { return layout_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> block(const ParamBlock& b) {
    return {values_.data() + b.offset, b.size};
  }
  std::span<const double> block(const ParamBlock& b) const {
    return {values_.data() + b.offset, b.size};
  }

  // Throws ProtocolError when layouts differ.
  void check_same_shape(const ParameterVector& other, const char* what) const;

  void add_scaled(const ParameterVector& other, double factor);
  void scale(double factor);
  double squared_distance(const ParameterVector& other) const;
  bool all_finite() const;
  bool bitwise_equal(const ParameterVector& other) const;

 private:
  std::shared_ptr<const ParamLayout> layout_;
  std::vector<double> values_;
};

// He-style initialization from the run seed: conv weights ~ N(0, 2/fan_in),
// biases 0, batch-norm scale 1 and shift 0. Draw order is fixed (layer
// order, weights within a block in offset order).
ParameterVector init_params(const ModelSpec& spec, std::uint64_t seed);

}  // namespace fedroute
