#include "fedroute/params.hpp"

#include <cmath>
#include <cstring>

#include "fedroute/errors.hpp"
#include "fedroute/rng.hpp"

namespace fedroute {

std::shared_ptr<const ParamLayout> ParamLayout::for_spec(const ModelSpec& spec) {
  spec.validate();
  auto layout = std::make_shared<ParamLayout>();
  layout->spec_hash = spec.hash();
  std::size_t offset = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerDesc& d = spec.layers[i];
    if (d.kind == LayerKind::Conv2d) {
      std::size_t wsize = static_cast<std::size_t>(d.out_channels) *
                          d.in_channels * d.kernel * d.kernel;
      layout->blocks.push_back(
          {static_cast<int>(i), BlockKind::ConvWeight, offset, wsize});
      offset += wsize;
      layout->blocks.push_back({static_cast<int>(i), BlockKind::ConvBias, offset,
                                static_cast<std::size_t>(d.out_channels)});
      offset += static_cast<std::size_t>(d.out_channels);
    } else if (d.kind == LayerKind::BatchNorm) {
      layout->blocks.push_back({static_cast<int>(i), BlockKind::BnScale, offset,
                                static_cast<std::size_t>(d.channels)});
      offset += static_cast<std::size_t>(d.channels);
      layout->blocks.push_back({static_cast<int>(i), BlockKind::BnShift, offset,
                                static_cast<std::size_t>(d.channels)});
      offset += static_cast<std::size_t>(d.channels);
    }
  }
  layout->total = offset;
  return layout;
}

std::vector<const ParamBlock*> ParamLayout::layer_blocks(int layer) const {
  std::vector<const ParamBlock*> out;
  for (const ParamBlock& b : blocks) {
    if (b.layer == layer) out.push_back(&b);
  }
  return out;
}

ParameterVector ParameterVector::zeros(const ModelSpec& spec) {
  ParameterVector p;
  p.layout_ = ParamLayout::for_spec(spec);
  p.values_.assign(p.layout_->total, 0.0);
  return p;
}

ParameterVector ParameterVector::zeros_like(const ParameterVector& other) {
  ParameterVector p;
  p.layout_ = other.layout_;
  p.values_.assign(other.values_.size(), 0.0);
  return p;
}

void ParameterVector::check_same_shape(const ParameterVector& other,
                                       const char* what) const {
  bool ok = values_.size() == other.values_.size() && layout_ && other.layout_ &&
            layout_->spec_hash == other.layout_->spec_hash;
  if (!ok) {
    throw ProtocolError(std::string(what) + ": parameter shape mismatch");
  }
}

void ParameterVector::add_scaled(const ParameterVector& other, double factor) {
  check_same_shape(other, "add_scaled");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += factor * other.values_[i];
  }
}

void ParameterVector::scale(double factor) {
  for (double& v : values_) v *= factor;
}

double ParameterVector::squared_distance(const ParameterVector& other) const {
  check_same_shape(other, "squared_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double d = values_[i] - other.values_[i];
    acc += d * d;
  }
  return acc;
}

bool ParameterVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool ParameterVector::bitwise_equal(const ParameterVector& other) const {
  if (values_.size() != other.values_.size()) return false;
  if (values_.empty()) return true;
  return std::memcmp(values_.data(), other.values_.data(),
                     values_.size() * sizeof(double)) == 0;
}

ParameterVector init_params(const ModelSpec& spec, std::uint64_t seed) {
  ParameterVector p = ParameterVector::zeros(spec);
  Rng rng(seed);
  for (const ParamBlock& b : p.layout()->blocks) {
    if (b.kind == BlockKind::ConvWeight) {
      const LayerDesc& d = spec.layers[b.layer];
      double fan_in = static_cast<double>(d.in_channels) * d.kernel * d.kernel;
      double stddev = std::sqrt(2.0 / fan_in);
      auto span = p.block(b);
      for (double& v : span) v = rng.normal(0.0, stddev);
    } else if (b.kind == BlockKind::BnScale) {
      auto span = p.block(b);
      for (double& v : span) v = 1.0;
    }
    // ConvBias and BnShift stay zero.
  }
  return p;
}

}  // namespace fedroute
