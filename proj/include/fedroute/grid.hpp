#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fedroute {

// Grid tensors use one layout everywhere, including the on-disk sample
// format: x fastest, then y, then channel. Index of (x, y, c) is
// (c * height + y) * width + x.

class FeatureGrid {
 public:
  FeatureGrid() = default;
  FeatureGrid(int width, int height, int channels);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t size() const { return values_.size(); }

  double& at(int x, int y, int c) {
    return values_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }
  double at(int x, int y, int c) const {
    return values_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }

  double* channel(int c) {
    return values_.data() + static_cast<std::size_t>(c) * height_ * width_;
  }
  const double* channel(int c) const {
    return values_.data() + static_cast<std::size_t>(c) * height_ * width_;
  }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;
  // Throws ConfigError if a value is not finite.
  void check_finite(const char* what) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

class LabelGrid {
 public:
  LabelGrid() = default;
  LabelGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  std::uint8_t& at(int x, int y) {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::uint8_t* data() { return values_.data(); }
  const std::uint8_t* data() const { return values_.data(); }
  std::span<const std::uint8_t> values() const { return values_; }

  // Fraction of cells labeled 1.
  double positive_rate() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> values_;
};

// Raw model output before any thresholding.
class ScoreGrid {
 public:
  ScoreGrid() = default;
  ScoreGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  double& at(int x, int y) {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  double at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<const double> values() const { return values_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

struct Sample {
  FeatureGrid features;
  LabelGrid labels;
};

}  // namespace fedroute
