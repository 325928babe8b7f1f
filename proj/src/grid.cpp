#include "fedroute/grid.hpp"

#include <cmath>
#include <string>

#include "fedroute/errors.hpp"

namespace fedroute {

FeatureGrid::FeatureGrid(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1 || channels < 1) {
    throw ConfigError("FeatureGrid dimensions must be >= 1, got " +
                      std::to_string(width) + "x" + std::to_string(height) +
                      "x" + std::to_string(channels));
  }
  values_.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
}

bool FeatureGrid::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void FeatureGrid::check_finite(const char* what) const {
  if (!all_finite()) {
    throw ConfigError(std::string(what) + ": non-finite grid value");
  }
}

LabelGrid::LabelGrid(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw ConfigError("LabelGrid dimensions must be >= 1");
  }
  values_.assign(static_cast<std::size_t>(width) * height, 0);
}

double LabelGrid::positive_rate() const {
  if (values_.empty()) return 0.0;
  std::size_t ones = 0;
  for (std::uint8_t v : values_) ones += v;
  return static_cast<double>(ones) / static_cast<double>(values_.size());
}

ScoreGrid::ScoreGrid(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw ConfigError("ScoreGrid dimensions must be >= 1");
  }
  values_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

}  // namespace fedroute
