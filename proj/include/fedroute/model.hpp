#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fedroute {

enum class LayerKind { Conv2d, Relu, BatchNorm };

struct LayerDesc {
  LayerKind kind = LayerKind::Relu;
  // Conv2d only. Convolutions are zero-padded "same": output w,h equal
  // input w,h.
  int kernel = 0;
  int in_channels = 0;
  int out_channels = 0;
  // BatchNorm only.
  int channels = 0;

  static LayerDesc conv(int kernel, int in_channels, int out_channels);
  static LayerDesc relu();
  static LayerDesc batchnorm(int channels);
};

struct ModelSpec {
  std::string name;
  int input_channels = 0;
  std::vector<LayerDesc> layers;

  // Two 9x9 convolutions, 64 filters then 1, ReLU in between, no output
  // activation and no batch norm.
  static ModelSpec flnet(int input_channels);

  // Deep baseline: six 3x3 convolutions (32 filters), batch norm + ReLU
  // after each of the first five, final conv to a single channel.
  static ModelSpec deep_bn(int input_channels);

  static ModelSpec by_name(const std::string& name, int input_channels);

  // Throws ConfigError when the layer list is inconsistent (channel chain
  // broken, even kernel, final out_channels != 1, ...).
  void validate() const;

  int output_channels() const;
  int num_batchnorm_layers() const;
  // Indices of layers that own parameters (conv and batchnorm).
  std::vector<int> parametric_layers() const;

  // Canonical one-line description; hash() is an FNV-1a over it and is the
  // model identity stored in artifacts.
  std::string describe() const;
  std::uint64_t hash() const;
};

}  // namespace fedroute
