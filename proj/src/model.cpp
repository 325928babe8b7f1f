#include "fedroute/model.hpp"

#include "fedroute/errors.hpp"

namespace fedroute {

LayerDesc LayerDesc::conv(int kernel, int in_channels, int out_channels) {
  LayerDesc d;
  d.kind = LayerKind::Conv2d;
  d.kernel = kernel;
  d.in_channels = in_channels;
  d.out_channels = out_channels;
  return d;
}

LayerDesc LayerDesc::relu() {
  LayerDesc d;
  d.kind = LayerKind::Relu;
  return d;
}

LayerDesc LayerDesc::batchnorm(int channels) {
  LayerDesc d;
  d.kind = LayerKind::BatchNorm;
  d.channels = channels;
  return d;
}

ModelSpec ModelSpec::flnet(int input_channels) {
  ModelSpec spec;
  spec.name = "flnet";
  spec.input_channels = input_channels;
  spec.layers.push_back(LayerDesc::conv(9, input_channels, 64));
  spec.layers.push_back(LayerDesc::relu());
  spec.layers.push_back(LayerDesc::conv(9, 64, 1));
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::deep_bn(int input_channels) {
  ModelSpec spec;
  spec.name = "deep_bn";
  spec.input_channels = input_channels;
  int ch = input_channels;
  for (int i = 0; i < 5; ++i) {
    spec.layers.push_back(LayerDesc::conv(3, ch, 32));
    spec.layers.push_back(LayerDesc::batchnorm(32));
    spec.layers.push_back(LayerDesc::relu());
    ch = 32;
  }
  spec.layers.push_back(LayerDesc::conv(3, ch, 1));
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::by_name(const std::string& name, int input_channels) {
  if (name == "flnet") return flnet(input_channels);
  if (name == "deep" || name == "deep_bn") return deep_bn(input_channels);
  throw ConfigError("unknown model name: " + name);
}

void ModelSpec::validate() const {
  if (input_channels < 1) throw ConfigError("model input_channels must be >= 1");
  if (layers.empty()) throw ConfigError("model has no layers");
  int ch = input_channels;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerDesc& d = layers[i];
    switch (d.kind) {
      case LayerKind::Conv2d:
        if (d.kernel < 1 || d.kernel % 2 == 0) {
          throw ConfigError("conv kernel size must be odd and positive");
        }
        if (d.in_channels != ch) {
          throw ConfigError("conv layer " + std::to_string(i) +
                            " expects " + std::to_string(d.in_channels) +
                            " input channels but gets " + std::to_string(ch));
        }
        if (d.out_channels < 1) throw ConfigError("conv out_channels must be >= 1");
        ch = d.out_channels;
        break;
      case LayerKind::BatchNorm:
        if (d.channels != ch) {
          throw ConfigError("batchnorm layer " + std::to_string(i) +
                            " channel count mismatch");
        }
        break;
      case LayerKind::Relu:
        break;
    }
  }
  if (ch != 1) {
    throw ConfigError("model must end with a single output channel, got " +
                      std::to_string(ch));
  }
}

int ModelSpec::output_channels() const {
  int ch = input_channels;
  for (const LayerDesc& d : layers) {
    if (d.kind == LayerKind::Conv2d) ch = d.out_channels;
  }
  return ch;
}

int ModelSpec::num_batchnorm_layers() const {
  int n = 0;
  for (const LayerDesc& d : layers) {
    if (d.kind == LayerKind::BatchNorm) ++n;
  }
  return n;
}

std::vector<int> ModelSpec::parametric_layers() const {
  std::vector<int> idx;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].kind == LayerKind::Conv2d ||
        layers[i].kind == LayerKind::BatchNorm) {
      idx.push_back(static_cast<int>(i));
    }
  }
  return idx;
}

std::string ModelSpec::describe() const {
  std::string s = "in=" + std::to_string(input_channels);
  for (const LayerDesc& d : layers) {
    switch (d.kind) {
      case LayerKind::Conv2d:
        s += ";conv" + std::to_string(d.kernel) + "x" + std::to_string(d.kernel) +
             ":" + std::to_string(d.in_channels) + "->" +
             std::to_string(d.out_channels);
        break;
      case LayerKind::Relu:
        s += ";relu";
        break;
      case LayerKind::BatchNorm:
        s += ";bn:" + std::to_string(d.channels);
        break;
    }
  }
  return s;
}

std::uint64_t ModelSpec::hash() const {
  // FNV-1a 64.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : describe()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace fedroute
