#pragma once

#include <cstddef>

// Low-level convolution kernels. Forward accumulation follows the fixed
// per-cell term order (input channel, then kernel row, then kernel column);
// every other routine only has to be deterministic.

namespace fedroute::detail {

struct ConvGeom {
  int w = 0, h = 0;  // grid size; same padding keeps output == input size
  int in_ch = 0;
  int out_ch = 0;
  int k = 0;  // odd kernel size
  int p = 0;  // (k - 1) / 2
  int pw = 0, ph = 0;  // padded plane size: w + k - 1, h + k - 1
};

// Padded buffers passed to the kernels must be allocated with this many
// extra doubles past the last plane and keep them initialized: the 8-wide
// tail tiles read (never write) up to 7 doubles beyond the data.
inline constexpr std::size_t kPadSlack = 8;

ConvGeom make_geom(int w, int h, int in_ch, int out_ch, int k);

// Copies `ch` planes of h*w into zero-margined planes of ph*pw.
void pad_grid(const double* in, int w, int h, int ch, int p, double* padded);

// out[oc][y][x] = sum over (c, ky, kx) of weights * padded_in + bias[oc].
// bias may be null (treated as zero).
void conv_forward(const ConvGeom& g, const double* padded_in,
                  const double* weights, const double* bias, double* out);

// Accumulates (+=) weight and bias gradients for one sample.
void conv_grad_weights(const ConvGeom& g, const double* padded_in,
                       const double* dy, double* dweights, double* dbias);

// dx[c][y][x] = correlation of padded dy with the flipped kernel.
// flip_scratch must hold in_ch*out_ch*k*k doubles.
void conv_grad_input(const ConvGeom& g, const double* padded_dy,
                     const double* weights, double* dx, double* flip_scratch);

}  // namespace fedroute::detail
