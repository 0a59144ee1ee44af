#pragma once

#include "radsr/neuro/tensor.hpp"

namespace radsr::neuro {

// Element-wise arithmetic. Binary ops require equal shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);

// Element-wise nonlinearities.
Tensor abs(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope = 0.2);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor log(const Tensor& a);
/// Gradient passes only where lo < a < hi.
Tensor clamp(const Tensor& a, double lo, double hi);

// Reductions to shape {1}.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// NCHW channel concatenation.
Tensor concat_channels(const Tensor& a, const Tensor& b);

/// x: (N,C,H,W), weight: (O,C,K,K), bias: (O) or undefined.
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t stride, std::size_t pad);

/// x: (N,C,H,W), weight: (C,O,K,K), bias: (O) or undefined.
/// Output spatial size (H-1)*stride - 2*pad + K.
Tensor conv_transpose2d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t stride,
                        std::size_t pad);

/// Per-sample, per-channel normalisation without affine parameters.
Tensor instance_norm(const Tensor& x, double eps = 1e-5);

/// Output spatial extent of a convolution; throws if the geometry is empty.
std::size_t conv_out_size(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad);

}  // namespace radsr::neuro
