#pragma once

#include <span>

namespace fftmil::kernels {

/// Execution path for the data-parallel kernels. `serial` is the plain
/// reference loop nest kept for testing; `parallel` is the OpenMP version
/// used everywhere else.
enum class Backend { serial, parallel };

const char* to_string(Backend b);

/// 3x3 kernel, stride 1, zero padding 1: output has the input's H x W.
/// Layouts are NCHW for activations and [out][in][3][3] for weights.
struct ConvShape {
  int batch = 1;
  int in_channels = 1;
  int out_channels = 1;
  int height = 1;
  int width = 1;
};

/// out = bias + cross_correlate(in, weights). `bias` may be empty.
template <class T>
void conv2d_forward(const ConvShape& s, std::span<const T> in, std::span<const T> weights,
                    std::span<const T> bias, std::span<T> out,
                    Backend backend = Backend::parallel);

/// grad_in += d(out)/d(in)^T grad_out
template <class T>
void conv2d_backward_input(const ConvShape& s, std::span<const T> grad_out,
                           std::span<const T> weights, std::span<T> grad_in,
                           Backend backend = Backend::parallel);

/// grad_w += d(out)/d(w)^T grad_out, grad_b += per-channel sums. `grad_b` may be empty.
template <class T>
void conv2d_backward_weight(const ConvShape& s, std::span<const T> in,
                            std::span<const T> grad_out, std::span<T> grad_w,
                            std::span<T> grad_b, Backend backend = Backend::parallel);

}  // namespace fftmil::kernels
