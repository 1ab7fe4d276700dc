#pragma once

#include <span>

#include "fftmil/kernels/conv2d.hpp"

namespace fftmil::kernels {

// Dense affine map in the row-vector convention used by the linear layer:
//   y[rows x out] = x[rows x in] * w[out x in]^T + b[out]

template <class T>
void linear_forward(int rows, int in_dim, int out_dim, std::span<const T> x,
                    std::span<const T> w, std::span<const T> b, std::span<T> y,
                    Backend backend = Backend::parallel);

/// grad_x += grad_y * w
template <class T>
void linear_backward_input(int rows, int in_dim, int out_dim, std::span<const T> grad_y,
                           std::span<const T> w, std::span<T> grad_x,
                           Backend backend = Backend::parallel);

/// grad_w += grad_y^T * x, grad_b += column sums of grad_y (grad_b may be empty)
template <class T>
void linear_backward_weight(int rows, int in_dim, int out_dim, std::span<const T> grad_y,
                            std::span<const T> x, std::span<T> grad_w, std::span<T> grad_b,
                            Backend backend = Backend::parallel);

}  // namespace fftmil::kernels
