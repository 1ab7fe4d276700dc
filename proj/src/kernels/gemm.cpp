#include "fftmil/kernels/gemm.hpp"

#include <cstddef>

namespace fftmil::kernels {

namespace {

inline std::size_t at(int r, int c, int cols) { return static_cast<std::size_t>(r) * cols + c; }

template <class T>
void forward_serial(int rows, int in_dim, int out_dim, std::span<const T> x,
                    std::span<const T> w, std::span<const T> b, std::span<T> y) {
  for (int r = 0; r < rows; ++r)
    for (int o = 0; o < out_dim; ++o) {
      T acc = b.empty() ? T(0) : b[o];
      for (int i = 0; i < in_dim; ++i) acc += x[at(r, i, in_dim)] * w[at(o, i, in_dim)];
      y[at(r, o, out_dim)] = acc;
    }
}

template <class T>
void forward_parallel(int rows, int in_dim, int out_dim, std::span<const T> x,
                      std::span<const T> w, std::span<const T> b, std::span<T> y) {
  // Output-major so one weight row is reused across all input rows while hot.
  const int tasks = rows * out_dim;
#pragma omp parallel for schedule(static)
  for (int t = 0; t < tasks; ++t) {
    const int o = t / rows;
    const int r = t % rows;
    const T* xr = x.data() + at(r, 0, in_dim);
    const T* wr = w.data() + at(o, 0, in_dim);
    T acc = 0;
#pragma omp simd reduction(+ : acc)
    for (int i = 0; i < in_dim; ++i) acc += xr[i] * wr[i];
    y[at(r, o, out_dim)] = acc + (b.empty() ? T(0) : b[o]);
  }
}

template <class T>
void backward_input_serial(int rows, int in_dim, int out_dim, std::span<const T> gy,
                           std::span<const T> w, std::span<T> gx) {
  for (int r = 0; r < rows; ++r)
    for (int i = 0; i < in_dim; ++i) {
      T acc = 0;
      for (int o = 0; o < out_dim; ++o) acc += gy[at(r, o, out_dim)] * w[at(o, i, in_dim)];
      gx[at(r, i, in_dim)] += acc;
    }
}

template <class T>
void backward_input_parallel(int rows, int in_dim, int out_dim, std::span<const T> gy,
                             std::span<const T> w, std::span<T> gx) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    T* gxr = gx.data() + at(r, 0, in_dim);
    for (int o = 0; o < out_dim; ++o) {
      const T g = gy[at(r, o, out_dim)];
      if (g == T(0)) continue;
      const T* wr = w.data() + at(o, 0, in_dim);
#pragma omp simd
      for (int i = 0; i < in_dim; ++i) gxr[i] += g * wr[i];
    }
  }
}

template <class T>
void backward_weight_serial(int rows, int in_dim, int out_dim, std::span<const T> gy,
                            std::span<const T> x, std::span<T> gw, std::span<T> gb) {
  for (int o = 0; o < out_dim; ++o) {
    for (int i = 0; i < in_dim; ++i) {
      T acc = 0;
      for (int r = 0; r < rows; ++r) acc += gy[at(r, o, out_dim)] * x[at(r, i, in_dim)];
      gw[at(o, i, in_dim)] += acc;
    }
    if (!gb.empty()) {
      T acc = 0;
      for (int r = 0; r < rows; ++r) acc += gy[at(r, o, out_dim)];
      gb[o] += acc;
    }
  }
}

template <class T>
void backward_weight_parallel(int rows, int in_dim, int out_dim, std::span<const T> gy,
                              std::span<const T> x, std::span<T> gw, std::span<T> gb) {
#pragma omp parallel for schedule(static)
  for (int o = 0; o < out_dim; ++o) {
    T* gwr = gw.data() + at(o, 0, in_dim);
    T bias_acc = 0;
    for (int r = 0; r < rows; ++r) {
      const T g = gy[at(r, o, out_dim)];
      bias_acc += g;
      if (g == T(0)) continue;
      const T* xr = x.data() + at(r, 0, in_dim);
#pragma omp simd
      for (int i = 0; i < in_dim; ++i) gwr[i] += g * xr[i];
    }
    if (!gb.empty()) gb[o] += bias_acc;
  }
}

}  // namespace

template <class T>
void linear_forward(int rows, int in_dim, int out_dim, std::span<const T> x,
                    std::span<const T> w, std::span<const T> b, std::span<T> y, Backend backend) {
  if (backend == Backend::serial)
    forward_serial(rows, in_dim, out_dim, x, w, b, y);
  else
    forward_parallel(rows, in_dim, out_dim, x, w, b, y);
}

template <class T>
void linear_backward_input(int rows, int in_dim, int out_dim, std::span<const T> grad_y,
                           std::span<const T> w, std::span<T> grad_x, Backend backend) {
  if (backend == Backend::serial)
    backward_input_serial(rows, in_dim, out_dim, grad_y, w, grad_x);
  else
    backward_input_parallel(rows, in_dim, out_dim, grad_y, w, grad_x);
}

template <class T>
void linear_backward_weight(int rows, int in_dim, int out_dim, std::span<const T> grad_y,
                            std::span<const T> x, std::span<T> grad_w, std::span<T> grad_b,
                            Backend backend) {
  if (backend == Backend::serial)
    backward_weight_serial(rows, in_dim, out_dim, grad_y, x, grad_w, grad_b);
  else
    backward_weight_parallel(rows, in_dim, out_dim, grad_y, x, grad_w, grad_b);
}

#define FFTMIL_INSTANTIATE_GEMM(T)                                                           \
  template void linear_forward<T>(int, int, int, std::span<const T>, std::span<const T>,     \
                                  std::span<const T>, std::span<T>, Backend);                \
  template void linear_backward_input<T>(int, int, int, std::span<const T>,                  \
                                         std::span<const T>, std::span<T>, Backend);         \
  template void linear_backward_weight<T>(int, int, int, std::span<const T>,                 \
                                          std::span<const T>, std::span<T>, std::span<T>,    \
                                          Backend);

FFTMIL_INSTANTIATE_GEMM(float)
FFTMIL_INSTANTIATE_GEMM(double)

}  // namespace fftmil::kernels
