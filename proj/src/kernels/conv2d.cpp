#include "fftmil/kernels/conv2d.hpp"

#include <algorithm>
#include <cstddef>

namespace fftmil::kernels {

const char* to_string(Backend b) { return b == Backend::serial ? "serial" : "parallel"; }

namespace {

constexpr int kK = 3;

inline std::size_t plane_index(const ConvShape& s, int n, int c, int channels) {
  return (static_cast<std::size_t>(n) * channels + c) * s.height * s.width;
}

inline std::size_t weight_index(const ConvShape& s, int co, int ci, int ky, int kx) {
  return ((static_cast<std::size_t>(co) * s.in_channels + ci) * kK + ky) * kK + kx;
}

// ---- serial reference: direct loop nest, bounds-checked per tap ----

template <class T>
void forward_serial(const ConvShape& s, std::span<const T> in, std::span<const T> w,
                    std::span<const T> bias, std::span<T> out) {
  for (int n = 0; n < s.batch; ++n)
    for (int co = 0; co < s.out_channels; ++co)
      for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
          T acc = bias.empty() ? T(0) : bias[co];
          for (int ci = 0; ci < s.in_channels; ++ci)
            for (int ky = 0; ky < kK; ++ky)
              for (int kx = 0; kx < kK; ++kx) {
                const int sy = y + ky - 1;
                const int sx = x + kx - 1;
                if (sy < 0 || sy >= s.height || sx < 0 || sx >= s.width) continue;
                acc += w[weight_index(s, co, ci, ky, kx)] *
                       in[plane_index(s, n, ci, s.in_channels) + sy * s.width + sx];
              }
          out[plane_index(s, n, co, s.out_channels) + y * s.width + x] = acc;
        }
}

template <class T>
void backward_input_serial(const ConvShape& s, std::span<const T> gout, std::span<const T> w,
                           std::span<T> gin) {
  for (int n = 0; n < s.batch; ++n)
    for (int co = 0; co < s.out_channels; ++co)
      for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
          const T g = gout[plane_index(s, n, co, s.out_channels) + y * s.width + x];
          for (int ci = 0; ci < s.in_channels; ++ci)
            for (int ky = 0; ky < kK; ++ky)
              for (int kx = 0; kx < kK; ++kx) {
                const int sy = y + ky - 1;
                const int sx = x + kx - 1;
                if (sy < 0 || sy >= s.height || sx < 0 || sx >= s.width) continue;
                gin[plane_index(s, n, ci, s.in_channels) + sy * s.width + sx] +=
                    g * w[weight_index(s, co, ci, ky, kx)];
              }
        }
}

template <class T>
void backward_weight_serial(const ConvShape& s, std::span<const T> in, std::span<const T> gout,
                            std::span<T> gw, std::span<T> gb) {
  for (int n = 0; n < s.batch; ++n)
    for (int co = 0; co < s.out_channels; ++co)
      for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
          const T g = gout[plane_index(s, n, co, s.out_channels) + y * s.width + x];
          if (!gb.empty()) gb[co] += g;
          for (int ci = 0; ci < s.in_channels; ++ci)
            for (int ky = 0; ky < kK; ++ky)
              for (int kx = 0; kx < kK; ++kx) {
                const int sy = y + ky - 1;
                const int sx = x + kx - 1;
                if (sy < 0 || sy >= s.height || sx < 0 || sx >= s.width) continue;
                gw[weight_index(s, co, ci, ky, kx)] +=
                    g * in[plane_index(s, n, ci, s.in_channels) + sy * s.width + sx];
              }
        }
}

// ---- parallel: one output (or input) plane per task, row-wise axpy inner loops ----

// Valid output x-range for horizontal tap kx, so that x + kx - 1 stays in [0, W).
inline int x_begin(int kx) { return std::max(0, 1 - kx); }
inline int x_end(int kx, int w) { return std::min(w, w + 1 - kx); }
inline int y_begin(int ky) { return std::max(0, 1 - ky); }
inline int y_end(int ky, int h) { return std::min(h, h + 1 - ky); }

template <class T>
void forward_parallel(const ConvShape& s, std::span<const T> in, std::span<const T> w,
                      std::span<const T> bias, std::span<T> out) {
  const int W = s.width;
  const int H = s.height;
  const int tasks = s.batch * s.out_channels;
#pragma omp parallel for schedule(static)
  for (int t = 0; t < tasks; ++t) {
    const int n = t / s.out_channels;
    const int co = t % s.out_channels;
    T* o = out.data() + plane_index(s, n, co, s.out_channels);
    std::fill(o, o + static_cast<std::size_t>(H) * W, bias.empty() ? T(0) : bias[co]);
    for (int ci = 0; ci < s.in_channels; ++ci) {
      const T* src = in.data() + plane_index(s, n, ci, s.in_channels);
      for (int ky = 0; ky < kK; ++ky)
        for (int kx = 0; kx < kK; ++kx) {
          const T wv = w[weight_index(s, co, ci, ky, kx)];
          const int xb = x_begin(kx), xe = x_end(kx, W);
          for (int y = y_begin(ky); y < y_end(ky, H); ++y) {
            T* orow = o + static_cast<std::size_t>(y) * W;
            const T* srow = src + static_cast<std::size_t>(y + ky - 1) * W + (kx - 1);
#pragma omp simd
            for (int x = xb; x < xe; ++x) orow[x] += wv * srow[x];
          }
        }
    }
  }
}

template <class T>
void backward_input_parallel(const ConvShape& s, std::span<const T> gout, std::span<const T> w,
                             std::span<T> gin) {
  const int W = s.width;
  const int H = s.height;
  const int tasks = s.batch * s.in_channels;
#pragma omp parallel for schedule(static)
  for (int t = 0; t < tasks; ++t) {
    const int n = t / s.in_channels;
    const int ci = t % s.in_channels;
    T* gi = gin.data() + plane_index(s, n, ci, s.in_channels);
    for (int co = 0; co < s.out_channels; ++co) {
      const T* go = gout.data() + plane_index(s, n, co, s.out_channels);
      for (int ky = 0; ky < kK; ++ky)
        for (int kx = 0; kx < kK; ++kx) {
          const T wv = w[weight_index(s, co, ci, ky, kx)];
          const int xb = x_begin(kx), xe = x_end(kx, W);
          for (int y = y_begin(ky); y < y_end(ky, H); ++y) {
            const T* grow = go + static_cast<std::size_t>(y) * W;
            T* irow = gi + static_cast<std::size_t>(y + ky - 1) * W + (kx - 1);
#pragma omp simd
            for (int x = xb; x < xe; ++x) irow[x] += wv * grow[x];
          }
        }
    }
  }
}

template <class T>
void backward_weight_parallel(const ConvShape& s, std::span<const T> in, std::span<const T> gout,
                              std::span<T> gw, std::span<T> gb) {
  const int W = s.width;
  const int H = s.height;
#pragma omp parallel for schedule(static)
  for (int co = 0; co < s.out_channels; ++co) {
    for (int n = 0; n < s.batch; ++n) {
      const T* go = gout.data() + plane_index(s, n, co, s.out_channels);
      if (!gb.empty()) {
        T acc = 0;
#pragma omp simd reduction(+ : acc)
        for (int i = 0; i < H * W; ++i) acc += go[i];
        gb[co] += acc;
      }
      for (int ci = 0; ci < s.in_channels; ++ci) {
        const T* src = in.data() + plane_index(s, n, ci, s.in_channels);
        for (int ky = 0; ky < kK; ++ky)
          for (int kx = 0; kx < kK; ++kx) {
            const int xb = x_begin(kx), xe = x_end(kx, W);
            T acc = 0;
            for (int y = y_begin(ky); y < y_end(ky, H); ++y) {
              const T* grow = go + static_cast<std::size_t>(y) * W;
              const T* srow = src + static_cast<std::size_t>(y + ky - 1) * W + (kx - 1);
#pragma omp simd reduction(+ : acc)
              for (int x = xb; x < xe; ++x) acc += grow[x] * srow[x];
            }
            gw[weight_index(s, co, ci, ky, kx)] += acc;
          }
      }
    }
  }
}

}  // namespace

template <class T>
void conv2d_forward(const ConvShape& s, std::span<const T> in, std::span<const T> weights,
                    std::span<const T> bias, std::span<T> out, Backend backend) {
  if (backend == Backend::serial)
    forward_serial(s, in, weights, bias, out);
  else
    forward_parallel(s, in, weights, bias, out);
}

template <class T>
void conv2d_backward_input(const ConvShape& s, std::span<const T> grad_out,
                           std::span<const T> weights, std::span<T> grad_in, Backend backend) {
  if (backend == Backend::serial)
    backward_input_serial(s, grad_out, weights, grad_in);
  else
    backward_input_parallel(s, grad_out, weights, grad_in);
}

template <class T>
void conv2d_backward_weight(const ConvShape& s, std::span<const T> in,
                            std::span<const T> grad_out, std::span<T> grad_w,
                            std::span<T> grad_b, Backend backend) {
  if (backend == Backend::serial)
    backward_weight_serial(s, in, grad_out, grad_w, grad_b);
  else
    backward_weight_parallel(s, in, grad_out, grad_w, grad_b);
}

#define FFTMIL_INSTANTIATE_CONV(T)                                                          \
  template void conv2d_forward<T>(const ConvShape&, std::span<const T>, std::span<const T>, \
                                  std::span<const T>, std::span<T>, Backend);               \
  template void conv2d_backward_input<T>(const ConvShape&, std::span<const T>,              \
                                         std::span<const T>, std::span<T>, Backend);        \
  template void conv2d_backward_weight<T>(const ConvShape&, std::span<const T>,             \
                                          std::span<const T>, std::span<T>, std::span<T>,   \
                                          Backend);

FFTMIL_INSTANTIATE_CONV(float)
FFTMIL_INSTANTIATE_CONV(double)

}  // namespace fftmil::kernels
