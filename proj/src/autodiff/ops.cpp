#include "fftmil/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fftmil/error.hpp"
#include "fftmil/kernels/conv2d.hpp"
#include "fftmil/kernels/gemm.hpp"

namespace fftmil::ad {

namespace {

template <class T>
std::vector<T> copy_values(const Var<T>& x) {
  return {x.value().begin(), x.value().end()};
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

void require_same_size(std::size_t a, std::size_t b, const char* op) {
  require(a == b, std::string(op) + ": operand sizes differ (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
}

}  // namespace

// ---------------------------------------------------------------- conv2d

template <class T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b) {
  require(x.rank() == 4, "conv2d: input must be [B,C,H,W], got " + shape_string(x.shape()));
  require(w.rank() == 4 && w.dim(2) == 3 && w.dim(3) == 3,
          "conv2d: weights must be [Co,Ci,3,3], got " + shape_string(w.shape()));
  require(w.dim(1) == x.dim(1), "conv2d: expected " + std::to_string(w.dim(1)) +
                                    " input channels, got " + std::to_string(x.dim(1)) +
                                    " (input " + shape_string(x.shape()) + ")");
  const bool has_bias = b.defined();
  if (has_bias)
    require(static_cast<int>(b.size()) == w.dim(0), "conv2d: bias must have Co elements");

  kernels::ConvShape s{x.dim(0), x.dim(1), w.dim(0), x.dim(2), x.dim(3)};
  std::vector<T> out(static_cast<std::size_t>(s.batch) * s.out_channels * s.height * s.width);
  kernels::conv2d_forward<T>(s, x.value(), w.value(),
                             has_bias ? b.value() : std::span<const T>{}, out);

  std::vector<Var<T>> parents{x, w};
  if (has_bias) parents.push_back(b);
  return Var<T>::result({s.batch, s.out_channels, s.height, s.width}, std::move(out),
                        std::move(parents), [s, has_bias](Node<T>& n) {
                          Node<T>& xn = *n.parents[0];
                          Node<T>& wn = *n.parents[1];
                          if (xn.requires_grad)
                            kernels::conv2d_backward_input<T>(s, n.grad, wn.value, xn.grad);
                          const bool bias_grad = has_bias && n.parents[2]->requires_grad;
                          if (wn.requires_grad || bias_grad) {
                            // The weight kernel writes both; route to scratch when one
                            // side is frozen.
                            std::vector<T> scratch_w;
                            std::span<T> gw = wn.grad;
                            if (!wn.requires_grad) {
                              scratch_w.assign(wn.value.size(), T(0));
                              gw = scratch_w;
                            }
                            std::span<T> gb = bias_grad ? std::span<T>(n.parents[2]->grad)
                                                        : std::span<T>{};
                            kernels::conv2d_backward_weight<T>(s, xn.value, n.grad, gw, gb);
                          }
                        });
}

// ---------------------------------------------------------------- activations

template <class T>
Var<T> relu(const Var<T>& x) {
  std::vector<T> y = copy_values(x);
  for (auto& v : y) v = v > T(0) ? v : T(0);
  return Var<T>::result(x.shape(), std::move(y), {x}, [](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      if (p.value[i] > T(0)) p.grad[i] += n.grad[i];
  });
}

template <class T>
Var<T> leaky_relu(const Var<T>& x, T slope) {
  std::vector<T> y = copy_values(x);
  for (auto& v : y) v = v > T(0) ? v : slope * v;
  return Var<T>::result(x.shape(), std::move(y), {x}, [slope](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      p.grad[i] += p.value[i] > T(0) ? n.grad[i] : slope * n.grad[i];
  });
}

template <class T>
Var<T> activate(const Var<T>& x, Activation a) {
  switch (a) {
    case Activation::relu: return relu(x);
    case Activation::leaky_relu: return leaky_relu(x);
    case Activation::none: return x;
  }
  return x;
}

template <class T>
Var<T> tanh(const Var<T>& x) {
  std::vector<T> y = copy_values(x);
  for (auto& v : y) v = std::tanh(v);
  return Var<T>::result(x.shape(), std::move(y), {x}, [](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      p.grad[i] += n.grad[i] * (T(1) - n.value[i] * n.value[i]);
  });
}

template <class T>
Var<T> sigmoid(const Var<T>& x) {
  std::vector<T> y = copy_values(x);
  for (auto& v : y) v = T(1) / (T(1) + std::exp(-v));
  return Var<T>::result(x.shape(), std::move(y), {x}, [](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      p.grad[i] += n.grad[i] * n.value[i] * (T(1) - n.value[i]);
  });
}

// ---------------------------------------------------------------- pooling

template <class T>
Var<T> maxpool2x2(const Var<T>& x) {
  require(x.rank() == 4, "maxpool2x2: input must be [B,C,H,W]");
  const int planes = x.dim(0) * x.dim(1);
  const int H = x.dim(2);
  const int W = x.dim(3);
  require(H % 2 == 0 && W % 2 == 0,
          "maxpool2x2: H and W must be even, got " + shape_string(x.shape()));
  const int oh = H / 2;
  const int ow = W / 2;
  std::vector<T> out(static_cast<std::size_t>(planes) * oh * ow);
  std::vector<std::size_t> argmax(out.size());
  const auto in = x.value();
  for (int p = 0; p < planes; ++p)
    for (int y = 0; y < oh; ++y)
      for (int xo = 0; xo < ow; ++xo) {
        const std::size_t base = static_cast<std::size_t>(p) * H * W;
        std::size_t best = base + static_cast<std::size_t>(2 * y) * W + 2 * xo;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t idx = base + static_cast<std::size_t>(2 * y + dy) * W + 2 * xo + dx;
            if (in[idx] > in[best]) best = idx;
          }
        const std::size_t o = (static_cast<std::size_t>(p) * oh + y) * ow + xo;
        out[o] = in[best];
        argmax[o] = best;
      }
  return Var<T>::result({x.dim(0), x.dim(1), oh, ow}, std::move(out), {x},
                        [argmax = std::move(argmax)](Node<T>& n) {
                          Node<T>& p = *n.parents[0];
                          for (std::size_t i = 0; i < n.grad.size(); ++i)
                            p.grad[argmax[i]] += n.grad[i];
                        });
}

// ---------------------------------------------------------------- normalization

NormMode parse_norm_mode(std::string_view name) {
  if (name == "minmax") return NormMode::minmax;
  if (name == "zscore") return NormMode::zscore;
  if (name == "l2") return NormMode::l2;
  if (name == "none") return NormMode::none;
  throw InvalidArgument("unknown normalization mode '" + std::string(name) + "'");
}

const char* to_string(NormMode m) {
  switch (m) {
    case NormMode::minmax: return "minmax";
    case NormMode::zscore: return "zscore";
    case NormMode::l2: return "l2";
    case NormMode::none: return "none";
  }
  return "?";
}

template <class T>
Var<T> normalize(const Var<T>& x, NormMode mode) {
  for (T v : x.value())
    if (!std::isfinite(v)) throw InvalidArgument("normalize: non-finite input");
  if (mode == NormMode::none) return x;

  const int batch = x.rank() > 1 ? x.dim(0) : 1;
  const std::size_t per = x.size() / static_cast<std::size_t>(batch);
  const auto in = x.value();
  std::vector<T> out(x.size());

  if (mode == NormMode::minmax) {
    std::vector<std::size_t> lo(batch), hi(batch);
    std::vector<T> range(batch);
    for (int b = 0; b < batch; ++b) {
      const std::size_t base = b * per;
      std::size_t imin = base, imax = base;
      for (std::size_t i = base; i < base + per; ++i) {
        if (in[i] < in[imin]) imin = i;
        if (in[i] > in[imax]) imax = i;
      }
      lo[b] = imin;
      hi[b] = imax;
      range[b] = in[imax] - in[imin];
      for (std::size_t i = base; i < base + per; ++i)
        out[i] = range[b] > T(0) ? (in[i] - in[imin]) / range[b] : T(0);
    }
    return Var<T>::result(x.shape(), std::move(out), {x},
                          [lo, hi, range, per, batch](Node<T>& n) {
                            Node<T>& p = *n.parents[0];
                            for (int b = 0; b < batch; ++b) {
                              const T r = range[b];
                              if (!(r > T(0))) continue;
                              const std::size_t base = b * per;
                              T to_min = 0, to_max = 0;
                              for (std::size_t i = base; i < base + per; ++i) {
                                const T g = n.grad[i];
                                p.grad[i] += g / r;
                                to_min += g * (n.value[i] - T(1)) / r;
                                to_max -= g * n.value[i] / r;
                              }
                              p.grad[lo[b]] += to_min;
                              p.grad[hi[b]] += to_max;
                            }
                          });
  }

  if (mode == NormMode::zscore) {
    constexpr T eps = T(1e-8);
    std::vector<T> mean(batch), sd(batch);
    for (int b = 0; b < batch; ++b) {
      const std::size_t base = b * per;
      T m = 0;
      for (std::size_t i = base; i < base + per; ++i) m += in[i];
      m /= static_cast<T>(per);
      T v = 0;
      for (std::size_t i = base; i < base + per; ++i) v += (in[i] - m) * (in[i] - m);
      v /= static_cast<T>(per);
      mean[b] = m;
      sd[b] = std::sqrt(v);
      for (std::size_t i = base; i < base + per; ++i) out[i] = (in[i] - m) / (sd[b] + eps);
    }
    return Var<T>::result(x.shape(), std::move(out), {x}, [mean, sd, per, batch](Node<T>& n) {
      Node<T>& p = *n.parents[0];
      const T np = static_cast<T>(per);
      for (int b = 0; b < batch; ++b) {
        const std::size_t base = b * per;
        const T s = sd[b] + eps;
        T gsum = 0, gdot = 0;
        for (std::size_t i = base; i < base + per; ++i) {
          gsum += n.grad[i];
          gdot += n.grad[i] * (p.value[i] - mean[b]);
        }
        for (std::size_t i = base; i < base + per; ++i) {
          T g = (n.grad[i] - gsum / np) / s;
          if (sd[b] > T(0)) g -= (p.value[i] - mean[b]) * gdot / (np * sd[b] * s * s);
          p.grad[i] += g;
        }
      }
    });
  }

  // l2
  constexpr T eps = T(1e-8);
  std::vector<T> norm(batch);
  for (int b = 0; b < batch; ++b) {
    const std::size_t base = b * per;
    T ss = 0;
    for (std::size_t i = base; i < base + per; ++i) ss += in[i] * in[i];
    norm[b] = std::sqrt(ss);
    for (std::size_t i = base; i < base + per; ++i) out[i] = in[i] / (norm[b] + eps);
  }
  return Var<T>::result(x.shape(), std::move(out), {x}, [norm, per, batch](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    for (int b = 0; b < batch; ++b) {
      const std::size_t base = b * per;
      const T r = norm[b] + eps;
      T gdot = 0;
      for (std::size_t i = base; i < base + per; ++i) gdot += n.grad[i] * p.value[i];
      for (std::size_t i = base; i < base + per; ++i) {
        T g = n.grad[i] / r;
        if (norm[b] > T(0)) g -= p.value[i] * gdot / (norm[b] * r * r);
        p.grad[i] += g;
      }
    }
  });
}

// ---------------------------------------------------------------- batch norm

template <class T>
BatchNorm<T> make_batchnorm(ParameterSet<T>& params, const std::string& name, int channels) {
  BatchNorm<T> bn;
  bn.gamma = params.add(name + ".gamma", {channels}, std::vector<T>(channels, T(1)));
  bn.beta = params.add_zeros(name + ".beta", {channels});
  bn.running_mean.assign(channels, T(0));
  bn.running_var.assign(channels, T(1));
  return bn;
}

template <class T>
Var<T> batchnorm(const Var<T>& x, BatchNorm<T>& bn, bool training) {
  require(x.rank() == 4 || x.rank() == 2, "batchnorm: input must be [B,C,H,W] or [B,C]");
  const int B = x.dim(0);
  const int C = x.dim(1);
  const std::size_t hw = x.rank() == 4 ? static_cast<std::size_t>(x.dim(2)) * x.dim(3) : 1;
  require(static_cast<int>(bn.gamma.size()) == C,
          "batchnorm: expected " + std::to_string(bn.gamma.size()) + " channels, got " +
              std::to_string(C));
  const auto in = x.value();
  const auto gamma = bn.gamma.value();
  const auto beta = bn.beta.value();
  const T m = static_cast<T>(static_cast<std::size_t>(B) * hw);
  auto idx = [&](int b, int c, std::size_t i) {
    return (static_cast<std::size_t>(b) * C + c) * hw + i;
  };

  std::vector<T> inv_std(C), xhat(x.size()), out(x.size());
  for (int c = 0; c < C; ++c) {
    T mean, var;
    if (training) {
      mean = 0;
      for (int b = 0; b < B; ++b)
        for (std::size_t i = 0; i < hw; ++i) mean += in[idx(b, c, i)];
      mean /= m;
      var = 0;
      for (int b = 0; b < B; ++b)
        for (std::size_t i = 0; i < hw; ++i) var += (in[idx(b, c, i)] - mean) * (in[idx(b, c, i)] - mean);
      var /= m;
      bn.running_mean[c] = bn.momentum * bn.running_mean[c] + (T(1) - bn.momentum) * mean;
      bn.running_var[c] = bn.momentum * bn.running_var[c] + (T(1) - bn.momentum) * var;
    } else {
      mean = bn.running_mean[c];
      var = bn.running_var[c];
    }
    inv_std[c] = T(1) / std::sqrt(var + bn.eps);
    for (int b = 0; b < B; ++b)
      for (std::size_t i = 0; i < hw; ++i) {
        const std::size_t k = idx(b, c, i);
        xhat[k] = (in[k] - mean) * inv_std[c];
        out[k] = gamma[c] * xhat[k] + beta[c];
      }
  }

  return Var<T>::result(
      x.shape(), std::move(out), {x, bn.gamma, bn.beta},
      [inv_std = std::move(inv_std), xhat = std::move(xhat), B, C, hw, m, training](Node<T>& n) {
        Node<T>& xn = *n.parents[0];
        Node<T>& gn = *n.parents[1];
        Node<T>& bnode = *n.parents[2];
        auto idx = [&](int b, int c, std::size_t i) {
          return (static_cast<std::size_t>(b) * C + c) * hw + i;
        };
        for (int c = 0; c < C; ++c) {
          T sum_g = 0, sum_gx = 0;
          for (int b = 0; b < B; ++b)
            for (std::size_t i = 0; i < hw; ++i) {
              const std::size_t k = idx(b, c, i);
              sum_g += n.grad[k];
              sum_gx += n.grad[k] * xhat[k];
            }
          if (gn.requires_grad) gn.grad[c] += sum_gx;
          if (bnode.requires_grad) bnode.grad[c] += sum_g;
          if (!xn.requires_grad) continue;
          const T gamma = gn.value[c];
          for (int b = 0; b < B; ++b)
            for (std::size_t i = 0; i < hw; ++i) {
              const std::size_t k = idx(b, c, i);
              if (training)
                xn.grad[k] += gamma * inv_std[c] / m * (m * n.grad[k] - sum_g - xhat[k] * sum_gx);
              else
                xn.grad[k] += gamma * inv_std[c] * n.grad[k];
            }
        }
      });
}

// ---------------------------------------------------------------- linear / loss

template <class T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b) {
  require(w.rank() == 2, "linear: weights must be [out,in]");
  const int out_dim = w.dim(0);
  const int in_dim = w.dim(1);
  const int rows = x.rank() >= 2 ? x.dim(0) : 1;
  require(x.size() == static_cast<std::size_t>(rows) * in_dim,
          "linear: input " + shape_string(x.shape()) + " does not match weights " +
              shape_string(w.shape()));
  const bool has_bias = b.defined();
  if (has_bias) require(static_cast<int>(b.size()) == out_dim, "linear: bias size mismatch");

  std::vector<T> y(static_cast<std::size_t>(rows) * out_dim);
  kernels::linear_forward<T>(rows, in_dim, out_dim, x.value(), w.value(),
                             has_bias ? b.value() : std::span<const T>{}, y);
  std::vector<Var<T>> parents{x, w};
  if (has_bias) parents.push_back(b);
  return Var<T>::result({rows, out_dim}, std::move(y), std::move(parents),
                        [rows, in_dim, out_dim, has_bias](Node<T>& n) {
                          Node<T>& xn = *n.parents[0];
                          Node<T>& wn = *n.parents[1];
                          if (xn.requires_grad)
                            kernels::linear_backward_input<T>(rows, in_dim, out_dim, n.grad,
                                                              wn.value, xn.grad);
                          const bool bias_grad = has_bias && n.parents[2]->requires_grad;
                          if (wn.requires_grad)
                            kernels::linear_backward_weight<T>(
                                rows, in_dim, out_dim, n.grad, xn.value, wn.grad,
                                bias_grad ? std::span<T>(n.parents[2]->grad) : std::span<T>{});
                          else if (bias_grad)
                            for (int r = 0; r < rows; ++r)
                              for (int o = 0; o < out_dim; ++o)
                                n.parents[2]->grad[o] +=
                                    n.grad[static_cast<std::size_t>(r) * out_dim + o];
                        });
}

template <class T>
Var<T> cross_entropy(const Var<T>& logits, int label) {
  const int K = static_cast<int>(logits.size());
  if (label < 0 || label >= K)
    throw InvalidArgument("cross_entropy: label " + std::to_string(label) + " outside [0," +
                          std::to_string(K) + ")");
  const auto z = logits.value();
  const T zmax = *std::max_element(z.begin(), z.end());
  T denom = 0;
  for (T v : z) denom += std::exp(v - zmax);
  const T loss = std::log(denom) + zmax - z[label];
  std::vector<T> probs(K);
  for (int k = 0; k < K; ++k) probs[k] = std::exp(z[k] - zmax) / denom;
  return Var<T>::result({1}, {loss}, {logits}, [probs = std::move(probs), label](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    const T g = n.grad[0];
    for (std::size_t k = 0; k < probs.size(); ++k)
      p.grad[k] += g * (probs[k] - (static_cast<int>(k) == label ? T(1) : T(0)));
  });
}

// ---------------------------------------------------------------- elementwise

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same_size(a.size(), b.size(), "add");
  std::vector<T> y = copy_values(a);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b.value()[i];
  return Var<T>::result(a.shape(), std::move(y), {a, b}, [](Node<T>& n) {
    for (int k = 0; k < 2; ++k) {
      Node<T>& p = *n.parents[k];
      if (!p.requires_grad) continue;
      for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += n.grad[i];
    }
  });
}

template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  require_same_size(a.size(), b.size(), "sub");
  std::vector<T> y = copy_values(a);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= b.value()[i];
  return Var<T>::result(a.shape(), std::move(y), {a, b}, [](Node<T>& n) {
    Node<T>& pa = *n.parents[0];
    Node<T>& pb = *n.parents[1];
    if (pa.requires_grad)
      for (std::size_t i = 0; i < n.grad.size(); ++i) pa.grad[i] += n.grad[i];
    if (pb.requires_grad)
      for (std::size_t i = 0; i < n.grad.size(); ++i) pb.grad[i] -= n.grad[i];
  });
}

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same_size(a.size(), b.size(), "mul");
  std::vector<T> y = copy_values(a);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= b.value()[i];
  return Var<T>::result(a.shape(), std::move(y), {a, b}, [](Node<T>& n) {
    Node<T>& pa = *n.parents[0];
    Node<T>& pb = *n.parents[1];
    if (pa.requires_grad)
      for (std::size_t i = 0; i < n.grad.size(); ++i) pa.grad[i] += n.grad[i] * pb.value[i];
    if (pb.requires_grad)
      for (std::size_t i = 0; i < n.grad.size(); ++i) pb.grad[i] += n.grad[i] * pa.value[i];
  });
}

template <class T>
Var<T> scale(const Var<T>& x, T c) {
  std::vector<T> y = copy_values(x);
  for (auto& v : y) v *= c;
  return Var<T>::result(x.shape(), std::move(y), {x}, [c](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += c * n.grad[i];
  });
}

template <class T>
Var<T> scalar_mul(const Var<T>& s, const Var<T>& x) {
  require(s.size() == 1, "scalar_mul: first operand must hold one element");
  const T sv = s.value()[0];
  std::vector<T> y = copy_values(x);
  for (auto& v : y) v *= sv;
  return Var<T>::result(x.shape(), std::move(y), {s, x}, [](Node<T>& n) {
    Node<T>& ps = *n.parents[0];
    Node<T>& px = *n.parents[1];
    if (ps.requires_grad) {
      T acc = 0;
      for (std::size_t i = 0; i < n.grad.size(); ++i) acc += n.grad[i] * px.value[i];
      ps.grad[0] += acc;
    }
    if (px.requires_grad)
      for (std::size_t i = 0; i < n.grad.size(); ++i) px.grad[i] += ps.value[0] * n.grad[i];
  });
}

template <class T>
Var<T> softmax(const Var<T>& x) {
  const auto in = x.value();
  const T mx = *std::max_element(in.begin(), in.end());
  std::vector<T> y(in.size());
  T denom = 0;
  for (std::size_t i = 0; i < y.size(); ++i) denom += (y[i] = std::exp(in[i] - mx));
  for (auto& v : y) v /= denom;
  return Var<T>::result(x.shape(), std::move(y), {x}, [](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    T dot = 0;
    for (std::size_t i = 0; i < n.grad.size(); ++i) dot += n.grad[i] * n.value[i];
    for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += n.value[i] * (n.grad[i] - dot);
  });
}

// ---------------------------------------------------------------- row broadcasts

namespace {
template <class T>
std::pair<int, int> matrix_dims(const Var<T>& h, const Var<T>& o, const char* op) {
  require(h.rank() == 2, std::string(op) + ": expected [N,D] features, got " +
                             shape_string(h.shape()));
  const int N = h.dim(0);
  const int D = h.dim(1);
  require(static_cast<int>(o.size()) == D,
          std::string(op) + ": feature width " + std::to_string(D) + " vs vector width " +
              std::to_string(o.size()));
  return {N, D};
}
}  // namespace

template <class T>
Var<T> add_rows(const Var<T>& h, const Var<T>& o) {
  const auto [N, D] = matrix_dims(h, o, "add_rows");
  std::vector<T> y = copy_values(h);
  for (int i = 0; i < N; ++i)
    for (int d = 0; d < D; ++d) y[static_cast<std::size_t>(i) * D + d] += o.value()[d];
  return Var<T>::result(h.shape(), std::move(y), {h, o}, [N, D](Node<T>& n) {
    Node<T>& ph = *n.parents[0];
    Node<T>& po = *n.parents[1];
    for (int i = 0; i < N; ++i)
      for (int d = 0; d < D; ++d) {
        const T g = n.grad[static_cast<std::size_t>(i) * D + d];
        if (ph.requires_grad) ph.grad[static_cast<std::size_t>(i) * D + d] += g;
        if (po.requires_grad) po.grad[d] += g;
      }
  });
}

template <class T>
Var<T> mul_rows(const Var<T>& h, const Var<T>& o) {
  const auto [N, D] = matrix_dims(h, o, "mul_rows");
  std::vector<T> y = copy_values(h);
  for (int i = 0; i < N; ++i)
    for (int d = 0; d < D; ++d) y[static_cast<std::size_t>(i) * D + d] *= o.value()[d];
  return Var<T>::result(h.shape(), std::move(y), {h, o}, [N, D](Node<T>& n) {
    Node<T>& ph = *n.parents[0];
    Node<T>& po = *n.parents[1];
    for (int i = 0; i < N; ++i)
      for (int d = 0; d < D; ++d) {
        const std::size_t k = static_cast<std::size_t>(i) * D + d;
        if (ph.requires_grad) ph.grad[k] += n.grad[k] * po.value[d];
        if (po.requires_grad) po.grad[d] += n.grad[k] * ph.value[k];
      }
  });
}

template <class T>
Var<T> concat_rows(const Var<T>& h, const Var<T>& o) {
  const auto [N, D] = matrix_dims(h, o, "concat_rows");
  std::vector<T> y(static_cast<std::size_t>(N) * 2 * D);
  for (int i = 0; i < N; ++i)
    for (int d = 0; d < D; ++d) {
      y[static_cast<std::size_t>(i) * 2 * D + d] = h.value()[static_cast<std::size_t>(i) * D + d];
      y[static_cast<std::size_t>(i) * 2 * D + D + d] = o.value()[d];
    }
  return Var<T>::result({N, 2 * D}, std::move(y), {h, o}, [N, D](Node<T>& n) {
    Node<T>& ph = *n.parents[0];
    Node<T>& po = *n.parents[1];
    for (int i = 0; i < N; ++i)
      for (int d = 0; d < D; ++d) {
        if (ph.requires_grad)
          ph.grad[static_cast<std::size_t>(i) * D + d] += n.grad[static_cast<std::size_t>(i) * 2 * D + d];
        if (po.requires_grad) po.grad[d] += n.grad[static_cast<std::size_t>(i) * 2 * D + D + d];
      }
  });
}

template <class T>
Var<T> row_dot(const Var<T>& h, const Var<T>& o) {
  const auto [N, D] = matrix_dims(h, o, "row_dot");
  std::vector<T> y(N, T(0));
  for (int i = 0; i < N; ++i)
    for (int d = 0; d < D; ++d) y[i] += h.value()[static_cast<std::size_t>(i) * D + d] * o.value()[d];
  return Var<T>::result({N}, std::move(y), {h, o}, [N, D](Node<T>& n) {
    Node<T>& ph = *n.parents[0];
    Node<T>& po = *n.parents[1];
    for (int i = 0; i < N; ++i)
      for (int d = 0; d < D; ++d) {
        const std::size_t k = static_cast<std::size_t>(i) * D + d;
        if (ph.requires_grad) ph.grad[k] += n.grad[i] * po.value[d];
        if (po.requires_grad) po.grad[d] += n.grad[i] * ph.value[k];
      }
  });
}

template <class T>
Var<T> weighted_sum(const Var<T>& w, const Var<T>& h) {
  require(h.rank() == 2, "weighted_sum: expected [N,D] features");
  const int N = h.dim(0);
  const int D = h.dim(1);
  require(static_cast<int>(w.size()) == N, "weighted_sum: need one weight per row");
  std::vector<T> y(D, T(0));
  for (int i = 0; i < N; ++i) {
    const T wi = w.value()[i];
    for (int d = 0; d < D; ++d) y[d] += wi * h.value()[static_cast<std::size_t>(i) * D + d];
  }
  return Var<T>::result({1, D}, std::move(y), {w, h}, [N, D](Node<T>& n) {
    Node<T>& pw = *n.parents[0];
    Node<T>& ph = *n.parents[1];
    for (int i = 0; i < N; ++i) {
      T acc = 0;
      for (int d = 0; d < D; ++d) {
        const std::size_t k = static_cast<std::size_t>(i) * D + d;
        acc += n.grad[d] * ph.value[k];
        if (ph.requires_grad) ph.grad[k] += pw.value[i] * n.grad[d];
      }
      if (pw.requires_grad) pw.grad[i] += acc;
    }
  });
}

// ---------------------------------------------------------------- shape ops

template <class T>
Var<T> concat_features(const Var<T>& a, const Var<T>& b) {
  const int B = a.rank() > 1 ? a.dim(0) : 1;
  require((b.rank() > 1 ? b.dim(0) : 1) == B, "concat_features: batch sizes differ");
  const std::size_t na = a.size() / B;
  const std::size_t nb = b.size() / B;
  std::vector<T> y(a.size() + b.size());
  for (int s = 0; s < B; ++s) {
    std::copy_n(a.value().begin() + s * na, na, y.begin() + s * (na + nb));
    std::copy_n(b.value().begin() + s * nb, nb, y.begin() + s * (na + nb) + na);
  }
  return Var<T>::result({B, static_cast<int>(na + nb)}, std::move(y), {a, b},
                        [B, na, nb](Node<T>& n) {
                          Node<T>& pa = *n.parents[0];
                          Node<T>& pb = *n.parents[1];
                          for (int s = 0; s < B; ++s) {
                            const std::size_t base = s * (na + nb);
                            if (pa.requires_grad)
                              for (std::size_t i = 0; i < na; ++i) pa.grad[s * na + i] += n.grad[base + i];
                            if (pb.requires_grad)
                              for (std::size_t i = 0; i < nb; ++i) pb.grad[s * nb + i] += n.grad[base + na + i];
                          }
                        });
}

template <class T>
Var<T> reshape(const Var<T>& x, Shape shape) {
  require(numel(shape) == x.size(), "reshape: " + shape_string(x.shape()) + " -> " +
                                        shape_string(shape) + " changes the element count");
  return Var<T>::result(std::move(shape), copy_values(x), {x}, [](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += n.grad[i];
  });
}

template <class T>
Var<T> sum(const Var<T>& x) {
  T acc = 0;
  for (T v : x.value()) acc += v;
  return Var<T>::result({1}, {acc}, {x}, [](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    for (auto& g : p.grad) g += n.grad[0];
  });
}

#define FFTMIL_INSTANTIATE_OPS(T)                                                     \
  template Var<T> conv2d(const Var<T>&, const Var<T>&, const Var<T>&);                \
  template Var<T> relu(const Var<T>&);                                                \
  template Var<T> leaky_relu(const Var<T>&, T);                                       \
  template Var<T> activate(const Var<T>&, Activation);                                \
  template Var<T> maxpool2x2(const Var<T>&);                                          \
  template Var<T> normalize(const Var<T>&, NormMode);                                 \
  template BatchNorm<T> make_batchnorm(ParameterSet<T>&, const std::string&, int);    \
  template Var<T> batchnorm(const Var<T>&, BatchNorm<T>&, bool);                      \
  template Var<T> linear(const Var<T>&, const Var<T>&, const Var<T>&);                \
  template Var<T> cross_entropy(const Var<T>&, int);                                  \
  template Var<T> add(const Var<T>&, const Var<T>&);                                  \
  template Var<T> sub(const Var<T>&, const Var<T>&);                                  \
  template Var<T> mul(const Var<T>&, const Var<T>&);                                  \
  template Var<T> scale(const Var<T>&, T);                                            \
  template Var<T> scalar_mul(const Var<T>&, const Var<T>&);                           \
  template Var<T> tanh(const Var<T>&);                                                \
  template Var<T> sigmoid(const Var<T>&);                                             \
  template Var<T> softmax(const Var<T>&);                                             \
  template Var<T> add_rows(const Var<T>&, const Var<T>&);                             \
  template Var<T> mul_rows(const Var<T>&, const Var<T>&);                             \
  template Var<T> concat_rows(const Var<T>&, const Var<T>&);                          \
  template Var<T> row_dot(const Var<T>&, const Var<T>&);                              \
  template Var<T> weighted_sum(const Var<T>&, const Var<T>&);                         \
  template Var<T> concat_features(const Var<T>&, const Var<T>&);                      \
  template Var<T> reshape(const Var<T>&, Shape);                                      \
  template Var<T> sum(const Var<T>&);

FFTMIL_INSTANTIATE_OPS(float)
FFTMIL_INSTANTIATE_OPS(double)

}  // namespace fftmil::ad
