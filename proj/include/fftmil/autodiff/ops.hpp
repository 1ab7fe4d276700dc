#pragma once

#include <string_view>
#include <vector>

#include "fftmil/autodiff/var.hpp"

namespace fftmil::ad {

// Layer menu of the frequency branch and the MIL head. Image tensors are
// NCHW; matrices are [rows, cols]. Every op returns a fresh node whose
// backward closure writes exact gradients into its parents.

/// 3x3, stride 1, zero padding 1. x [B,Ci,H,W], w [Co,Ci,3,3], b [Co] or undefined.
template <class T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b);

enum class Activation { none, relu, leaky_relu };
inline constexpr double kLeakySlope = 0.01;

template <class T>
Var<T> relu(const Var<T>& x);
template <class T>
Var<T> leaky_relu(const Var<T>& x, T slope = T(kLeakySlope));
template <class T>
Var<T> activate(const Var<T>& x, Activation a);

/// Non-overlapping 2x2 max over [B,C,H,W]; H and W must be even. Ties send
/// the gradient to the lowest row-major index of the window.
template <class T>
Var<T> maxpool2x2(const Var<T>& x);

enum class NormMode { minmax, zscore, l2, none };
NormMode parse_norm_mode(std::string_view name);
const char* to_string(NormMode m);

/// Per-sample normalization over all elements of each leading-dim slice.
///   minmax: (x - min) / (max - min), all zeros when max == min
///   zscore: (x - mean) / (std + 1e-8)
///   l2:     x / (||x|| + 1e-8)
/// Min and max are differentiated as selections (first occurrence on ties).
template <class T>
Var<T> normalize(const Var<T>& x, NormMode mode);

/// Per-channel batch norm with learnable scale/shift and running statistics.
template <class T>
struct BatchNorm {
  Var<T> gamma;
  Var<T> beta;
  std::vector<T> running_mean;
  std::vector<T> running_var;
  T momentum = T(0.9);
  T eps = T(1e-5);
};

/// Creates "<name>.gamma" (ones) and "<name>.beta" (zeros) in `params`.
template <class T>
BatchNorm<T> make_batchnorm(ParameterSet<T>& params, const std::string& name, int channels);

/// x [B,C,H,W] or [B,C]. Training mode normalizes with batch statistics over
/// (B,H,W) and folds them into the running averages; evaluation uses the
/// running averages.
template <class T>
Var<T> batchnorm(const Var<T>& x, BatchNorm<T>& bn, bool training);

/// y [R,O] = x [R,I] w[O,I]^T + b[O]. A 1-D x is treated as one row.
template <class T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b);

/// Softmax cross-entropy of a single logit vector against a class index.
template <class T>
Var<T> cross_entropy(const Var<T>& logits, int label);

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b);
template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b);
template <class T>
Var<T> scale(const Var<T>& x, T c);
/// s has one element.
template <class T>
Var<T> scalar_mul(const Var<T>& s, const Var<T>& x);

template <class T>
Var<T> tanh(const Var<T>& x);
template <class T>
Var<T> sigmoid(const Var<T>& x);

/// Softmax over all elements.
template <class T>
Var<T> softmax(const Var<T>& x);

/// Broadcasts the D-vector `o` across the rows of h [N,D].
template <class T>
Var<T> add_rows(const Var<T>& h, const Var<T>& o);
template <class T>
Var<T> mul_rows(const Var<T>& h, const Var<T>& o);
/// [h_i | o] for each row: [N,2D].
template <class T>
Var<T> concat_rows(const Var<T>& h, const Var<T>& o);
/// out_i = h_i . o, shape [N].
template <class T>
Var<T> row_dot(const Var<T>& h, const Var<T>& o);
/// sum_i w_i h_i, shape [1,D].
template <class T>
Var<T> weighted_sum(const Var<T>& w, const Var<T>& h);

/// Per-sample flatten of both inputs and concatenation: [B, n_a + n_b].
template <class T>
Var<T> concat_features(const Var<T>& a, const Var<T>& b);

template <class T>
Var<T> reshape(const Var<T>& x, Shape shape);
template <class T>
Var<T> sum(const Var<T>& x);

}  // namespace fftmil::ad
