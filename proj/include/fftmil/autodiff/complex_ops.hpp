#pragma once

#include <cstdint>
#include <string>

#include "fftmil/autodiff/ops.hpp"

namespace fftmil::ad {

/// Pair of same-shape real tensors holding the real and imaginary parts.
template <class T>
struct ComplexVar {
  Var<T> re;
  Var<T> im;

  const Shape& shape() const { return re.shape(); }
  static ComplexVar from_real(const Var<T>& x) { return {x, Var<T>::zeros(x.shape())}; }
};

/// Weights of a complex 3x3 convolution.
template <class T>
struct ComplexConv {
  Var<T> wr, wi;  // [Co,Ci,3,3]
  Var<T> br, bi;  // [Co]
};

/// Registers "<name>.wr", ".wi", ".br", ".bi".
template <class T>
ComplexConv<T> make_complex_conv(ParameterSet<T>& params, const std::string& name, int in_ch,
                                 int out_ch, std::uint64_t seed);

/// (xr + i xi) * (wr + i wi) accumulated over the 3x3 window and input channels.
template <class T>
ComplexVar<T> complex_conv2d(const ComplexVar<T>& x, const ComplexConv<T>& c);

/// 2D DFT over the last two dims of [B,C,H,W]. Forward is unnormalized; the
/// inverse carries 1/(HW).
template <class T>
ComplexVar<T> fft2(const ComplexVar<T>& x, bool inverse);

template <class T>
ComplexVar<T> complex_activate(const ComplexVar<T>& x, Activation a);
template <class T>
ComplexVar<T> complex_maxpool2x2(const ComplexVar<T>& x);

template <class T>
struct ComplexBatchNorm {
  BatchNorm<T> re, im;
};
template <class T>
ComplexBatchNorm<T> make_complex_batchnorm(ParameterSet<T>& params, const std::string& name,
                                           int channels);
template <class T>
ComplexVar<T> complex_batchnorm(const ComplexVar<T>& x, ComplexBatchNorm<T>& bn, bool training);

/// He-style uniform init for a conv or linear weight. Same seed, same values.
template <class T>
std::vector<T> init_uniform(std::size_t n, int fan_in, std::uint64_t seed);

}  // namespace fftmil::ad
