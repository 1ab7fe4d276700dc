#include "fftmil/autodiff/complex_ops.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "fftmil/error.hpp"
#include "fftmil/spectral/fft.hpp"

namespace fftmil::ad {

template <class T>
std::vector<T> init_uniform(std::size_t n, int fan_in, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const T bound = std::sqrt(T(6) / static_cast<T>(std::max(fan_in, 1)));
  std::uniform_real_distribution<T> dist(-bound, bound);
  std::vector<T> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

template <class T>
ComplexConv<T> make_complex_conv(ParameterSet<T>& params, const std::string& name, int in_ch,
                                 int out_ch, std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(out_ch) * in_ch * 9;
  // Each of the two weight halves sees twice the fan-in of a real conv.
  const int fan_in = 2 * in_ch * 9;
  ComplexConv<T> c;
  c.wr = params.add(name + ".wr", {out_ch, in_ch, 3, 3}, init_uniform<T>(n, fan_in, seed));
  c.wi = params.add(name + ".wi", {out_ch, in_ch, 3, 3}, init_uniform<T>(n, fan_in, seed + 1));
  c.br = params.add_zeros(name + ".br", {out_ch});
  c.bi = params.add_zeros(name + ".bi", {out_ch});
  return c;
}

template <class T>
ComplexVar<T> complex_conv2d(const ComplexVar<T>& x, const ComplexConv<T>& c) {
  if (x.re.shape() != x.im.shape())
    throw InvalidArgument("complex_conv2d: real " + shape_string(x.re.shape()) +
                          " and imaginary " + shape_string(x.im.shape()) + " parts differ");
  const Var<T> none;
  Var<T> re = sub(conv2d(x.re, c.wr, c.br), conv2d(x.im, c.wi, none));
  Var<T> im = add(conv2d(x.re, c.wi, c.bi), conv2d(x.im, c.wr, none));
  return {re, im};
}

namespace {

// Picks half `k` (0 = real, 1 = imaginary) out of a [2, ...] stacked node.
template <class T>
Var<T> take_half(const Var<T>& stacked, int k, Shape shape) {
  const std::size_t n = stacked.size() / 2;
  const auto src = stacked.value().subspan(k * n, n);
  return Var<T>::result(std::move(shape), std::vector<T>(src.begin(), src.end()), {stacked},
                        [k, n](Node<T>& node) {
                          Node<T>& p = *node.parents[0];
                          for (std::size_t i = 0; i < n; ++i) p.grad[k * n + i] += node.grad[i];
                        });
}

}  // namespace

template <class T>
ComplexVar<T> fft2(const ComplexVar<T>& x, bool inverse) {
  if (x.re.rank() != 4 || x.re.shape() != x.im.shape())
    throw InvalidArgument("fft2: expected matching [B,C,H,W] parts, got " +
                          shape_string(x.re.shape()) + " and " + shape_string(x.im.shape()));
  const int H = x.re.dim(2);
  const int W = x.re.dim(3);
  const int planes = x.re.dim(0) * x.re.dim(1);
  const std::size_t n = x.re.size();
  const T inv_n = T(1) / static_cast<T>(static_cast<std::size_t>(H) * W);

  std::vector<std::complex<T>> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = {x.re.value()[i], x.im.value()[i]};
  spectral::fft2d_planes<T>(z, planes, H, W, inverse);
  std::vector<T> out(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::complex<T> v = inverse ? z[i] * inv_n : z[i];
    out[i] = v.real();
    out[n + i] = v.imag();
  }

  Shape stacked_shape = x.re.shape();
  stacked_shape.insert(stacked_shape.begin(), 2);
  // The adjoint of the unnormalized DFT is the unnormalized inverse DFT; the
  // adjoint of the normalized inverse is the forward DFT over HW.
  Var<T> stacked = Var<T>::result(
      stacked_shape, std::move(out), {x.re, x.im},
      [n, planes, H, W, inverse, inv_n](Node<T>& node) {
        std::vector<std::complex<T>> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = {node.grad[i], node.grad[n + i]};
        spectral::fft2d_planes<T>(g, planes, H, W, !inverse);
        Node<T>& pr = *node.parents[0];
        Node<T>& pi = *node.parents[1];
        const T s = inverse ? inv_n : T(1);
        if (pr.requires_grad)
          for (std::size_t i = 0; i < n; ++i) pr.grad[i] += s * g[i].real();
        if (pi.requires_grad)
          for (std::size_t i = 0; i < n; ++i) pi.grad[i] += s * g[i].imag();
      });
  return {take_half(stacked, 0, x.re.shape()), take_half(stacked, 1, x.re.shape())};
}

template <class T>
ComplexVar<T> complex_activate(const ComplexVar<T>& x, Activation a) {
  return {activate(x.re, a), activate(x.im, a)};
}

template <class T>
ComplexVar<T> complex_maxpool2x2(const ComplexVar<T>& x) {
  return {maxpool2x2(x.re), maxpool2x2(x.im)};
}

template <class T>
ComplexBatchNorm<T> make_complex_batchnorm(ParameterSet<T>& params, const std::string& name,
                                           int channels) {
  return {make_batchnorm(params, name + ".re", channels),
          make_batchnorm(params, name + ".im", channels)};
}

template <class T>
ComplexVar<T> complex_batchnorm(const ComplexVar<T>& x, ComplexBatchNorm<T>& bn, bool training) {
  return {batchnorm(x.re, bn.re, training), batchnorm(x.im, bn.im, training)};
}

#define FFTMIL_INSTANTIATE_COMPLEX(T)                                                         \
  template std::vector<T> init_uniform<T>(std::size_t, int, std::uint64_t);                   \
  template ComplexConv<T> make_complex_conv(ParameterSet<T>&, const std::string&, int, int,   \
                                            std::uint64_t);                                    \
  template ComplexVar<T> complex_conv2d(const ComplexVar<T>&, const ComplexConv<T>&);         \
  template ComplexVar<T> fft2(const ComplexVar<T>&, bool);                                    \
  template ComplexVar<T> complex_activate(const ComplexVar<T>&, Activation);                  \
  template ComplexVar<T> complex_maxpool2x2(const ComplexVar<T>&);                            \
  template ComplexBatchNorm<T> make_complex_batchnorm(ParameterSet<T>&, const std::string&,   \
                                                      int);                                    \
  template ComplexVar<T> complex_batchnorm(const ComplexVar<T>&, ComplexBatchNorm<T>&, bool);

FFTMIL_INSTANTIATE_COMPLEX(float)
FFTMIL_INSTANTIATE_COMPLEX(double)

}  // namespace fftmil::ad
