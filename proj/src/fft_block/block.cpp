#include "fftmil/fft_block/block.hpp"

#include "fftmil/error.hpp"

namespace fftmil::fft_block {

using ad::Var;

namespace {

template <class T>
Var<T> flatten(const Var<T>& x) {
  const int b = x.dim(0);
  return ad::reshape(x, {b, static_cast<int>(x.size() / b)});
}

}  // namespace

template <class T>
FFTBlock<T>::FFTBlock(const FFTBlockConfig& cfg, ad::ParameterSet<T>& params, const std::string& prefix)
    : cfg_(cfg), prefix_(prefix) {
  validate(cfg_);
  channels_ = channel_schedule(cfg_);
  const Design d = cfg_.design;
  const bool vanilla = d <= Design::D;
  const bool real_layers = d == Design::E;
  std::uint64_t seed = cfg_.seed * 1000003ULL + 17;

  int in = cfg_.input_channels;
  for (int l = 0; l < cfg_.cnn_layers; ++l) {
    const int out = channels_[l];
    const std::string name = prefix + ".conv" + std::to_string(l);
    if (real_layers) {
      conv_w_.push_back(params.add(name + ".w", {out, in, 3, 3},
                                   ad::init_uniform<T>(static_cast<std::size_t>(out) * in * 9, in * 9, seed++)));
      conv_b_.push_back(params.add_zeros(name + ".b", {out}));
      if (cfg_.spatial_cnn)
        bn_.push_back(ad::make_batchnorm(params, prefix + ".bn" + std::to_string(l), out));
    } else {
      cconv_.push_back(ad::make_complex_conv(params, name, in, out, seed));
      seed += 2;
      if (vanilla) bn_.push_back(ad::make_batchnorm(params, prefix + ".bn" + std::to_string(l), out));
      if (d == Design::D || d == Design::H)
        cbn_.push_back(ad::make_complex_batchnorm(params, prefix + ".fbn" + std::to_string(l), out));
    }
    in = out;
  }
  if (d == Design::I) bn_out_.push_back(ad::make_batchnorm(params, prefix + ".bn_out", in));

  const int side = final_side(cfg_);
  int flat = in * side * side;
  if (d == Design::F) flat *= 2;  // real and imaginary parts side by side
  const int hidden = cfg_.resolved_mlp_hidden();
  w1_ = params.add(prefix + ".mlp0.w", {hidden, flat},
                   ad::init_uniform<T>(static_cast<std::size_t>(hidden) * flat, flat, seed++));
  b1_ = params.add_zeros(prefix + ".mlp0.b", {hidden});
  w2_ = params.add(prefix + ".mlp1.w", {cfg_.output_dim, hidden},
                   ad::init_uniform<T>(static_cast<std::size_t>(cfg_.output_dim) * hidden, hidden, seed++));
  b2_ = params.add_zeros(prefix + ".mlp1.b", {cfg_.output_dim});
}

template <class T>
std::vector<std::pair<std::string, ad::BatchNorm<T>*>> FFTBlock<T>::batchnorms() {
  std::vector<std::pair<std::string, ad::BatchNorm<T>*>> out;
  for (std::size_t l = 0; l < bn_.size(); ++l) out.push_back({prefix_ + ".bn" + std::to_string(l), &bn_[l]});
  for (std::size_t l = 0; l < cbn_.size(); ++l) {
    out.push_back({prefix_ + ".fbn" + std::to_string(l) + ".re", &cbn_[l].re});
    out.push_back({prefix_ + ".fbn" + std::to_string(l) + ".im", &cbn_[l].im});
  }
  for (auto& b : bn_out_) out.push_back({prefix_ + ".bn_out", &b});
  return out;
}

template <class T>
Var<T> FFTBlock<T>::mlp(const Var<T>& features) {
  return ad::linear(ad::relu(ad::linear(features, w1_, b1_)), w2_, b2_);
}

template <class T>
Var<T> FFTBlock<T>::forward(const BlockInput<T>& in, bool training) {
  const int side = cfg_.crop_size;
  auto check = [&](const Var<T>& x, const char* what) {
    if (!x.defined()) throw InvalidArgument(std::string("fft block ") + to_string(cfg_.design) + ": missing " + what + " input");
    if (x.rank() != 4 || x.dim(1) != cfg_.input_channels || x.dim(2) != side || x.dim(3) != side)
      throw InvalidArgument("fft block: expected [B," + std::to_string(cfg_.input_channels) + "," +
                            std::to_string(side) + "," + std::to_string(side) + "] " + what + " input, got " +
                            ad::shape_string(x.shape()));
  };
  if (!uses_complex_input(cfg_.design)) {
    check(in.packed, "packed");
    return forward_real(in.packed, training);
  }
  check(in.spectrum.re, "complex");
  if (!in.spectrum.im.defined() || in.spectrum.im.shape() != in.spectrum.re.shape())
    throw InvalidArgument("fft block: imaginary part missing or mis-shaped");
  if (cfg_.design <= Design::D) return forward_vanilla(in.spectrum, training);
  return forward_complex(in.spectrum, training);
}

template <class T>
Var<T> FFTBlock<T>::forward_real(const Var<T>& x0, bool training) {
  Var<T> x = x0;
  for (int l = 0; l < cfg_.cnn_layers; ++l) {
    x = ad::conv2d(x, conv_w_[l], conv_b_[l]);
    if (cfg_.spatial_cnn) x = ad::batchnorm(x, bn_[l], training);
    x = ad::maxpool2x2(ad::relu(x));
  }
  const ad::NormMode norm = cfg_.spatial_cnn ? ad::NormMode::none : cfg_.norm;
  return mlp(ad::normalize(flatten(x), norm));
}

template <class T>
Var<T> FFTBlock<T>::forward_vanilla(const ad::ComplexVar<T>& x0, bool training) {
  const Design d = cfg_.design;
  const ad::Activation freq_act =
      d == Design::A ? ad::Activation::none : d == Design::C ? ad::Activation::leaky_relu : ad::Activation::relu;
  ad::ComplexVar<T> z = x0;
  Var<T> s;
  for (int l = 0; l < cfg_.cnn_layers; ++l) {
    z = ad::complex_conv2d(z, cconv_[l]);
    if (d == Design::D) z = ad::complex_batchnorm(z, cbn_[l], training);
    z = ad::complex_activate(z, freq_act);
    s = ad::fft2(z, true).re;
    s = ad::batchnorm(s, bn_[l], training);
    if (d == Design::A) s = ad::relu(s);
    s = ad::maxpool2x2(s);
    if (l + 1 < cfg_.cnn_layers) z = ad::fft2(ad::ComplexVar<T>::from_real(s), false);
  }
  return mlp(flatten(s));
}

template <class T>
Var<T> FFTBlock<T>::forward_complex(const ad::ComplexVar<T>& x0, bool training) {
  const Design d = cfg_.design;
  ad::ComplexVar<T> z = x0;
  for (int l = 0; l < cfg_.cnn_layers; ++l) {
    z = ad::complex_conv2d(z, cconv_[l]);
    if (d == Design::H) z = ad::complex_batchnorm(z, cbn_[l], training);
    z = ad::complex_maxpool2x2(ad::complex_activate(z, ad::Activation::relu));
  }
  if (d == Design::F) return mlp(ad::normalize(ad::concat_features(flatten(z.re), flatten(z.im)), cfg_.norm));
  Var<T> s = ad::fft2(z, true).re;
  if (d == Design::I) s = ad::batchnorm(s, bn_out_[0], training);
  return mlp(flatten(s));
}

template <class T>
FFTBlock<T> build_design_variant(Design tag, FFTBlockConfig base, ad::ParameterSet<T>& params,
                                 const std::string& prefix) {
  base.design = tag;
  return FFTBlock<T>(base, params, prefix);
}

template class FFTBlock<float>;
template class FFTBlock<double>;
template FFTBlock<float> build_design_variant(Design, FFTBlockConfig, ad::ParameterSet<float>&, const std::string&);
template FFTBlock<double> build_design_variant(Design, FFTBlockConfig, ad::ParameterSet<double>&, const std::string&);

}  // namespace fftmil::fft_block
