// Acceptance checks, one PASS/FAIL line each, also written to
// acceptance_results.txt in the working directory. Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fftmil/autodiff/complex_ops.hpp"
#include "fftmil/autodiff/grad_check.hpp"
#include "fftmil/data/dataset.hpp"
#include "fftmil/fft_block/block.hpp"
#include "fftmil/harness/energy_study.hpp"
#include "fftmil/harness/metrics.hpp"
#include "fftmil/harness/outputs.hpp"
#include "fftmil/harness/pipeline.hpp"
#include "fftmil/harness/train.hpp"
#include "fftmil/mil/model.hpp"
#include "fftmil/spectral/transforms.hpp"
#include "metrics_oracle.hpp"

using namespace fftmil;
using V = ad::Var<double>;
using CV = ad::ComplexVar<double>;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char b[64];
  std::snprintf(b, sizeof b, f, v);
  return b;
}

std::vector<double> uniform(std::size_t n, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

spectral::SpatialImage random_image(int c, int h, int w, std::mt19937_64& rng) {
  return spectral::SpatialImage(c, h, w, uniform(static_cast<std::size_t>(c) * h * w, rng, 0, 1));
}

spectral::SpatialImage dead_leaves(int side, std::uint64_t seed, std::uint64_t index) {
  data::SyntheticConfig sc;
  sc.image_side = side;
  auto rng = data::image_rng(seed, index);
  return data::generate_dead_leaves(sc, rng);
}

// ---------------------------------------------------------------- 1

Outcome transforms() {
  std::mt19937_64 rng(1);
  double round_trip = 0, parseval = 0, shift = 0, herm = 0;
  const std::vector<std::array<int, 3>> shapes{{3, 256, 256}, {1, 64, 128}, {2, 32, 32}, {3, 128, 128}};
  for (auto [c, h, w] : shapes) {
    const auto img = random_image(c, h, w, rng);
    const auto X = spectral::fft2d(img);
    const auto back = spectral::ifft2d(X);
    for (std::size_t i = 0; i < img.size(); ++i) round_trip = std::max(round_trip, std::abs(back.data()[i] - img.data()[i]));

    double ex = 0, eX = 0;
    for (double v : img.data()) ex += v * v;
    for (const auto& z : X.data) eX += std::norm(z);
    parseval = std::max(parseval, std::abs(eX / (double(h) * w) - ex) / ex);

    // multiplying by (-1)^(x+y) before the transform centers the spectrum
    auto signed_img = img;
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if ((x + y) % 2) signed_img.at(ch, y, x) = -signed_img.at(ch, y, x);
    const auto centered = spectral::fftshift(X, spectral::ShiftDirection::forward);
    const auto trick = spectral::fft2d(signed_img);
    for (std::size_t i = 0; i < X.data.size(); ++i) shift = std::max(shift, std::abs(centered.data[i] - trick.data[i]));

    for (int ch = 0; ch < c; ++ch)
      for (int u = 0; u < h; ++u)
        for (int v = 0; v < w; ++v)
          herm = std::max(herm, std::abs(X.at(ch, u, v) - std::conj(X.at(ch, (h - u) % h, (w - v) % w))));
  }
  Outcome o;
  o.pass = round_trip < 1e-10 && parseval < 1e-10 && shift < 1e-9 && herm < 1e-10;
  o.detail = "round trip " + fmt("%.2e", round_trip) + ", Parseval " + fmt("%.2e", parseval) + ", shift trick " +
             fmt("%.2e", shift) + ", Hermitian " + fmt("%.2e", herm);
  return o;
}

// ---------------------------------------------------------------- 2

struct GradSuite {
  std::mt19937_64 rng{2};
  double worst = 0;
  std::string worst_name;
  int checks = 0;

  V leaf(ad::Shape s, double lo = -1, double hi = 1) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return V::leaf(s, uniform(n, rng, lo, hi), true);
  }
  // Values bounded away from zero, so no ReLU kink sits within the step.
  V off_zero(ad::Shape s) {
    V v = leaf(s);
    for (auto& x : v.mutable_value()) x = x < 0 ? x - 0.05 : x + 0.05;
    return v;
  }
  V weights_like(const V& out) {
    std::size_t n = out.size();
    return V::constant(out.shape(), uniform(n, rng));
  }
  V project(const V& out, const V& w) { return ad::sum(ad::mul(out, w)); }
  V project(const CV& out, const V& wr, const V& wi) { return ad::add(project(out.re, wr), project(out.im, wi)); }

  void run(const std::string& name, const std::function<V()>& loss, const std::vector<V>& inputs,
           std::size_t max_coords = 0, double step = 1e-5) {
    ad::GradCheckOptions opt;
    opt.max_coords = max_coords;
    opt.step = step;
    opt.floor = 1e-6;
    const auto r = ad::grad_check(loss, inputs, opt);
    ++checks;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_name = name + " (" + r.worst + ")";
    }
  }

  void real_unary(const std::string& name, const std::function<V(const V&)>& f, V x) {
    const V w = weights_like(f(x));
    run(name, [&] { return project(f(x), w); }, {x});
  }
};

void block_check(GradSuite& g, fft_block::Design d) {
  fft_block::FFTBlockConfig cfg;
  cfg.design = d;
  cfg.cnn_layers = 3;
  cfg.max_channels = 8;
  cfg.input_channels = fft_block::uses_complex_input(d) ? 3 : 6;
  cfg.crop_size = 16;
  cfg.output_dim = 12;
  cfg.mlp_hidden = 16;
  cfg.seed = 7;
  ad::ParameterSet<double> ps;
  fft_block::FFTBlock<double> block(cfg, ps);
  const ad::Shape s{1, cfg.input_channels, 16, 16};
  fft_block::BlockInput<double> in;
  std::vector<V> inputs;
  for (auto& p : ps.items()) inputs.push_back(p.var);
  if (fft_block::uses_complex_input(d)) {
    in.spectrum = {g.leaf(s), g.leaf(s)};
    inputs.push_back(in.spectrum.re);
    inputs.push_back(in.spectrum.im);
  } else {
    in.packed = g.leaf(s, 0, 2);
    inputs.push_back(in.packed);
  }
  const V w = V::constant({1, 12}, uniform(12, g.rng));
  g.run(std::string("block ") + fft_block::to_string(d), [&] { return g.project(block.forward(in, true), w); },
        inputs, 60, 1e-4);  // larger step: round-off at 1e-5 is ~1e-10 on the block's zero-gradient biases
}

Outcome gradients() {
  GradSuite g;
  {
    V x = g.leaf({2, 3, 6, 5}), w = g.leaf({4, 3, 3, 3}), b = g.leaf({4});
    const V p = g.weights_like(ad::conv2d(x, w, b));
    g.run("conv2d", [&] { return g.project(ad::conv2d(x, w, b), p); }, {x, w, b});
  }
  g.real_unary("relu", [](const V& x) { return ad::relu(x); }, g.off_zero({3, 7}));
  g.real_unary("leaky_relu", [](const V& x) { return ad::leaky_relu(x); }, g.off_zero({3, 7}));
  g.real_unary("tanh", [](const V& x) { return ad::tanh(x); }, g.leaf({3, 7}));
  g.real_unary("sigmoid", [](const V& x) { return ad::sigmoid(x); }, g.leaf({3, 7}));
  g.real_unary("softmax", [](const V& x) { return ad::softmax(x); }, g.leaf({9}));
  g.real_unary("maxpool2x2", [](const V& x) { return ad::maxpool2x2(x); }, g.leaf({2, 2, 6, 8}));
  for (auto m : {ad::NormMode::minmax, ad::NormMode::zscore, ad::NormMode::l2, ad::NormMode::none})
    g.real_unary(std::string("normalize ") + ad::to_string(m), [m](const V& x) { return ad::normalize(x, m); },
                 g.leaf({1, 4, 5, 5}));
  g.real_unary("scale", [](const V& x) { return ad::scale(x, 2.5); }, g.leaf({4}));
  g.real_unary("reshape", [](const V& x) { return ad::reshape(x, {6, 2}); }, g.leaf({3, 4}));
  {
    ad::ParameterSet<double> ps;
    auto bn = ad::make_batchnorm(ps, "bn", 3);
    for (auto& v : bn.gamma.mutable_value()) v = 1.3;
    V x = g.leaf({4, 3, 3, 3});
    const V p = g.weights_like(x);
    g.run("batchnorm", [&] { return g.project(ad::batchnorm(x, bn, true), p); }, {x, bn.gamma, bn.beta});
  }
  {
    V x = g.leaf({3, 5}), w = g.leaf({4, 5}), b = g.leaf({4});
    const V p = g.weights_like(ad::linear(x, w, b));
    g.run("linear", [&] { return g.project(ad::linear(x, w, b), p); }, {x, w, b});
  }
  {
    V z = g.leaf({1, 4});
    g.run("cross_entropy", [&] { return ad::cross_entropy(z, 2); }, {z});
  }
  {
    V a = g.leaf({3, 4}), b = g.leaf({3, 4});
    const V p = g.weights_like(a);
    g.run("add", [&] { return g.project(ad::add(a, b), p); }, {a, b});
    g.run("sub", [&] { return g.project(ad::sub(a, b), p); }, {a, b});
    g.run("mul", [&] { return g.project(ad::mul(a, b), p); }, {a, b});
    V s = g.leaf({1});
    g.run("scalar_mul", [&] { return g.project(ad::scalar_mul(s, a), p); }, {s, a});
  }
  {
    V h = g.leaf({5, 4}), o = g.leaf({4}), w = g.leaf({5});
    const V p = g.weights_like(h);
    g.run("add_rows", [&] { return g.project(ad::add_rows(h, o), p); }, {h, o});
    g.run("mul_rows", [&] { return g.project(ad::mul_rows(h, o), p); }, {h, o});
    const V p2 = g.weights_like(ad::concat_rows(h, o));
    g.run("concat_rows", [&] { return g.project(ad::concat_rows(h, o), p2); }, {h, o});
    const V p3 = g.weights_like(ad::row_dot(h, o));
    g.run("row_dot", [&] { return g.project(ad::row_dot(h, o), p3); }, {h, o});
    const V p4 = g.weights_like(ad::weighted_sum(w, h));
    g.run("weighted_sum", [&] { return g.project(ad::weighted_sum(w, h), p4); }, {w, h});
    V f2 = g.leaf({1, 3});
    V f1 = g.leaf({1, 4});
    const V p5 = g.weights_like(ad::concat_features(f1, f2));
    g.run("concat_features", [&] { return g.project(ad::concat_features(f1, f2), p5); }, {f1, f2});
  }
  {
    ad::ParameterSet<double> ps;
    auto c = ad::make_complex_conv(ps, "cc", 2, 3, 5);
    CV x{g.leaf({1, 2, 5, 6}), g.leaf({1, 2, 5, 6})};
    const auto out = ad::complex_conv2d(x, c);
    const V wr = g.weights_like(out.re), wi = g.weights_like(out.im);
    g.run("complex_conv2d", [&] { return g.project(ad::complex_conv2d(x, c), wr, wi); },
          {x.re, x.im, c.wr, c.wi, c.br, c.bi});
  }
  for (bool inverse : {false, true}) {
    CV x{g.leaf({1, 2, 4, 6}), g.leaf({1, 2, 4, 6})};
    const V wr = g.weights_like(x.re), wi = g.weights_like(x.im);
    g.run(inverse ? "ifft2" : "fft2", [&] { return g.project(ad::fft2(x, inverse), wr, wi); }, {x.re, x.im});
  }
  {
    CV x{g.off_zero({1, 2, 4, 4}), g.off_zero({1, 2, 4, 4})};
    const V wr = g.weights_like(x.re), wi = g.weights_like(x.im);
    g.run("complex relu", [&] { return g.project(ad::complex_activate(x, ad::Activation::relu), wr, wi); },
          {x.re, x.im});
    const auto pooled = ad::complex_maxpool2x2(x);
    const V pr = g.weights_like(pooled.re), pi = g.weights_like(pooled.im);
    g.run("complex maxpool", [&] { return g.project(ad::complex_maxpool2x2(x), pr, pi); }, {x.re, x.im});
  }
  {
    ad::ParameterSet<double> ps;
    auto bn = ad::make_complex_batchnorm(ps, "cbn", 2);
    CV x{g.leaf({3, 2, 3, 3}), g.leaf({3, 2, 3, 3})};
    const V wr = g.weights_like(x.re), wi = g.weights_like(x.im);
    g.run("complex batchnorm", [&] { return g.project(ad::complex_batchnorm(x, bn, true), wr, wi); },
          {x.re, x.im, bn.re.gamma, bn.re.beta, bn.im.gamma, bn.im.beta});
  }
  {
    ad::ParameterSet<double> ps;
    const auto a = mil::make_attention(ps, "a", 6, 5, 9);
    V h = g.leaf({7, 6});
    const V p = V::constant({1, 6}, uniform(6, g.rng));
    std::vector<V> in{h};
    for (auto& q : ps.items()) in.push_back(q.var);
    g.run("gated attention pooling",
          [&] { return g.project(mil::attention_pool(h, mil::attention_scores(h, a)), p); }, in);
    for (auto f : mil::all_fusions()) {
      ad::ParameterSet<double> fps;
      auto fp = mil::make_fusion(fps, f, 6);
      if (f == mil::Fusion::cross_attention) fp.g2.mutable_value()[0] = 0.7;
      V o = g.leaf({1, 6});
      std::vector<V> fin{h, o};
      for (auto& q : fps.items()) fin.push_back(q.var);
      g.run(std::string("fusion ") + mil::to_string(f),
            [&] { return g.project(mil::fuse(h, o, mil::attention_scores(h, a), f, fp).pooled, p); }, fin);
    }
  }
  block_check(g, fft_block::Design::E);
  block_check(g, fft_block::Design::A);

  Outcome o;
  o.pass = g.worst < 1e-4;
  o.detail = std::to_string(g.checks) + " checks, worst rel err " + fmt("%.2e", g.worst) + " at " + g.worst_name;
  return o;
}

// ---------------------------------------------------------------- 3

Outcome normalization() {
  std::mt19937_64 rng(3);
  bool in_range = true, degenerate = true, order = true;
  double scale_err = 0;
  for (int t = 0; t < 50; ++t) {
    const ad::Shape s{1, 6, 16, 16};
    const auto raw = uniform(6 * 16 * 16, rng, -50, 400);
    const V x = V::constant(s, raw);
    const V y = ad::normalize(x, ad::NormMode::minmax);
    const auto yv = y.value();
    for (double v : yv) in_range = in_range && v >= 0 && v <= 1;
    const auto amax = std::max_element(raw.begin(), raw.end()) - raw.begin();
    const auto amin = std::min_element(raw.begin(), raw.end()) - raw.begin();
    order = order && (std::max_element(yv.begin(), yv.end()) - yv.begin()) == amax &&
            (std::min_element(yv.begin(), yv.end()) - yv.begin()) == amin;
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
      std::vector<double> scaled = raw;
      for (auto& v : scaled) v *= c;
      const V ys = ad::normalize(V::constant(s, scaled), ad::NormMode::minmax);
      for (std::size_t i = 0; i < yv.size(); ++i) scale_err = std::max(scale_err, std::abs(ys.value()[i] - yv[i]));
    }
    const V k = ad::normalize(V::constant(s, std::vector<double>(raw.size(), raw[0])), ad::NormMode::minmax);
    for (double v : k.value()) degenerate = degenerate && v == 0.0;
  }
  Outcome o;
  o.pass = in_range && degenerate && order && scale_err < 1e-6;
  o.detail = std::string("range ") + (in_range ? "ok" : "violated") + ", constant input " +
             (degenerate ? "zeros" : "nonzero") + ", argmax/argmin " + (order ? "kept" : "moved") +
             ", scale invariance " + fmt("%.2e", scale_err);
  return o;
}

// ---------------------------------------------------------------- 4

Outcome fusion() {
  std::mt19937_64 rng(4);
  bool weights_identical = true;
  double add_err = 0, mul_err = 0, cross_err = 0;
  for (int t = 0; t < 50; ++t) {
    const int D = 16, N = 3 + t % 20;
    ad::ParameterSet<double> ps;
    const auto a = mil::make_attention(ps, "a", D, 8, 100 + t);
    const V h = V::constant({N, D}, uniform(static_cast<std::size_t>(N) * D, rng));
    const auto st = mil::attention_scores(h, a);
    const std::vector<double> w0(st.weights.value().begin(), st.weights.value().end());
    const auto base = mil::attention_pool(h, st);

    mil::FusionParams<double> none;
    const V O = V::constant({1, D}, uniform(D, rng));
    mil::fuse(h, O, st, mil::Fusion::addition, none);
    const auto again = mil::attention_scores(h, a);
    weights_identical = weights_identical &&
                        std::equal(w0.begin(), w0.end(), again.weights.value().begin()) &&
                        std::equal(w0.begin(), w0.end(), st.weights.value().begin());

    const auto add0 = mil::fuse(h, V::constant({1, D}, std::vector<double>(D, 0.0)), st, mil::Fusion::addition, none);
    const auto mul1 = mil::fuse(h, V::constant({1, D}, std::vector<double>(D, 1.0)), st, mil::Fusion::multiplication, none);
    for (int d = 0; d < D; ++d) {
      add_err = std::max(add_err, std::abs(add0.pooled.value()[d] - base.value()[d]));
      mul_err = std::max(mul_err, std::abs(mul1.pooled.value()[d] - base.value()[d]));
    }
    ad::ParameterSet<double> fps;
    const auto cp = mil::make_fusion(fps, mil::Fusion::cross_attention, D);  // g1 = 1, g2 = 0
    const auto cross = mil::fuse(h, O, st, mil::Fusion::cross_attention, cp);
    for (int i = 0; i < N; ++i) cross_err = std::max(cross_err, std::abs(cross.fused_weights.value()[i] - w0[i]));
  }

  // same check through the full model: the frequency branch never reaches the attention
  mil::ModelConfig mc;
  mc.embed_dim = 16;
  mc.attn_hidden = 8;
  mc.block.cnn_layers = 3;
  mc.block.max_channels = 8;
  mc.block.input_channels = 6;
  mc.block.crop_size = 16;
  mil::MilModel<double> model(mc);
  const V bag = V::constant({9, 16}, uniform(9 * 16, rng));
  std::vector<double> first;
  for (int t = 0; t < 5; ++t) {
    fft_block::BlockInput<double> in;
    in.packed = V::constant({1, 6, 16, 16}, uniform(6 * 256, rng, 0, 3));
    const auto out = model.forward(bag, in, false);
    const std::vector<double> w(out.attention->weights.value().begin(), out.attention->weights.value().end());
    if (t == 0) first = w;
    weights_identical = weights_identical && w == first;
  }

  Outcome o;
  o.pass = weights_identical && add_err < 1e-9 && mul_err < 1e-9 && cross_err < 1e-9;
  o.detail = std::string("addition weights ") + (weights_identical ? "bitwise identical" : "changed") +
             ", O=0 addition " + fmt("%.1e", add_err) + ", O=1 multiplication " + fmt("%.1e", mul_err) +
             ", g2=0 cross-attention weights " + fmt("%.1e", cross_err);
  return o;
}

// ---------------------------------------------------------------- 5

Outcome energy_law() {
  const auto r = harness::energy_scaling({});
  std::string radii;
  for (std::size_t i = 0; i < r.sides.size(); ++i) {
    double m = 0;
    for (const auto& row : r.radius) m += row[i];
    radii += (i ? "/" : "") + fmt("%.1f", m / r.radius.size());
  }
  Outcome o;
  o.pass = r.mean_slope >= 0.3 && r.mean_slope <= 0.7;
  o.detail = "mean slope " + fmt("%.3f", r.mean_slope) + " over " + std::to_string(r.slope.size()) +
             " seeds, mean r_0.5 " + radii + " at sides 128/256/512";
  return o;
}

// ---------------------------------------------------------------- 6

Outcome reconstruction() {
  const int side = 128;
  bool monotone = true;
  double full_err = 0;
  std::string first;
  for (int i = 0; i < 10; ++i) {
    const auto img = dead_leaves(side, 6, i);
    const auto centered = spectral::fftshift(spectral::fft2d(img), spectral::ShiftDirection::forward);
    double prev = INFINITY;
    for (int crop : {8, 16, 32, 64, side}) {
      const auto rec = spectral::reconstruct_lowpass(spectral::center_crop_pad(centered, crop), img.dims());
      double mse = 0, max_err = 0;
      for (std::size_t k = 0; k < img.size(); ++k) {
        const double d = rec.data()[k] - img.data()[k];
        mse += d * d;
        max_err = std::max(max_err, std::abs(d));
      }
      mse /= static_cast<double>(img.size());
      if (crop == side) {
        full_err = std::max(full_err, max_err);
      } else {
        monotone = monotone && mse <= prev;
        prev = mse;
        if (i == 0) first += (first.empty() ? "" : " ") + fmt("%.2e", mse);
      }
    }
  }
  Outcome o;
  o.pass = monotone && full_err < 1e-9;
  o.detail = std::string("MSE ") + (monotone ? "nonincreasing" : "NOT monotone") +
             " over crops 8/16/32/64 on 10 images (image 0: " + first + "), full-size max error " +
             fmt("%.2e", full_err);
  return o;
}

// ---------------------------------------------------------------- 7, 9

const std::vector<std::uint64_t> kSeeds{0, 1, 2};

struct PlantedRuns {
  data::Dataset ds;
  std::vector<mil::PatchBag> bags;
  std::map<std::string, std::vector<harness::TrainResult>> by_variant;
  double setup_seconds = 0;
};

PlantedRuns& planted() {
  static PlantedRuns p = [] {
    const auto t0 = std::chrono::steady_clock::now();
    PlantedRuns r;
    data::SyntheticConfig sc;
    sc.classes = 3;
    sc.per_class = 50;
    sc.signal = data::Signal::both;
    r.ds = data::make_dataset(sc);
    r.bags = harness::encode_bags(r.ds, harness::ExperimentConfig{});
    r.setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return p;
}

const std::vector<harness::TrainResult>& planted_runs(const std::string& variant,
                                                      const std::function<void(harness::ExperimentConfig&)>& tweak) {
  auto& p = planted();
  auto it = p.by_variant.find(variant);
  if (it != p.by_variant.end()) return it->second;
  harness::ExperimentConfig cfg;
  tweak(cfg);
  harness::validate(cfg);
  const auto data = harness::prepare_data(p.ds, cfg, p.bags);
  std::vector<harness::TrainResult> runs;
  for (auto s : kSeeds) runs.push_back(harness::run_train(cfg, data, s));
  return p.by_variant[variant] = std::move(runs);
}

double mean_macro_f1(const std::vector<harness::TrainResult>& runs, std::string* list = nullptr) {
  double m = 0;
  for (const auto& r : runs) {
    m += r.best.report.macro_f1;
    if (list) *list += (list->empty() ? "" : "/") + fmt("%.3f", r.best.report.macro_f1);
  }
  return m / runs.size();
}

Outcome planted_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& both = planted_runs("both", [](auto&) {});
  const auto& spatial = planted_runs("spatial", [](auto& c) { c.branch = mil::Branch::spatial; });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() +
                      planted().setup_seconds;
  std::string lb, ls;
  const double fb = mean_macro_f1(both, &lb), fs = mean_macro_f1(spatial, &ls);
  Outcome o;
  o.pass = fb - fs >= 0.05 && secs < 600;
  o.detail = "FFT-MIL addition macro F1 " + fmt("%.3f", fb) + " (" + lb + ") vs spatial " + fmt("%.3f", fs) + " (" +
             ls + "), margin " + fmt("%+.1f", 100 * (fb - fs)) + " points, pipeline " + fmt("%.0f", secs) + " s";
  return o;
}

Outcome normalization_trend() {
  const auto& mm = planted_runs("both", [](auto&) {});
  const auto& none = planted_runs("none", [](auto& c) { c.normalization = ad::NormMode::none; });
  std::string lm, ln;
  const double fm = mean_macro_f1(mm, &lm), fn = mean_macro_f1(none, &ln);
  Outcome o;
  o.pass = fm >= fn;
  o.detail = "Min-Max macro F1 " + fmt("%.3f", fm) + " (" + lm + ") vs None " + fmt("%.3f", fn) + " (" + ln + ")";
  return o;
}

// ---------------------------------------------------------------- 8

Outcome frequency_only() {
  data::SyntheticConfig sc;
  sc.classes = 2;
  sc.per_class = 200;
  sc.signal = data::Signal::global_frequency;
  const auto ds = data::make_dataset(sc);
  harness::ExperimentConfig cfg;
  cfg.branch = mil::Branch::frequency;
  cfg.epochs = 30;
  const auto data = harness::prepare_data(ds, cfg);
  double mean = 0;
  std::string list;
  for (auto s : kSeeds) {
    const auto r = harness::run_train(cfg, data, s);
    mean += r.best.report.accuracy;
    list += (list.empty() ? "" : "/") + fmt("%.3f", r.best.report.accuracy) + "@" + std::to_string(r.best_epoch);
  }
  mean /= kSeeds.size();
  Outcome o;
  o.pass = mean >= 0.9;
  o.detail = "mean best test accuracy " + fmt("%.3f", mean) + " (accuracy@epoch " + list + "), " +
             std::to_string(ds.images.size()) + " images, design E";
  return o;
}

// ---------------------------------------------------------------- 10

Outcome designs() {
  data::SyntheticConfig sc;
  sc.image_side = 128;
  sc.classes = 3;
  sc.per_class = 5;
  sc.signal = data::Signal::both;
  const auto ds = data::make_dataset(sc);
  const auto tmp = fs::temp_directory_path() / "fftmil_acceptance_designs";
  bool ok = true;
  std::string bad;
  for (auto d : fft_block::all_designs()) {
    harness::ExperimentConfig cfg;
    cfg.design = d;
    cfg.epochs = 2;
    cfg.patch_size = 32;
    const std::string tag = fft_block::to_string(d);
    try {
      const auto data = harness::prepare_data(ds, cfg);
      const auto r = harness::run_train(cfg, data, 0);
      bool finite = r.log.size() == 3;
      for (std::size_t e = 1; e < r.log.size(); ++e) finite = finite && std::isfinite(r.log[e].train_loss);
      for (const auto& e : r.log) finite = finite && std::isfinite(e.accuracy) && std::isfinite(e.macro_f1);
      for (const auto& rec : r.checkpoint.records)
        for (float v : rec.values) finite = finite && std::isfinite(v);
      const auto& rep = r.best.report;
      int total = 0;
      for (const auto& row : rep.confusion) {
        finite = finite && row.size() == 3;
        for (int c : row) total += c;
      }
      finite = finite && rep.confusion.size() == 3 && rep.per_class.size() == 3 && total == 3 &&
               std::isfinite(rep.macro_auc) && std::isfinite(rep.weighted_f1);
      const auto dir = tmp / tag;
      harness::emit_outputs(dir, cfg, r, harness::dataset_energy_profile(ds, cfg));
      for (const char* f : {"metrics.json", "confusion.csv", "roc_points.csv", "energy_profile.csv", "epoch_log.csv",
                            "config_resolved.json", "timing.json", "model.ckpt"})
        finite = finite && fs::exists(dir / f) && fs::file_size(dir / f) > 0;
      if (!finite) {
        ok = false;
        bad += " " + tag;
      }
    } catch (const std::exception& e) {
      ok = false;
      bad += " " + tag + "(" + e.what() + ")";
    }
  }
  fs::remove_all(tmp);

  fft_block::FFTBlockConfig def;
  def.crop_size = 256;
  def.cnn_layers = 8;
  ad::ParameterSet<float> a, m;
  fft_block::FFTBlock<float> big(def, a);
  fft_block::FFTBlock<float> mini(fft_block::mini_config(def), m);
  const double ratio = static_cast<double>(m.count()) / a.count();

  Outcome o;
  o.pass = ok && ratio < 0.3;
  o.detail = std::string("designs A-I ") + (ok ? "finite with complete reports" : "failed:" + bad) +
             ", mini/default parameters " + std::to_string(m.count()) + "/" + std::to_string(a.count()) + " = " +
             fmt("%.3f", ratio);
  return o;
}

// ---------------------------------------------------------------- 11

Outcome metrics_oracle() {
  std::mt19937_64 rng(11);
  int f1_mismatch = 0;
  double auc_err = 0;
  for (int t = 0; t < 200; ++t) {
    const auto p = oracle::random_set(rng);
    const auto r = harness::evaluate_metrics(p.predictions, p.scores, p.labels, p.K);
    const auto f = oracle::f1_scores(p.predictions, p.labels, p.K);
    f1_mismatch += r.macro_f1 != f.macro || r.weighted_f1 != f.weighted;
    for (int k = 0; k < p.K; ++k) {
      const auto want = oracle::pair_auc(p.scores, p.labels, k);
      if (want.has_value() != r.per_class_auc[k].has_value())
        auc_err = INFINITY;
      else if (want)
        auc_err = std::max(auc_err, std::abs(*want - *r.per_class_auc[k]));
    }
    const double m = oracle::macro_auc(p.scores, p.labels, p.K);
    if (std::isnan(m) != std::isnan(r.macro_auc)) auc_err = INFINITY;
    else if (!std::isnan(m)) auc_err = std::max(auc_err, std::abs(m - r.macro_auc));
  }
  Outcome o;
  o.pass = f1_mismatch == 0 && auc_err < 1e-12;
  o.detail = "200 sets, F1 mismatches " + std::to_string(f1_mismatch) + ", max AUC difference " + fmt("%.2e", auc_err);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 = no limit
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "transform correctness", 10, transforms},
      {2, "gradient suite", 120, gradients},
      {3, "normalization properties", 5, normalization},
      {4, "fusion invariants", 10, fusion},
      {5, "energy scaling law", 60, energy_law},
      {6, "reconstruction monotonicity", 0, reconstruction},
      {7, "planted-signal trend", 0, planted_trend},
      {8, "frequency-only sanity", 0, frequency_only},
      {9, "normalization ablation trend", 0, normalization_trend},
      {10, "design-variant smoke suite", 0, designs},
      {11, "metrics oracle", 0, metrics_oracle},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  std::ofstream log("acceptance_results.txt");
  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += ", over the " + fmt("%.0f", c.limit_seconds) + " s limit";
    }
    failed += !o.pass;
    char line[1024];
    std::snprintf(line, sizeof line, "%s  criterion %2d  %-29s %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                  o.detail.c_str(), secs);
    std::fputs(line, stdout);
    std::fflush(stdout);
    log << line << std::flush;
  }
  return failed ? 1 : 0;
}
