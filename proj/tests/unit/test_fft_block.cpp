#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fftmil/autodiff/grad_check.hpp"
#include "fftmil/error.hpp"
#include "fftmil/fft_block/block.hpp"

using namespace fftmil;
using namespace fftmil::fft_block;
using V = ad::Var<double>;

namespace {

std::vector<double> uniform(std::size_t n, unsigned seed, double lo = -1, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

FFTBlockConfig small(Design d, int side = 16, int layers = 3) {
  FFTBlockConfig c;
  c.design = d;
  c.cnn_layers = layers;
  c.max_channels = 8;
  c.input_channels = uses_complex_input(d) ? 3 : 6;
  c.crop_size = side;
  c.output_dim = 10;
  c.mlp_hidden = 12;
  c.seed = 5;
  return c;
}

BlockInput<double> random_input(const FFTBlockConfig& c, unsigned seed, bool grad = false) {
  const int n = c.input_channels * c.crop_size * c.crop_size;
  BlockInput<double> in;
  const ad::Shape s{1, c.input_channels, c.crop_size, c.crop_size};
  if (uses_complex_input(c.design)) {
    in.spectrum.re = V::leaf(s, uniform(n, seed), grad);
    in.spectrum.im = V::leaf(s, uniform(n, seed + 1), grad);
  } else {
    in.packed = V::leaf(s, uniform(n, seed, 0, 2), grad);
  }
  return in;
}

std::vector<std::string> names(const ad::ParameterSet<double>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps.items()) out.push_back(p.name);
  return out;
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("design tags parse and print") {
  for (auto d : all_designs()) CHECK(parse_design(to_string(d)) == d);
  CHECK(parse_design("e") == Design::E);
  CHECK(all_designs().size() == 9);
  CHECK_THROWS_AS(parse_design("J"), InvalidArgument);
  CHECK_FALSE(uses_complex_input(Design::E));
  CHECK(uses_complex_input(Design::A));
  CHECK(uses_complex_input(Design::I));
}

TEST_CASE("channel schedule doubles from 4 then holds") {
  FFTBlockConfig c;
  c.cnn_layers = 8;
  c.max_channels = 32;
  CHECK(channel_schedule(c) == std::vector<int>{4, 8, 16, 32, 32, 32, 32, 32});
  c.max_channels = 6;
  CHECK(channel_schedule(c) == std::vector<int>{4, 6, 6, 6, 6, 6, 6, 6});
  c.crop_size = 256;
  CHECK(final_side(c) == 1);
  CHECK(c.resolved_mlp_hidden() == 48);
}

TEST_CASE("crop too small for the pooling depth names the minimum size") {
  auto c = small(Design::E, 16, 5);
  try {
    validate(c);
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("32") != std::string::npos);
  }
  ad::ParameterSet<double> ps;
  CHECK_THROWS_AS(FFTBlock<double>(c, ps), InvalidArgument);
}

TEST_CASE("batch-norm placement per design") {
  for (auto d : all_designs()) {
    CAPTURE(to_string(d));
    ad::ParameterSet<double> ps;
    FFTBlock<double> b(small(d), ps);
    const auto n = names(ps);
    const bool any_bn = any_contains(n, "bn");
    switch (d) {
      case Design::E:
      case Design::F:
      case Design::G:
        CHECK_FALSE(any_bn);
        break;
      case Design::H:
      case Design::D:
        for (int l = 0; l < 3; ++l) CHECK(any_contains(n, "fft.fbn" + std::to_string(l) + ".re.gamma"));
        break;
      case Design::I:
        CHECK(b.batchnorm_count() == 1);
        CHECK(any_contains(n, "fft.bn_out.gamma"));
        break;
      default:  // A-C: spatial batch norm after each inverse FFT
        for (int l = 0; l < 3; ++l) CHECK(any_contains(n, "fft.bn" + std::to_string(l) + ".gamma"));
        break;
    }
  }
}

TEST_CASE("every design yields a finite D-wide feature") {
  for (auto d : all_designs()) {
    CAPTURE(to_string(d));
    ad::ParameterSet<double> ps;
    const auto cfg = small(d, 32, 4);
    FFTBlock<double> b(cfg, ps);
    for (bool training : {true, false}) {
      const auto o = b.forward(random_input(cfg, 7), training);
      CHECK(o.shape() == ad::Shape{1, 10});
      for (double v : o.value()) CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("zero input reaches the MLP bias path") {
  for (auto d : {Design::E, Design::A}) {
    CAPTURE(to_string(d));
    ad::ParameterSet<double> ps;
    auto cfg = small(d);
    FFTBlock<double> b(cfg, ps);
    for (auto& p : ps.items())
      if (p.name == "fft.mlp1.b")
        for (auto& v : p.var.mutable_value()) v = 0.25;
    const int n = cfg.input_channels * cfg.crop_size * cfg.crop_size;
    const ad::Shape s{1, cfg.input_channels, cfg.crop_size, cfg.crop_size};
    BlockInput<double> in;
    if (d == Design::E)
      in.packed = V::constant(s, std::vector<double>(n, 0.0));
    else
      in.spectrum = {V::constant(s, std::vector<double>(n, 0.0)), V::constant(s, std::vector<double>(n, 0.0))};
    const auto o = b.forward(in, false);
    for (double v : o.value()) CHECK(v == 0.25);
  }
}

TEST_CASE("scaling the input of design E leaves the output unchanged") {
  ad::ParameterSet<double> ps;
  const auto cfg = small(Design::E);
  FFTBlock<double> b(cfg, ps);
  auto in = random_input(cfg, 11);
  const auto o1 = b.forward(in, false);
  std::vector<double> scaled(in.packed.value().begin(), in.packed.value().end());
  for (auto& v : scaled) v *= 10;
  BlockInput<double> in10;
  in10.packed = V::constant(in.packed.shape(), scaled);
  const auto o2 = b.forward(in10, false);
  for (std::size_t i = 0; i < o1.size(); ++i) CHECK(std::abs(o1.value()[i] - o2.value()[i]) < 1e-6);
}

TEST_CASE("one-block vanilla design on a 2-channel 4x4 input") {
  auto cfg = small(Design::A, 4, 1);
  cfg.input_channels = 2;
  ad::ParameterSet<double> ps;
  FFTBlock<double> b(cfg, ps);
  CHECK(ps.find("fft.mlp0.w")->var.shape() == ad::Shape{12, 4 * 2 * 2});
  const auto o = b.forward(random_input(cfg, 3), true);
  CHECK(o.shape() == ad::Shape{1, 10});
}

TEST_CASE("mini configuration is under 30 percent of the default size") {
  FFTBlockConfig def;
  def.crop_size = 256;
  ad::ParameterSet<double> a, m;
  FFTBlock<double> big(def, a);
  FFTBlock<double> mini(mini_config(def), m);
  CHECK(m.count() < 0.3 * a.count());
}

TEST_CASE("block gradients match central differences") {
  for (auto d : {Design::E, Design::A, Design::D, Design::H, Design::I}) {
    CAPTURE(to_string(d));
    ad::ParameterSet<double> ps;
    const auto cfg = small(d, 8, 2);
    FFTBlock<double> b(cfg, ps);
    const auto in = random_input(cfg, 13, true);
    std::vector<V> inputs;
    for (auto& p : ps.items()) inputs.push_back(p.var);
    if (in.packed.defined()) inputs.push_back(in.packed);
    if (in.spectrum.re.defined()) {
      inputs.push_back(in.spectrum.re);
      inputs.push_back(in.spectrum.im);
    }
    const auto w = V::constant({1, 10}, uniform(10, 17));
    ad::GradCheckOptions opt;
    opt.max_coords = 40;
    opt.floor = 1e-6;  // conv biases ahead of batch norm have exactly zero gradient
    const auto r = ad::grad_check([&] { return ad::sum(ad::mul(b.forward(in, true), w)); }, inputs, opt);
    INFO(r.worst);
    CHECK(r.max_rel_error < 1e-4);
  }
}
