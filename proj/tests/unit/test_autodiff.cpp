#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fftmil/autodiff/checkpoint.hpp"
#include "fftmil/autodiff/complex_ops.hpp"
#include "fftmil/autodiff/grad_check.hpp"
#include "fftmil/autodiff/ops.hpp"
#include "fftmil/autodiff/optim.hpp"
#include "fftmil/error.hpp"

using namespace fftmil;
using namespace fftmil::ad;
using V = Var<double>;

namespace {

std::vector<double> uniform(std::size_t n, unsigned seed, double lo = -1, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Values bounded away from zero so relu kinks are never crossed by the probe.
std::vector<double> off_zero(std::size_t n, unsigned seed) {
  auto v = uniform(n, seed, 0.1, 1.0);
  std::mt19937_64 rng(seed + 1);
  for (auto& x : v)
    if (rng() & 1) x = -x;
  return v;
}

V input(Shape s, std::vector<double> v) { return V::leaf(std::move(s), std::move(v), true); }

// Weighted sum with fixed random weights, so every output coordinate matters.
V probe(const V& y, unsigned seed = 99) {
  const auto w = V::constant(y.shape(), uniform(y.size(), seed));
  return sum(mul(y, w));
}

}  // namespace

TEST_CASE("conv2d examples") {
  std::vector<double> id(9, 0.0);
  id[4] = 1.0;
  const auto x = V::constant({1, 1, 4, 4}, uniform(16, 1));
  const auto y = conv2d(x, V::constant({1, 1, 3, 3}, id), V());
  for (std::size_t i = 0; i < 16; ++i) CHECK(y.value()[i] == x.value()[i]);

  const auto ones = V::constant({1, 1, 3, 3}, std::vector<double>(9, 1.0));
  const auto c = conv2d(V::constant({1, 1, 5, 5}, std::vector<double>(25, 1.0)), ones, V());
  CHECK(c.value()[2 * 5 + 2] == 9.0);
  CHECK(c.value()[0] == 4.0);

  CHECK_THROWS_AS(conv2d(x, V::constant({1, 2, 3, 3}, std::vector<double>(18)), V()), InvalidArgument);
}

TEST_CASE("conv2d gradient") {
  auto x = input({1, 2, 5, 5}, uniform(50, 2));
  auto w = input({3, 2, 3, 3}, uniform(54, 3));
  auto b = input({3}, uniform(3, 4));
  const auto r = grad_check([&] { return probe(conv2d(x, w, b)); }, {x, w, b});
  CHECK(r.max_rel_error < 1e-5);
}

TEST_CASE("activations") {
  const auto x = V::constant({3}, {-1, 0, 2});
  const auto r = relu(x), l = leaky_relu(x);
  CHECK(r.value()[0] == 0.0);
  CHECK(r.value()[1] == 0.0);
  CHECK(r.value()[2] == 2.0);
  CHECK(l.value()[0] == doctest::Approx(-0.01));
  CHECK(l.value()[1] == 0.0);
  CHECK(l.value()[2] == 2.0);

  auto z = input({12}, off_zero(12, 5));
  CHECK(grad_check([&] { return probe(relu(z)); }, {z}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(leaky_relu(z)); }, {z}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(tanh(z)); }, {z}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(sigmoid(z)); }, {z}).max_rel_error < 1e-6);
}

TEST_CASE("maxpool2x2") {
  const auto a = maxpool2x2(V::constant({1, 1, 2, 2}, {1, 2, 3, 4}));
  CHECK(a.value()[0] == 4.0);

  auto c = input({1, 1, 2, 2}, {5, 5, 5, 5});
  auto out = maxpool2x2(c);
  CHECK(out.value()[0] == 5.0);
  backward(sum(out));
  CHECK(c.grad()[0] == 1.0);
  CHECK(c.grad()[1] == 0.0);
  CHECK(c.grad()[2] == 0.0);
  CHECK(c.grad()[3] == 0.0);

  auto x = input({1, 1, 8, 8}, uniform(64, 6));  // continuous draws: no ties
  CHECK(grad_check([&] { return probe(maxpool2x2(x)); }, {x}).max_rel_error < 1e-5);
  CHECK_THROWS_AS(maxpool2x2(V::constant({1, 1, 3, 4}, std::vector<double>(12))), InvalidArgument);
}

TEST_CASE("normalize modes") {
  const auto m = normalize(V::constant({1, 3}, {1, 3, 5}), NormMode::minmax);
  CHECK(m.value()[0] == 0.0);
  CHECK(m.value()[1] == 0.5);
  CHECK(m.value()[2] == 1.0);
  const auto k = normalize(V::constant({1, 3}, {2, 2, 2}), NormMode::minmax);
  for (double v : k.value()) CHECK(v == 0.0);

  const auto raw = uniform(40, 7, -3, 5);
  const auto x = V::constant({2, 20}, raw);
  const auto mm = normalize(x, NormMode::minmax);
  for (int s = 0; s < 2; ++s) {
    std::size_t amax = 0, amin = 0, nmax = 0, nmin = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      const double v = mm.value()[s * 20 + i];
      CHECK((v >= 0.0 && v <= 1.0));
      if (raw[s * 20 + i] > raw[s * 20 + amax]) amax = i;
      if (raw[s * 20 + i] < raw[s * 20 + amin]) amin = i;
      if (v > mm.value()[s * 20 + nmax]) nmax = i;
      if (v < mm.value()[s * 20 + nmin]) nmin = i;
    }
    CHECK(amax == nmax);
    CHECK(amin == nmin);
  }

  const auto z = normalize(x, NormMode::zscore);
  double mean = 0, var = 0;
  for (int i = 0; i < 20; ++i) mean += z.value()[i] / 20;
  for (int i = 0; i < 20; ++i) var += std::pow(z.value()[i] - mean, 2) / 20;
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-6));

  const auto l = normalize(x, NormMode::l2);
  double n2 = 0;
  for (int i = 0; i < 20; ++i) n2 += l.value()[i] * l.value()[i];
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-6));

  const auto id = normalize(x, NormMode::none);
  for (std::size_t i = 0; i < 40; ++i) CHECK(id.value()[i] == raw[i]);

  CHECK_THROWS_AS(normalize(V::constant({1, 2}, {1.0, std::nan("")}), NormMode::minmax), InvalidArgument);
  CHECK_THROWS_AS(parse_norm_mode("max"), InvalidArgument);
}

TEST_CASE("normalize gradients") {
  for (auto mode : {NormMode::minmax, NormMode::zscore, NormMode::l2, NormMode::none}) {
    CAPTURE(to_string(mode));
    auto x = input({2, 15}, uniform(30, 8, -2, 2));
    CHECK(grad_check([&] { return probe(normalize(x, mode)); }, {x}).max_rel_error < 1e-5);
  }
}

TEST_CASE("minmax is invariant to positive scaling") {
  const auto raw = uniform(50, 9, 0, 4);
  std::vector<double> scaled(raw);
  for (auto& v : scaled) v *= 37.5;
  const auto a = normalize(V::constant({1, 50}, raw), NormMode::minmax);
  const auto b = normalize(V::constant({1, 50}, scaled), NormMode::minmax);
  for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(a.value()[i] - b.value()[i]) < 1e-12);
}

TEST_CASE("batchnorm") {
  ParameterSet<double> ps;
  auto bn = make_batchnorm(ps, "bn", 2);
  CHECK(ps.contains("bn.gamma"));
  CHECK(ps.contains("bn.beta"));
  auto x = V::constant({1, 2, 4, 4}, uniform(32, 10, 0, 3));
  const auto y = batchnorm(x, bn, true);
  for (int c = 0; c < 2; ++c) {
    double m = 0, v = 0;
    for (int i = 0; i < 16; ++i) m += y.value()[c * 16 + i] / 16;
    for (int i = 0; i < 16; ++i) v += std::pow(y.value()[c * 16 + i] - m, 2) / 16;
    CHECK(m == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v == doctest::Approx(1.0).epsilon(1e-3));
  }
  // running stats moved 10% toward the batch statistics
  CHECK(bn.running_mean[0] != 0.0);

  auto bn2 = make_batchnorm(ps, "bn2", 1);
  const auto k = batchnorm(V::constant({1, 1, 2, 2}, {3, 3, 3, 3}), bn2, true);
  for (double v : k.value()) CHECK(v == 0.0);

  // evaluation mode uses the running statistics
  auto bn3 = make_batchnorm(ps, "bn3", 1);
  const auto e = batchnorm(V::constant({1, 1, 1, 2}, {1, 2}), bn3, false);
  CHECK(e.value()[0] == doctest::Approx(1.0 / std::sqrt(1.0 + 1e-5)));

  ParameterSet<double> gp;
  auto gbn = make_batchnorm(gp, "g", 3);
  auto xi = input({2, 3, 4, 4}, uniform(96, 11, -1, 2));
  auto gamma = gp.items()[0].var;
  auto beta = gp.items()[1].var;
  for (auto& v : gamma.mutable_value()) v = 1.3;
  for (auto& v : beta.mutable_value()) v = -0.2;
  CHECK(grad_check([&] { return probe(batchnorm(xi, gbn, true)); }, {xi, gamma, beta}).max_rel_error < 1e-4);
}

TEST_CASE("linear") {
  const auto y = linear(V::constant({1, 2}, {1, 2}), V::constant({2, 2}, {1, 0, 0, 1}), V::constant({2}, {1, 1}));
  CHECK(y.value()[0] == 2.0);
  CHECK(y.value()[1] == 3.0);
  const auto same = linear(V::constant({1, 2}, {4, 5}), V::constant({2, 2}, {1, 0, 0, 1}), V::constant({2}, {0, 0}));
  CHECK(same.value()[0] == 4.0);
  CHECK(same.value()[1] == 5.0);
  CHECK_THROWS_AS(linear(V::constant({1, 3}, {1, 2, 3}), V::constant({2, 2}, {1, 0, 0, 1}), V()), InvalidArgument);

  auto x = input({3, 4}, uniform(12, 12));
  auto w = input({5, 4}, uniform(20, 13));
  auto b = input({5}, uniform(5, 14));
  CHECK(grad_check([&] { return probe(linear(x, w, b)); }, {x, w, b}).max_rel_error < 1e-6);
}

TEST_CASE("cross entropy") {
  const auto u = cross_entropy(V::constant({1, 4}, {0.3, 0.3, 0.3, 0.3}), 2);
  CHECK(u.value()[0] == doctest::Approx(std::log(4.0)));
  const auto sure = cross_entropy(V::constant({1, 3}, {20, 0, 0}), 0);
  CHECK(sure.value()[0] < 1e-4);
  CHECK_THROWS_AS(cross_entropy(V::constant({1, 3}, {0, 0, 0}), 3), InvalidArgument);
  auto z = input({1, 4}, uniform(4, 15, -2, 2));
  CHECK(grad_check([&] { return cross_entropy(z, 1); }, {z}).max_rel_error < 1e-6);
}

TEST_CASE("row and elementwise ops") {
  auto h = input({4, 3}, uniform(12, 16));
  auto o = input({3}, uniform(3, 17));
  auto w = input({4}, uniform(4, 18));
  auto s = input({1}, {0.7});
  CHECK(grad_check([&] { return probe(add_rows(h, o)); }, {h, o}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(mul_rows(h, o)); }, {h, o}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(concat_rows(h, o)); }, {h, o}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(row_dot(h, o)); }, {h, o}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(weighted_sum(w, h)); }, {w, h}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(softmax(w)); }, {w}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(scalar_mul(s, h)); }, {s, h}).max_rel_error < 1e-6);
  CHECK(grad_check([&] { return probe(sub(h, scale(h, 0.3))); }, {h}).max_rel_error < 1e-6);
  auto g = input({4, 2}, uniform(8, 19));
  CHECK(grad_check([&] { return probe(concat_features(h, g)); }, {h, g}).max_rel_error < 1e-6);

  const auto sm = softmax(V::constant({3}, {1000, 1000, 1000}));
  for (double v : sm.value()) CHECK(v == doctest::Approx(1.0 / 3));
}

TEST_CASE("complex conv reduces to real conv on real data") {
  ParameterSet<double> ps;
  auto cc = make_complex_conv(ps, "c", 2, 3, 21);
  for (auto& v : cc.wi.mutable_value()) v = 0;
  for (auto& v : cc.bi.mutable_value()) v = 0;
  const auto x = V::constant({1, 2, 4, 4}, uniform(32, 22));
  const auto z = complex_conv2d(ComplexVar<double>::from_real(x), cc);
  const auto r = conv2d(x, cc.wr, cc.br);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(z.re.value()[i] == doctest::Approx(r.value()[i]).epsilon(1e-12));
    CHECK(z.im.value()[i] == 0.0);
  }
}

TEST_CASE("complex layer gradients") {
  ParameterSet<double> ps;
  auto cc = make_complex_conv(ps, "c", 2, 2, 23);
  auto xr = input({1, 2, 4, 4}, uniform(32, 24));
  auto xi = input({1, 2, 4, 4}, uniform(32, 25));
  std::vector<V> all{xr, xi, cc.wr, cc.wi, cc.br, cc.bi};
  CHECK(grad_check(
            [&] {
              const auto z = complex_conv2d(ComplexVar<double>{xr, xi}, cc);
              return add(probe(z.re, 1), probe(z.im, 2));
            },
            all)
            .max_rel_error < 1e-6);

  for (bool inverse : {false, true}) {
    CAPTURE(inverse);
    CHECK(grad_check(
              [&] {
                const auto z = fft2(ComplexVar<double>{xr, xi}, inverse);
                return add(probe(z.re, 3), probe(z.im, 4));
              },
              {xr, xi})
              .max_rel_error < 1e-6);
  }

  auto yr = input({1, 2, 4, 4}, off_zero(32, 26));
  auto yi = input({1, 2, 4, 4}, off_zero(32, 27));
  CHECK(grad_check(
            [&] {
              const auto z = complex_maxpool2x2(complex_activate(ComplexVar<double>{yr, yi}, Activation::relu));
              return add(probe(z.re, 5), probe(z.im, 6));
            },
            {yr, yi})
            .max_rel_error < 1e-6);
}

TEST_CASE("fft2 forward then inverse is the identity") {
  const auto xr = V::constant({1, 1, 4, 6}, uniform(24, 28));
  const auto xi = V::constant({1, 1, 4, 6}, uniform(24, 29));
  const auto back = fft2(fft2(ComplexVar<double>{xr, xi}, false), true);
  for (std::size_t i = 0; i < 24; ++i) {
    CHECK(back.re.value()[i] == doctest::Approx(xr.value()[i]).epsilon(1e-12));
    CHECK(back.im.value()[i] == doctest::Approx(xi.value()[i]).epsilon(1e-12));
  }
}

TEST_CASE("grad_check on a quadratic") {
  auto x = input({10}, uniform(10, 30));
  CHECK(grad_check([&] { return sum(mul(x, x)); }, {x}).max_rel_error < 1e-8);
}

TEST_CASE("adam") {
  ParameterSet<double> ps;
  auto p = ps.add("p", {1}, {0.5});
  Adam<double> opt(ps, {.lr = 1e-4});
  p.zero_grad();
  opt.step();
  CHECK(p.value()[0] == 0.5);

  // first real step moves by about lr
  ParameterSet<double> ps1;
  auto p1 = ps1.add("p", {1}, {0.5});
  Adam<double> opt1(ps1, {.lr = 1e-4});
  p1.ensure_grad()[0] = 1.0;
  opt1.step();
  CHECK(p1.value()[0] == doctest::Approx(0.5 - 1e-4).epsilon(1e-9));

  p1.ensure_grad()[0] = std::nan("");
  try {
    opt1.step();
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("'p'") != std::string::npos);
  }
  CHECK(p1.value()[0] == doctest::Approx(0.5 - 1e-4).epsilon(1e-9));

  auto run = [] {
    ParameterSet<float> q;
    auto a = q.add("a", {3}, {0.1f, -0.2f, 0.3f});
    Adam<float> o(q, {.lr = 1e-3});
    for (int i = 0; i < 10; ++i) {
      q.zero_grad();
      backward(sum(mul(a, a)));
      o.step();
    }
    return std::vector<float>(a.value().begin(), a.value().end());
  };
  CHECK(run() == run());
}

TEST_CASE("parameter names are unique") {
  ParameterSet<double> ps;
  ps.add_zeros("w", {2});
  CHECK_THROWS_AS(ps.add_zeros("w", {3}), InvalidArgument);
}

TEST_CASE("checkpoint round trip and rejection") {
  Checkpoint ck;
  ck.config_hash = 0x1234abcdULL;
  ck.design = "E";
  ck.records.push_back({"a.w", {2, 3}, {1, 2, 3, 4, 5, 6}});
  ck.records.push_back({"a.b", {3}, {0.5f, -1, 2}});
  const auto bytes = encode_checkpoint(ck);
  const auto back = decode_checkpoint(bytes);
  CHECK(back.config_hash == ck.config_hash);
  CHECK(back.design == "E");
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].values == ck.records[0].values);
  CHECK(back.records[1].shape == ck.records[1].shape);

  auto cut = bytes;
  cut.resize(bytes.size() - 2);
  try {
    decode_checkpoint(cut);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }

  const auto path = std::filesystem::temp_directory_path() / "fftmil_ck_test.ckpt";
  save_checkpoint(path, ck);
  CHECK(load_checkpoint(path, ck.config_hash).records.size() == 2);
  CHECK_THROWS_AS(load_checkpoint(path, ck.config_hash + 1), FormatError);
  std::filesystem::remove(path);

  ParameterSet<float> ps;
  ps.add_zeros("a.w", {2, 3});
  ps.add_zeros("a.b", {3});
  apply_records(ps, ck.records);
  CHECK(ps.items()[0].var.value()[5] == 6.0f);
  ParameterSet<float> wrong;
  wrong.add_zeros("a.w", {3, 2});
  wrong.add_zeros("a.b", {3});
  CHECK_THROWS_AS(apply_records(wrong, ck.records), FormatError);
}
