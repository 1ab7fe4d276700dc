#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "fftmil/data/dataset.hpp"
#include "fftmil/error.hpp"
#include "fftmil/spectral/energy.hpp"
#include "fftmil/spectral/transforms.hpp"

using namespace fftmil;
using namespace fftmil::data;
namespace fs = std::filesystem;

namespace {

SyntheticConfig tiny(int side = 16, int per_class = 50) {
  SyntheticConfig c;
  c.image_side = side;
  c.classes = 3;
  c.per_class = per_class;
  c.seed = 11;
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("fftmil_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Energy of the centered spectrum within half a bin of radius r.
double annulus_energy(const spectral::Spectrum& s, double r) {
  double e = 0;
  for (int c = 0; c < s.channels; ++c)
    for (int u = 0; u < s.height; ++u)
      for (int v = 0; v < s.width; ++v) {
        const double d = std::hypot(u - s.height / 2, v - s.width / 2);
        if (std::abs(d - r) <= 0.5) e += std::norm(s.at(c, u, v));
      }
  return e;
}

}  // namespace

TEST_CASE("synthetic config validation") {
  auto c = tiny();
  CHECK_NOTHROW(validate(c));
  c.alpha = 1.0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = tiny();
  c.image_side = 100;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = tiny();
  c.classes = 1;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
}

TEST_CASE("power-law radius sampler hits both ends") {
  CHECK(sample_radius(0.0, 3.0, 2, 64) == doctest::Approx(2));
  CHECK(sample_radius(1.0, 3.0, 2, 64) == doctest::Approx(64));
  // median of p(r) ~ r^-3 on [2, inf) is 2 * sqrt(2); truncation nudges it up slightly
  const double m = sample_radius(0.5, 3.0, 2, 1e9);
  CHECK(m == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("dead-leaves generation") {
  auto c = tiny(256);
  auto r1 = image_rng(c.seed, 0), r2 = image_rng(c.seed, 0);
  const auto a = generate_dead_leaves(c, r1);
  const auto b = generate_dead_leaves(c, r2);
  CHECK(a == b);
  CHECK(a.channels() == 3);
  CHECK(std::all_of(a.data().begin(), a.data().end(), [](double v) { return v >= 0 && v <= 1; }));
  CHECK(std::all_of(a.data().begin(), a.data().end(), [](double v) { return static_cast<double>(static_cast<float>(v)) == v; }));

  const auto prof = spectral::radial_energy_profile(spectral::fftshift(spectral::fft2d(a), spectral::ShiftDirection::forward),
                                                    {.exclude_dc = true});
  CHECK(spectral::energy_radius(prof, 0.5) < 0.25 * prof.radii.back());
}

TEST_CASE("planted grating lands in the class annulus") {
  auto c = tiny(256);
  c.signal = Signal::global_frequency;
  auto rng = image_rng(c.seed, 3);
  const auto plain = generate_dead_leaves(c, rng);
  const auto base = spectral::fftshift(spectral::fft2d(plain), spectral::ShiftDirection::forward);
  for (int k = 0; k < c.classes; ++k) {
    CAPTURE(k);
    CHECK(grating_wavelength(256, k) == doctest::Approx(256.0 / (8 + 4 * k)));
    CHECK(grating_angle(k) == doctest::Approx(k * M_PI / 4));
    auto r = image_rng(c.seed, 4);
    const auto img = plant_signal(plain, k, c, r).image;
    const auto s = spectral::fftshift(spectral::fft2d(img), spectral::ShiftDirection::forward);
    std::vector<double> gain;
    for (int j = 0; j < c.classes; ++j) gain.push_back(annulus_energy(s, 8 + 4 * j) / annulus_energy(base, 8 + 4 * j));
    CHECK(std::max_element(gain.begin(), gain.end()) - gain.begin() == k);
  }
}

TEST_CASE("local motifs touch at most three 16x16 stamps") {
  auto c = tiny(128);
  c.signal = Signal::local_patch;
  auto rng = image_rng(c.seed, 5);
  const auto plain = generate_dead_leaves(c, rng);
  auto r = image_rng(c.seed, 6);
  const auto img = plant_signal(plain, 2, c, r).image;
  int changed = 0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) {
      bool diff = false;
      for (int ch = 0; ch < 3; ++ch) diff = diff || img.at(ch, y, x) != plain.at(ch, y, x);
      changed += diff;
    }
  CHECK(changed > 0);
  CHECK(changed <= kMotifCount * kMotifSide * kMotifSide);
}

TEST_CASE("zero grating amplitude leaves the image unchanged") {
  auto c = tiny(64);
  c.signal = Signal::global_frequency;
  c.grating_amplitude = 0;
  auto rng = image_rng(c.seed, 7);
  const auto plain = generate_dead_leaves(c, rng);
  auto r = image_rng(c.seed, 8);
  CHECK(plant_signal(plain, 1, c, r).image == plain);
  CHECK_THROWS_AS(plant_signal(plain, 3, c, r), InvalidArgument);
}

TEST_CASE("dataset counts and stratified split") {
  const auto ds = make_dataset(tiny(16, 50));
  CHECK(ds.images.size() == 150);
  CHECK(ds.split.train.size() == 120);
  CHECK(ds.split.test.size() == 30);
  std::vector<int> test_per_class(3), train_per_class(3);
  for (const auto& id : ds.split.test) ++test_per_class[ds.find(id).label];
  for (const auto& id : ds.split.train) ++train_per_class[ds.find(id).label];
  CHECK(test_per_class == std::vector<int>{10, 10, 10});
  CHECK(train_per_class == std::vector<int>{40, 40, 40});

  std::set<std::string> all(ds.split.train.begin(), ds.split.train.end());
  for (const auto& id : ds.split.test) CHECK(all.insert(id).second);
  CHECK(all.size() == ds.images.size());
  CHECK(std::is_sorted(ds.split.test.begin(), ds.split.test.end()));
  CHECK(image_id(7) == "img_0007");
  CHECK_THROWS(ds.find("img_9999"));
}

TEST_CASE("split proportions hold within one item") {
  for (int n : {5, 7, 9, 13}) {
    const auto ds = make_dataset(tiny(16, n));
    std::vector<int> per(3);
    for (const auto& id : ds.split.test) ++per[ds.find(id).label];
    for (int p : per) CHECK(std::abs(p - 0.2 * n) <= 1);
  }
}

TEST_CASE("dataset generation is a pure function of config and seed") {
  const auto a = make_dataset(tiny(16, 10));
  const auto b = make_dataset(tiny(16, 10));
  CHECK(a.split.test == b.split.test);
  for (std::size_t i = 0; i < a.images.size(); ++i) CHECK(a.images[i].image == b.images[i].image);
  auto c2 = tiny(16, 10);
  c2.seed = 12;
  CHECK(make_dataset(c2).images[0].image != a.images[0].image);
}

TEST_CASE("persist and load round trip") {
  TempDir dir("persist");
  const auto ds = make_dataset(tiny(16, 5));
  persist_dataset(ds, dir.path);

  std::ifstream man(dir.path / "manifest.csv");
  std::string line;
  std::getline(man, line);
  CHECK(line == "id,label,split");
  int rows = 0;
  while (std::getline(man, line)) rows += !line.empty();
  CHECK(rows == 15);

  const auto back = load_dataset(dir.path);
  CHECK(back.classes == 3);
  CHECK(back.split.train == ds.split.train);
  CHECK(back.split.test == ds.split.test);
  REQUIRE(back.images.size() == ds.images.size());
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    CHECK(back.images[i].id == ds.images[i].id);
    CHECK(back.images[i].label == ds.images[i].label);
    CHECK(back.images[i].image == ds.images[i].image);
  }

  SUBCASE("missing file names the id") {
    fs::remove(dir.path / "images" / "img_0003.fmt");
    try {
      load_dataset(dir.path);
      FAIL("expected an error");
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find("img_0003") != std::string::npos);
    }
  }
  SUBCASE("truncated payload reports an offset") {
    const auto f = dir.path / "images" / "img_0004.fmt";
    fs::resize_file(f, fs::file_size(f) - 9);
    try {
      load_dataset(dir.path);
      FAIL("expected an error");
    } catch (const std::exception& e) {
      const std::string msg = e.what();
      CHECK(msg.find("img_0004") != std::string::npos);
      CHECK(msg.find("offset") != std::string::npos);
    }
  }
}
