#include "fftmil/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fftmil/error.hpp"
#include "fftmil/spectral/tensor_io.hpp"

namespace fftmil::data {

ShapeKind parse_shape_kind(std::string_view s) {
  if (s == "disc") return ShapeKind::disc;
  if (s == "rectangle") return ShapeKind::rectangle;
  throw InvalidArgument("unknown shape kind '" + std::string(s) + "' (expected disc, rectangle)");
}

const char* to_string(ShapeKind k) { return k == ShapeKind::disc ? "disc" : "rectangle"; }

Signal parse_signal(std::string_view s) {
  if (s == "none") return Signal::none;
  if (s == "global_frequency") return Signal::global_frequency;
  if (s == "local_patch") return Signal::local_patch;
  if (s == "both") return Signal::both;
  throw InvalidArgument("unknown signal '" + std::string(s) +
                        "' (expected none, global_frequency, local_patch, both)");
}

const char* to_string(Signal s) {
  switch (s) {
    case Signal::none: return "none";
    case Signal::global_frequency: return "global_frequency";
    case Signal::local_patch: return "local_patch";
    case Signal::both: return "both";
  }
  return "?";
}

void validate(const SyntheticConfig& cfg) {
  if (!(cfg.alpha > 1.0)) throw InvalidArgument("alpha must be > 1");
  if (cfg.image_side < 16 || (cfg.image_side & (cfg.image_side - 1)))
    throw InvalidArgument("image_side must be a power of two >= 16, got " + std::to_string(cfg.image_side));
  if (cfg.channels < 1) throw InvalidArgument("channels must be >= 1");
  if (cfg.classes < 2) throw InvalidArgument("classes must be >= 2");
  if (cfg.per_class < 1) throw InvalidArgument("per_class must be >= 1");
  if (cfg.grating_amplitude < 0) throw InvalidArgument("grating amplitude must be >= 0");
  if (cfg.motif_strength < 0 || cfg.motif_strength > 1) throw InvalidArgument("motif strength must lie in [0,1]");
}

std::mt19937_64 image_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

double sample_radius(double u, double alpha, double r_min, double r_max) {
  const double e = 1.0 - alpha;
  const double a = std::pow(r_min, e);
  const double b = std::pow(r_max, e);
  return std::pow(a + u * (b - a), 1.0 / e);
}

spectral::SpatialImage generate_dead_leaves(const SyntheticConfig& cfg, std::mt19937_64& rng) {
  validate(cfg);
  const int side = cfg.image_side;
  const int C = cfg.channels;
  const double r_min = 2.0;
  const double r_max = side / 4.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  spectral::SpatialImage img(C, side, side);
  std::vector<unsigned char> covered(static_cast<std::size_t>(side) * side, 0);
  const std::size_t target = static_cast<std::size_t>(std::ceil(0.99 * side * side));
  std::size_t count = 0;
  std::vector<double> color(C);

  while (count < target) {
    const double r = sample_radius(unit(rng), cfg.alpha, r_min, r_max);
    const double cx = unit(rng) * side;
    const double cy = unit(rng) * side;
    for (auto& c : color) c = unit(rng);
    // rectangles get an independent second half-extent
    const double ry = cfg.shape_kind == ShapeKind::rectangle ? sample_radius(unit(rng), cfg.alpha, r_min, r_max) : r;
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
    const int y1 = std::min(side - 1, static_cast<int>(std::ceil(cy + ry)));
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x1 = std::min(side - 1, static_cast<int>(std::ceil(cx + r)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        const bool inside = cfg.shape_kind == ShapeKind::disc ? dx * dx + dy * dy <= r * r
                                                               : std::abs(dx) <= r && std::abs(dy) <= ry;
        unsigned char& cov = covered[static_cast<std::size_t>(y) * side + x];
        if (!inside || cov) continue;
        cov = 1;
        ++count;
        for (int c = 0; c < C; ++c) img.at(c, y, x) = color[c];
      }
  }
  for (auto& c : color) c = unit(rng);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      if (!covered[static_cast<std::size_t>(y) * side + x])
        for (int c = 0; c < C; ++c) img.at(c, y, x) = color[c];
  spectral::round_to_float32(img);
  return img;
}

double grating_wavelength(int side, int k) { return static_cast<double>(side) / (8 + 4 * k); }

double grating_angle(int k) { return std::numbers::pi / 4 * k; }

std::vector<double> class_motif(int k) {
  // 4x4 random binary blocks, each 4x4 pixels; fixed per class.
  std::mt19937_64 rng(0xC1A55ULL + 7919ULL * static_cast<std::uint64_t>(k));
  std::bernoulli_distribution bit(0.5);
  std::vector<double> cells(16);
  for (auto& c : cells) c = bit(rng) ? 1.0 : 0.0;
  std::vector<double> m(kMotifSide * kMotifSide);
  for (int y = 0; y < kMotifSide; ++y)
    for (int x = 0; x < kMotifSide; ++x) m[y * kMotifSide + x] = cells[(y / 4) * 4 + x / 4];
  return m;
}

LabeledImage plant_signal(spectral::SpatialImage img, int label, const SyntheticConfig& cfg,
                          std::mt19937_64& rng) {
  if (label < 0 || label >= cfg.classes)
    throw InvalidArgument("label " + std::to_string(label) + " outside [0," + std::to_string(cfg.classes) + ")");
  const int H = img.height();
  const int W = img.width();
  const bool global = cfg.signal == Signal::global_frequency || cfg.signal == Signal::both;
  const bool local = cfg.signal == Signal::local_patch || cfg.signal == Signal::both;

  if (global && cfg.grating_amplitude > 0) {
    const double lambda = grating_wavelength(std::max(H, W), label);
    const double th = grating_angle(label);
    const double kx = 2 * std::numbers::pi * std::cos(th) / lambda;
    const double ky = 2 * std::numbers::pi * std::sin(th) / lambda;
    for (int c = 0; c < img.channels(); ++c)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
          img.at(c, y, x) = std::clamp(img.at(c, y, x) + cfg.grating_amplitude * std::sin(kx * x + ky * y), 0.0, 1.0);
  }
  if (local && cfg.motif_strength > 0 && H >= kMotifSide && W >= kMotifSide) {
    const auto motif = class_motif(label);
    std::uniform_int_distribution<int> py(0, H - kMotifSide);
    std::uniform_int_distribution<int> px(0, W - kMotifSide);
    const double s = cfg.motif_strength;
    for (int m = 0; m < kMotifCount; ++m) {
      const int oy = py(rng);
      const int ox = px(rng);
      for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < kMotifSide; ++y)
          for (int x = 0; x < kMotifSide; ++x) {
            double& v = img.at(c, oy + y, ox + x);
            v = (1 - s) * v + s * motif[y * kMotifSide + x];
          }
    }
  }
  if (global || local) spectral::round_to_float32(img);
  return {std::move(img), label, {}};
}

}  // namespace fftmil::data
