#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fftmil/spectral/image.hpp"

namespace fftmil::data {

enum class ShapeKind { disc, rectangle };
enum class Signal { none, global_frequency, local_patch, both };

ShapeKind parse_shape_kind(std::string_view s);
const char* to_string(ShapeKind k);
Signal parse_signal(std::string_view s);
const char* to_string(Signal s);

struct SyntheticConfig {
  int image_side = 512;
  int channels = 3;
  int classes = 3;
  int per_class = 50;
  double alpha = 3.0;
  ShapeKind shape_kind = ShapeKind::disc;
  Signal signal = Signal::both;
  double grating_amplitude = 0.05;
  /// Blend weight of the stamped motifs (1 = opaque).
  double motif_strength = 0.35;
  std::uint64_t seed = 0;
};

/// Throws InvalidArgument unless alpha > 1, the side is a power of two and
/// the counts are sane.
void validate(const SyntheticConfig& cfg);

/// Stream for image `index` of a dataset built from `seed`; independent of
/// how many other images are generated or in which order.
std::mt19937_64 image_rng(std::uint64_t seed, std::uint64_t index);

/// Radius drawn from p(r) ~ r^-alpha on [r_min, r_max] by inverse CDF.
double sample_radius(double u, double alpha, double r_min, double r_max);

/// Opaque shapes with power-law radii on [2, side/4] and uniform per-channel
/// intensity. Each new shape only paints pixels still uncovered, until 99%
/// of the image is covered; the remainder gets one background intensity.
/// Values are rounded to float32 so that files round-trip exactly.
spectral::SpatialImage generate_dead_leaves(const SyntheticConfig& cfg, std::mt19937_64& rng);

struct LabeledImage {
  spectral::SpatialImage image;
  int label = 0;
  std::string id;
};

/// Grating wavelength in pixels and orientation in radians for class k.
double grating_wavelength(int side, int k);
double grating_angle(int k);

/// 16 x 16 motif for class k, values in {0, 1}.
std::vector<double> class_motif(int k);
inline constexpr int kMotifSide = 16;
inline constexpr int kMotifCount = 3;

/// Adds the class signal selected by cfg.signal. Results are clamped to
/// [0,1] and rounded to float32.
LabeledImage plant_signal(spectral::SpatialImage img, int label, const SyntheticConfig& cfg,
                          std::mt19937_64& rng);

}  // namespace fftmil::data
