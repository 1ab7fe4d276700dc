#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fftmil::spectral {

struct Dims {
  int height = 0;
  int width = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Real-valued C x H x W raster, row-major per channel. Used for the input
/// images as well as every real tensor derived from them (magnitude, phase,
/// DCT coefficients, ...).
class SpatialImage {
 public:
  SpatialImage() = default;
  SpatialImage(int channels, int height, int width, double fill = 0.0);
  SpatialImage(int channels, int height, int width, std::vector<double> data);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  Dims dims() const { return {height_, width_}; }
  std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<double> channel(int c);
  std::span<const double> channel(int c) const;
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Throws InvalidArgument naming the first channel holding a NaN/Inf.
  void require_finite(const char* what) const;

  friend bool operator==(const SpatialImage&, const SpatialImage&) = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Complex C x H x W frequency representation.
struct Spectrum {
  using value_type = std::complex<double>;

  Spectrum() = default;
  Spectrum(int channels, int height, int width);

  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<value_type> data;
  /// Zero frequency sits at (H/2, W/2) rather than (0, 0).
  bool centered = false;
  /// Produced by fft2d of a real image and not cropped since, so the inverse
  /// must come back real.
  bool from_real = false;

  Dims dims() const { return {height, width}; }
  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  value_type& at(int c, int u, int v) {
    return data[(static_cast<std::size_t>(c) * height + u) * width + v];
  }
  const value_type& at(int c, int u, int v) const {
    return data[(static_cast<std::size_t>(c) * height + u) * width + v];
  }
};

struct MagPhasePack {
  SpatialImage magnitude;  // >= 0
  SpatialImage phase;      // in [-pi, pi]
};

enum class CropDomain { frequency, spatial };

/// Network-ready real tensor. For the FFT path the first C channels are
/// magnitude and the last C are phase.
struct FrequencyCrop {
  SpatialImage data;
  int crop_size = 0;
  Dims source_dims;
  CropDomain domain = CropDomain::frequency;
};

}  // namespace fftmil::spectral
