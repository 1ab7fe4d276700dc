#include "fftmil/spectral/image.hpp"

#include <cmath>
#include <string>

#include "fftmil/error.hpp"

namespace fftmil::spectral {

namespace {
void check_dims(int c, int h, int w) {
  if (c < 1 || h < 1 || w < 1)
    throw InvalidArgument("image dims must be positive, got C=" + std::to_string(c) +
                          " H=" + std::to_string(h) + " W=" + std::to_string(w));
}
}  // namespace

SpatialImage::SpatialImage(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  check_dims(channels, height, width);
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

SpatialImage::SpatialImage(int channels, int height, int width, std::vector<double> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  check_dims(channels, height, width);
  if (data_.size() != static_cast<std::size_t>(channels) * height * width)
    throw InvalidArgument("image payload has " + std::to_string(data_.size()) +
                          " values, expected " +
                          std::to_string(static_cast<std::size_t>(channels) * height * width));
}

std::span<double> SpatialImage::channel(int c) {
  return std::span<double>(data_).subspan(c * plane_size(), plane_size());
}

std::span<const double> SpatialImage::channel(int c) const {
  return std::span<const double>(data_).subspan(c * plane_size(), plane_size());
}

void SpatialImage::require_finite(const char* what) const {
  for (int c = 0; c < channels_; ++c)
    for (double v : channel(c))
      if (!std::isfinite(v))
        throw InvalidArgument(std::string(what) + ": non-finite value in channel " +
                              std::to_string(c));
}

Spectrum::Spectrum(int c, int h, int w) : channels(c), height(h), width(w) {
  check_dims(c, h, w);
  data.assign(static_cast<std::size_t>(c) * h * w, value_type{});
}

}  // namespace fftmil::spectral
