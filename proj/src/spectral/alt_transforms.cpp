#include "fftmil/spectral/alt_transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fftmil/error.hpp"
#include "fftmil/spectral/transforms.hpp"

namespace fftmil::spectral {

AltMode parse_alt_mode(std::string_view name) {
  if (name == "rfft") return AltMode::rfft;
  if (name == "dct") return AltMode::dct;
  if (name == "dct_abs") return AltMode::dct_abs;
  if (name == "dwt_ll" || name == "dwt") return AltMode::dwt_ll;
  throw InvalidArgument("unknown transform mode '" + std::string(name) + "'");
}

const char* to_string(AltMode mode) {
  switch (mode) {
    case AltMode::rfft: return "rfft";
    case AltMode::dct: return "dct";
    case AltMode::dct_abs: return "dct_abs";
    case AltMode::dwt_ll: return "dwt_ll";
  }
  return "?";
}

Spectrum rfft2d(const SpatialImage& img) {
  const Spectrum full = fft2d(img);
  const int half_w = img.width() / 2 + 1;
  Spectrum out(img.channels(), img.height(), half_w);
  for (int c = 0; c < img.channels(); ++c)
    for (int u = 0; u < img.height(); ++u)
      for (int v = 0; v < half_w; ++v) out.at(c, u, v) = full.at(c, u, v);
  return out;
}

namespace {

// basis[k * n + i] = s(k) cos(pi (2i + 1) k / 2n) for k < keep
std::vector<double> dct_basis(int n, int keep) {
  std::vector<double> basis(static_cast<std::size_t>(keep) * n);
  const double s0 = std::sqrt(1.0 / n);
  const double s1 = std::sqrt(2.0 / n);
  for (int k = 0; k < keep; ++k)
    for (int i = 0; i < n; ++i)
      basis[static_cast<std::size_t>(k) * n + i] =
          (k == 0 ? s0 : s1) * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
  return basis;
}

}  // namespace

SpatialImage dct2d(const SpatialImage& img, int keep_rows, int keep_cols) {
  const int H = img.height();
  const int W = img.width();
  if (keep_rows <= 0) keep_rows = H;
  if (keep_cols <= 0) keep_cols = W;
  if (keep_rows > H || keep_cols > W) throw InvalidArgument("dct2d: keep exceeds image size");
  const auto bh = dct_basis(H, keep_rows);
  const auto bw = dct_basis(W, keep_cols);

  SpatialImage out(img.channels(), keep_rows, keep_cols);
  std::vector<double> rows(static_cast<std::size_t>(H) * keep_cols);
  for (int c = 0; c < img.channels(); ++c) {
    // along x: rows[y][l] = sum_x img[y][x] bw[l][x]
    for (int y = 0; y < H; ++y)
      for (int l = 0; l < keep_cols; ++l) {
        double acc = 0.0;
        const double* b = bw.data() + static_cast<std::size_t>(l) * W;
        for (int x = 0; x < W; ++x) acc += img.at(c, y, x) * b[x];
        rows[static_cast<std::size_t>(y) * keep_cols + l] = acc;
      }
    // along y
    for (int k = 0; k < keep_rows; ++k) {
      const double* b = bh.data() + static_cast<std::size_t>(k) * H;
      for (int l = 0; l < keep_cols; ++l) {
        double acc = 0.0;
        for (int y = 0; y < H; ++y) acc += rows[static_cast<std::size_t>(y) * keep_cols + l] * b[y];
        out.at(c, k, l) = acc;
      }
    }
  }
  return out;
}

SpatialImage haar_ll(const SpatialImage& img) {
  const SpatialImage even = pad_to_even(img);
  SpatialImage out(even.channels(), even.height() / 2, even.width() / 2);
  for (int c = 0; c < even.channels(); ++c)
    for (int y = 0; y < out.height(); ++y)
      for (int x = 0; x < out.width(); ++x)
        out.at(c, y, x) = 0.5 * (even.at(c, 2 * y, 2 * x) + even.at(c, 2 * y, 2 * x + 1) +
                                 even.at(c, 2 * y + 1, 2 * x) + even.at(c, 2 * y + 1, 2 * x + 1));
  return out;
}

SpatialImage resize_bilinear(const SpatialImage& img, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw InvalidArgument("resize_bilinear: empty target");
  SpatialImage out(img.channels(), out_h, out_w);
  const double sy = static_cast<double>(img.height()) / out_h;
  const double sx = static_cast<double>(img.width()) / out_w;
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double tx = fx - x0;
      for (int c = 0; c < img.channels(); ++c) {
        const double top = img.at(c, y0, x0) * (1 - tx) + img.at(c, y0, x1) * tx;
        const double bot = img.at(c, y1, x0) * (1 - tx) + img.at(c, y1, x1) * tx;
        out.at(c, y, x) = top * (1 - ty) + bot * ty;
      }
    }
  }
  return out;
}

FrequencyCrop alt_transform(const SpatialImage& img, AltMode mode, int crop) {
  if (crop <= 0) throw InvalidArgument("alt_transform: crop must be positive");
  img.require_finite("alt_transform");
  const Dims src = img.dims();
  switch (mode) {
    case AltMode::rfft: {
      const Spectrum half = rfft2d(img);
      if (crop > half.height || crop > half.width)
        throw InvalidArgument("alt_transform(rfft): crop " + std::to_string(crop) +
                              " exceeds half-spectrum " + std::to_string(half.height) + "x" +
                              std::to_string(half.width));
      Spectrum tl(half.channels, crop, crop);
      for (int c = 0; c < half.channels; ++c)
        for (int u = 0; u < crop; ++u)
          for (int v = 0; v < crop; ++v) tl.at(c, u, v) = half.at(c, u, v);
      return pack_crop(mag_phase(tl), src);
    }
    case AltMode::dct:
    case AltMode::dct_abs: {
      if (crop > img.height() || crop > img.width())
        throw InvalidArgument("alt_transform(dct): crop exceeds image size");
      SpatialImage coeffs = dct2d(img, crop, crop);
      if (mode == AltMode::dct_abs)
        for (double& v : coeffs.data()) v = std::abs(v);
      return FrequencyCrop{std::move(coeffs), crop, src, CropDomain::frequency};
    }
    case AltMode::dwt_ll: {
      const SpatialImage ll = haar_ll(img);
      return FrequencyCrop{resize_bilinear(ll, crop, crop), crop, src, CropDomain::spatial};
    }
  }
  throw InvalidArgument("alt_transform: unknown mode");
}

}  // namespace fftmil::spectral
