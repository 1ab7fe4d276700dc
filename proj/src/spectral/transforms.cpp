#include "fftmil/spectral/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fftmil/error.hpp"
#include "fftmil/spectral/fft.hpp"

namespace fftmil::spectral {

Spectrum fft2d(const SpatialImage& img) {
  img.require_finite("fft2d");
  Spectrum out(img.channels(), img.height(), img.width());
  const auto src = img.data();
  for (std::size_t i = 0; i < src.size(); ++i) out.data[i] = {src[i], 0.0};
  fft2d_planes<double>(out.data, img.channels(), img.height(), img.width(), false);
  out.centered = false;
  out.from_real = true;
  return out;
}

SpatialImage ifft2d(const Spectrum& spec) {
  if (spec.centered)
    throw InvalidArgument("ifft2d: spectrum is centered; apply fftshift(inverse) first");
  std::vector<std::complex<double>> work = spec.data;
  fft2d_planes<double>(work, spec.channels, spec.height, spec.width, true);
  const double scale = 1.0 / static_cast<double>(spec.plane_size());

  double max_real = 0.0;
  double max_imag = 0.0;
  std::vector<double> real(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    real[i] = work[i].real() * scale;
    max_real = std::max(max_real, std::abs(real[i]));
    max_imag = std::max(max_imag, std::abs(work[i].imag() * scale));
  }
  if (spec.from_real && max_imag > 1e-6 * max_real && max_imag > 1e-300)
    throw ContractViolation("ifft2d: imaginary residue " + std::to_string(max_imag) +
                            " exceeds 1e-6 * max|real| (" + std::to_string(max_real) +
                            ") for a spectrum of a real image");
  return SpatialImage(spec.channels, spec.height, spec.width, std::move(real));
}

Spectrum fftshift(const Spectrum& spec, ShiftDirection direction) {
  Spectrum out = spec;
  const int H = spec.height;
  const int W = spec.width;
  const int sh = H / 2;
  const int sw = W / 2;
  for (int c = 0; c < spec.channels; ++c)
    for (int u = 0; u < H; ++u)
      for (int v = 0; v < W; ++v) {
        if (direction == ShiftDirection::forward)
          out.at(c, (u + sh) % H, (v + sw) % W) = spec.at(c, u, v);
        else
          out.at(c, u, v) = spec.at(c, (u + sh) % H, (v + sw) % W);
      }
  out.centered = direction == ShiftDirection::forward;
  return out;
}

Spectrum recenter_window(const Spectrum& spec, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw InvalidArgument("recenter_window: empty window");
  Spectrum out(spec.channels, out_h, out_w);
  out.centered = spec.centered;
  out.from_real = false;
  const int off_u = spec.height / 2 - out_h / 2;
  const int off_v = spec.width / 2 - out_w / 2;
  for (int c = 0; c < spec.channels; ++c)
    for (int i = 0; i < out_h; ++i) {
      const int u = i + off_u;
      if (u < 0 || u >= spec.height) continue;
      for (int j = 0; j < out_w; ++j) {
        const int v = j + off_v;
        if (v < 0 || v >= spec.width) continue;
        out.at(c, i, j) = spec.at(c, u, v);
      }
    }
  return out;
}

Spectrum center_crop_pad(const Spectrum& spec, int crop) {
  if (!spec.centered) throw InvalidArgument("center_crop_pad: spectrum must be centered");
  if (crop <= 0 || crop % 2 != 0)
    throw InvalidArgument("center_crop_pad: crop must be positive and even, got " +
                          std::to_string(crop));
  if (crop == spec.height && crop == spec.width) return spec;
  return recenter_window(spec, crop, crop);
}

MagPhasePack mag_phase(const Spectrum& spec) {
  MagPhasePack mp{SpatialImage(spec.channels, spec.height, spec.width),
                  SpatialImage(spec.channels, spec.height, spec.width)};
  auto mag = mp.magnitude.data();
  auto ph = mp.phase.data();
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    const auto z = spec.data[i];
    mag[i] = std::hypot(z.real(), z.imag());
    ph[i] = (z.real() == 0.0 && z.imag() == 0.0) ? 0.0 : std::atan2(z.imag(), z.real());
  }
  return mp;
}

FrequencyCrop pack_crop(const MagPhasePack& mp, Dims source_dims) {
  const auto& m = mp.magnitude;
  const auto& p = mp.phase;
  if (m.channels() != p.channels() || m.height() != p.height() || m.width() != p.width())
    throw InvalidArgument("pack_crop: magnitude and phase shapes differ");
  const int C = m.channels();
  SpatialImage packed(2 * C, m.height(), m.width());
  auto dst = packed.data();
  std::copy(m.data().begin(), m.data().end(), dst.begin());
  std::copy(p.data().begin(), p.data().end(), dst.begin() + m.size());
  return FrequencyCrop{std::move(packed), m.height(), source_dims, CropDomain::frequency};
}

MagPhasePack unpack_crop(const FrequencyCrop& crop) {
  const auto& d = crop.data;
  if (d.channels() % 2 != 0) throw InvalidArgument("unpack_crop: odd channel count");
  const int C = d.channels() / 2;
  const std::size_t half = static_cast<std::size_t>(C) * d.plane_size();
  std::vector<double> mag(d.data().begin(), d.data().begin() + half);
  std::vector<double> ph(d.data().begin() + half, d.data().end());
  return {SpatialImage(C, d.height(), d.width(), std::move(mag)),
          SpatialImage(C, d.height(), d.width(), std::move(ph))};
}

SpatialImage reconstruct_lowpass(const Spectrum& crop, Dims original_dims) {
  if (!crop.centered) throw InvalidArgument("reconstruct_lowpass: crop must be centered");
  if (original_dims.height < crop.height || original_dims.width < crop.width)
    throw InvalidArgument("reconstruct_lowpass: original dims smaller than the crop");
  const int work_h = original_dims.height + original_dims.height % 2;
  const int work_w = original_dims.width + original_dims.width % 2;
  Spectrum full = recenter_window(crop, work_h, work_w);
  full.centered = true;
  Spectrum uncentered = fftshift(full, ShiftDirection::inverse);
  uncentered.from_real = false;
  SpatialImage padded = ifft2d(uncentered);

  SpatialImage out(crop.channels, original_dims.height, original_dims.width);
  for (int c = 0; c < crop.channels; ++c)
    for (int y = 0; y < original_dims.height; ++y)
      for (int x = 0; x < original_dims.width; ++x)
        out.at(c, y, x) = std::clamp(padded.at(c, y, x), 0.0, 1.0);
  return out;
}

SpatialImage downsample(const SpatialImage& img, int factor) {
  if (factor < 1) throw InvalidArgument("downsample: factor must be >= 1");
  if (factor == 1) return img;
  const int out_h = (img.height() + factor - 1) / factor;
  const int out_w = (img.width() + factor - 1) / factor;
  SpatialImage out(img.channels(), out_h, out_w);
  const double inv_area = 1.0 / (static_cast<double>(factor) * factor);
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        out.at(c, y / factor, x / factor) += img.at(c, y, x) * inv_area;
  return out;
}

SpatialImage pad_to_even(const SpatialImage& img) {
  if (img.height() % 2 == 0 && img.width() % 2 == 0) return img;
  SpatialImage out(img.channels(), img.height() + img.height() % 2,
                   img.width() + img.width() % 2);
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) out.at(c, y, x) = img.at(c, y, x);
  return out;
}

}  // namespace fftmil::spectral
