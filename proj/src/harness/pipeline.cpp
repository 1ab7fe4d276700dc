#include "fftmil/harness/pipeline.hpp"

#include <map>

#include "fftmil/error.hpp"
#include "fftmil/spectral/alt_transforms.hpp"
#include "fftmil/spectral/transforms.hpp"

namespace fftmil::harness {

using spectral::Spectrum;
using spectral::SpatialImage;

namespace {

Spectrum stack_channels(const Spectrum& a, const Spectrum& b) {
  Spectrum out(a.channels + b.channels, a.height, a.width);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
  out.centered = a.centered;
  return out;
}

SpatialImage select_channels(const SpatialImage& img, int first, int count) {
  SpatialImage out(count, img.height(), img.width());
  for (int c = 0; c < count; ++c) {
    const auto src = img.channel(first + c);
    std::copy(src.begin(), src.end(), out.channel(c).begin());
  }
  return out;
}

SpatialImage apply_spectra(const SpatialImage& packed, Spectra s) {
  // packed holds all magnitude channels, then all phase channels
  const int C = packed.channels() / 2;
  if (s == Spectra::magnitude) return select_channels(packed, 0, C);
  if (s == Spectra::phase) return select_channels(packed, C, C);
  return packed;
}

}  // namespace

Spectrum complex_crop(const SpatialImage& img, const ExperimentConfig& cfg) {
  const SpatialImage src = spectral::pad_to_even(spectral::downsample(img, cfg.downsample));
  const Spectrum F = spectral::fft2d(src);
  auto low = [&] { return spectral::center_crop_pad(spectral::fftshift(F, spectral::ShiftDirection::forward), cfg.crop_size); };
  // Cropping the middle of the un-shifted array keeps the highest frequencies.
  auto high = [&] { return spectral::recenter_window(F, cfg.crop_size, cfg.crop_size); };
  switch (cfg.region) {
    case Region::low: return low();
    case Region::high: return high();
    case Region::both: return stack_channels(low(), high());
  }
  return low();
}

spectral::FrequencyCrop frequency_input(const SpatialImage& img, const ExperimentConfig& cfg) {
  const SpatialImage src = spectral::downsample(img, cfg.downsample);
  spectral::FrequencyCrop out;
  switch (cfg.transform) {
    case Transform::fft: {
      const Spectrum crop = complex_crop(img, cfg);
      // For region both this is [mag_low, mag_high | ph_low, ph_high], still
      // magnitude-then-phase, so the spectra filter below works unchanged.
      out = spectral::pack_crop(spectral::mag_phase(crop), src.dims());
      out.data = apply_spectra(out.data, cfg.spectra);
      return out;
    }
    case Transform::rfft:
      out = spectral::alt_transform(src, spectral::AltMode::rfft, cfg.crop_size);
      out.data = apply_spectra(out.data, cfg.spectra);
      return out;
    case Transform::dct: return spectral::alt_transform(src, spectral::AltMode::dct, cfg.crop_size);
    case Transform::dct_abs: return spectral::alt_transform(src, spectral::AltMode::dct_abs, cfg.crop_size);
    case Transform::dwt: return spectral::alt_transform(src, spectral::AltMode::dwt_ll, cfg.crop_size);
  }
  return out;
}

mil::PatchEncoder make_encoder(const ExperimentConfig& cfg, int image_channels) {
  return mil::PatchEncoder(image_channels, cfg.patch_size, cfg.embed_dim, cfg.encoder_seed);
}

std::vector<mil::PatchBag> encode_bags(const data::Dataset& ds, const ExperimentConfig& cfg) {
  if (ds.images.empty()) throw InvalidArgument("dataset is empty");
  const auto enc = make_encoder(cfg, ds.images.front().image.channels());
  std::vector<mil::PatchBag> bags;
  bags.reserve(ds.images.size());
  for (const auto& im : ds.images) {
    bags.push_back(enc.encode(im.image));
    bags.back().label = im.label;
    bags.back().slide_id = im.id;
  }
  return bags;
}

PreparedData prepare_data(const data::Dataset& ds, const ExperimentConfig& cfg, const std::vector<mil::PatchBag>& bags_in) {
  if (ds.images.empty()) throw InvalidArgument("dataset is empty");
  const bool need_bags = cfg.branch != mil::Branch::frequency;
  const bool need_freq = cfg.branch != mil::Branch::spatial;
  std::vector<mil::PatchBag> computed;
  if (need_bags && bags_in.empty()) computed = encode_bags(ds, cfg);
  const auto& bags = bags_in.empty() ? computed : bags_in;
  if (need_bags && bags.size() != ds.images.size()) throw InvalidArgument("prepare_data: bag count mismatch");

  PreparedData out;
  out.classes = ds.classes;
  out.image_channels = ds.images.front().image.channels();
  out.crop = cfg.crop_size;
  const bool complex_in = fft_block::uses_complex_input(cfg.design);

  std::map<std::string, bool> is_test;
  for (const auto& id : ds.split.train) is_test[id] = false;
  for (const auto& id : ds.split.test) is_test[id] = true;

  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    const auto& im = ds.images[i];
    auto it = is_test.find(im.id);
    if (it == is_test.end()) continue;
    PreparedSample s;
    s.id = im.id;
    s.label = im.label;
    if (need_bags) s.bag = bags[i];
    if (need_freq) {
      if (complex_in) {
        const Spectrum z = complex_crop(im.image, cfg);
        s.channels = z.channels;
        s.re.resize(z.data.size());
        s.im.resize(z.data.size());
        for (std::size_t k = 0; k < z.data.size(); ++k) {
          s.re[k] = static_cast<float>(z.data[k].real());
          s.im[k] = static_cast<float>(z.data[k].imag());
        }
      } else {
        const auto crop = frequency_input(im.image, cfg);
        s.channels = crop.data.channels();
        s.packed.assign(crop.data.data().begin(), crop.data.data().end());
      }
    }
    (it->second ? out.test : out.train).push_back(std::move(s));
  }
  return out;
}

template <class T>
fft_block::BlockInput<T> block_input(const PreparedSample& s, int crop, bool complex_input) {
  fft_block::BlockInput<T> in;
  const ad::Shape shape{1, s.channels, crop, crop};
  if (complex_input) {
    in.spectrum.re = ad::Var<T>::constant(shape, std::vector<T>(s.re.begin(), s.re.end()));
    in.spectrum.im = ad::Var<T>::constant(shape, std::vector<T>(s.im.begin(), s.im.end()));
  } else {
    in.packed = ad::Var<T>::constant(shape, std::vector<T>(s.packed.begin(), s.packed.end()));
  }
  return in;
}

template fft_block::BlockInput<float> block_input<float>(const PreparedSample&, int, bool);
template fft_block::BlockInput<double> block_input<double>(const PreparedSample&, int, bool);

}  // namespace fftmil::harness
