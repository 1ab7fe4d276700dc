#pragma once

#include <string>
#include <vector>

#include "fftmil/data/dataset.hpp"
#include "fftmil/fft_block/block.hpp"
#include "fftmil/harness/config.hpp"
#include "fftmil/mil/patch_encoder.hpp"
#include "fftmil/spectral/image.hpp"

namespace fftmil::harness {

/// Complex crop selected by cfg.region (after downsampling). Region both
/// stacks the low and high crops along channels.
spectral::Spectrum complex_crop(const spectral::SpatialImage& img, const ExperimentConfig& cfg);

/// Real network input for design E: the packed magnitude/phase crop filtered
/// by cfg.spectra, or the alternative transform's output.
spectral::FrequencyCrop frequency_input(const spectral::SpatialImage& img, const ExperimentConfig& cfg);

/// Everything a model needs for one slide, precomputed once.
struct PreparedSample {
  std::string id;
  int label = 0;
  int channels = 0;  // real channels for design E, complex channels otherwise
  std::vector<float> packed;
  std::vector<float> re, im;
  mil::PatchBag bag;
};

struct PreparedData {
  int classes = 0;
  int image_channels = 0;
  int crop = 0;
  std::vector<PreparedSample> train, test;
};

mil::PatchEncoder make_encoder(const ExperimentConfig& cfg, int image_channels);

/// Bags for every image of `ds`, in dataset order. They only depend on the
/// patch size and encoder seed, so ablations reuse them.
std::vector<mil::PatchBag> encode_bags(const data::Dataset& ds, const ExperimentConfig& cfg);

/// `bags` may be empty (they are then computed) or the output of encode_bags.
PreparedData prepare_data(const data::Dataset& ds, const ExperimentConfig& cfg,
                          const std::vector<mil::PatchBag>& bags = {});

template <class T>
fft_block::BlockInput<T> block_input(const PreparedSample& s, int crop, bool complex_input);

}  // namespace fftmil::harness
