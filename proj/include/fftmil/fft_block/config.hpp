#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fftmil/autodiff/ops.hpp"

namespace fftmil::fft_block {

/// Architecture variants. A-D are the vanilla (iFFT after every conv)
/// family, E is the proposed block, F-I are its complex-valued relatives.
enum class Design { A, B, C, D, E, F, G, H, I };

Design parse_design(std::string_view tag);
char design_char(Design d);
std::string to_string(Design d);
const std::vector<Design>& all_designs();

/// E consumes the packed magnitude/phase crop; every other design consumes
/// the complex crop directly.
bool uses_complex_input(Design d);

struct FFTBlockConfig {
  Design design = Design::E;
  int cnn_layers = 8;
  int max_channels = 32;
  /// Real channels of the packed input for E (2C), complex channels otherwise (C).
  int input_channels = 6;
  int crop_size = 2048;
  int output_dim = 512;
  /// 0 picks 8 * max_channels.
  int mlp_hidden = 0;
  /// Feature normalization between CNN and MLP (designs E and F).
  ad::NormMode norm = ad::NormMode::minmax;
  /// Conventional spatial CNN (batch norm in every layer, no feature
  /// normalization) for spatial-domain inputs such as the wavelet LL band.
  bool spatial_cnn = false;
  std::uint64_t seed = 0;

  int resolved_mlp_hidden() const { return mlp_hidden > 0 ? mlp_hidden : 8 * max_channels; }
};

/// Same config with max_channels reduced to 6.
FFTBlockConfig mini_config(FFTBlockConfig base);

/// Output channels per layer: 4, 8, 16, ... capped at max_channels.
std::vector<int> channel_schedule(const FFTBlockConfig& cfg);

/// Spatial side of the final feature map.
int final_side(const FFTBlockConfig& cfg);

/// Throws InvalidArgument on a bad config, including a crop that cannot be
/// halved cnn_layers times (the message names the minimum legal size).
void validate(const FFTBlockConfig& cfg);

}  // namespace fftmil::fft_block
