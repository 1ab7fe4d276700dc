#include "fftmil/fft_block/config.hpp"

#include <algorithm>

#include "fftmil/error.hpp"

namespace fftmil::fft_block {

Design parse_design(std::string_view tag) {
  if (tag.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(tag[0])));
    if (c >= 'A' && c <= 'I') return static_cast<Design>(c - 'A');
  }
  throw InvalidArgument("unknown fft design '" + std::string(tag) + "' (expected A..I)");
}

char design_char(Design d) { return static_cast<char>('A' + static_cast<int>(d)); }

std::string to_string(Design d) { return std::string(1, design_char(d)); }

const std::vector<Design>& all_designs() {
  static const std::vector<Design> v{Design::A, Design::B, Design::C, Design::D, Design::E,
                                     Design::F, Design::G, Design::H, Design::I};
  return v;
}

bool uses_complex_input(Design d) { return d != Design::E; }

FFTBlockConfig mini_config(FFTBlockConfig base) {
  base.max_channels = 6;
  return base;
}

std::vector<int> channel_schedule(const FFTBlockConfig& cfg) {
  std::vector<int> out;
  int c = std::min(4, cfg.max_channels);
  for (int l = 0; l < cfg.cnn_layers; ++l) {
    out.push_back(c);
    c = std::min(2 * c, cfg.max_channels);
  }
  return out;
}

int final_side(const FFTBlockConfig& cfg) { return cfg.crop_size >> cfg.cnn_layers; }

void validate(const FFTBlockConfig& cfg) {
  if (cfg.cnn_layers < 1) throw InvalidArgument("fft block: cnn_layers must be >= 1");
  if (cfg.cnn_layers > 20) throw InvalidArgument("fft block: cnn_layers too large");
  if (cfg.max_channels < 1) throw InvalidArgument("fft block: max_channels must be >= 1");
  if (cfg.input_channels < 1) throw InvalidArgument("fft block: input_channels must be >= 1");
  if (cfg.output_dim < 1) throw InvalidArgument("fft block: output_dim must be >= 1");
  if (cfg.mlp_hidden < 0) throw InvalidArgument("fft block: mlp_hidden must be >= 0");
  const int step = 1 << cfg.cnn_layers;
  if (cfg.crop_size < step || cfg.crop_size % step != 0)
    throw InvalidArgument("fft block: crop " + std::to_string(cfg.crop_size) + " is too small for " +
                          std::to_string(cfg.cnn_layers) + " pooling layers; the crop must be a multiple of " +
                          std::to_string(step) + " (minimum legal size " + std::to_string(step) + ")");
}

}  // namespace fftmil::fft_block
