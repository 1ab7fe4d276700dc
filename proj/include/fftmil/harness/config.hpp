#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fftmil/autodiff/ops.hpp"
#include "fftmil/fft_block/config.hpp"
#include "fftmil/mil/model.hpp"

namespace fftmil::harness {

enum class Spectra { magnitude, phase, both };
enum class Region { low, high, both };
enum class Transform { fft, rfft, dct, dct_abs, dwt };
enum class Selection { macro_f1, weighted_f1 };

Spectra parse_spectra(std::string_view s);
const char* to_string(Spectra s);
Region parse_region(std::string_view s);
const char* to_string(Region r);
Transform parse_transform(std::string_view s);
const char* to_string(Transform t);
Selection parse_selection(std::string_view s);
const char* to_string(Selection s);

/// Every knob of one experiment. Defaults are the desk-scale settings.
struct ExperimentConfig {
  std::string dataset;
  std::string out_dir = "out";

  mil::Branch branch = mil::Branch::both;
  mil::Fusion fusion = mil::Fusion::addition;
  fft_block::Design design = fft_block::Design::E;

  int crop_size = 64;
  int downsample = 1;
  Spectra spectra = Spectra::both;
  Region region = Region::low;
  ad::NormMode normalization = ad::NormMode::minmax;
  Transform transform = Transform::fft;

  int cnn_layers = 5;
  int max_channels = 32;
  int mlp_hidden = 0;  // 0 = 8 * max_channels
  int embed_dim = 512;
  int attn_hidden = 128;
  int patch_size = 64;
  std::uint64_t encoder_seed = 1234;

  int epochs = 30;
  double lr = 1e-4;
  std::vector<std::uint64_t> seeds{0};
  Selection selection = Selection::macro_f1;

  /// Values for the ablation axes that take numbers.
  std::vector<int> crop_values{32, 64, 128};
  std::vector<int> downsample_values{1, 2, 4};

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Raised for anything the user got wrong in a config file or flag; the CLI
/// maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Applies one key=value setting. Unknown keys and bad values raise ConfigError.
void set_option(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text, '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> parse_key_values(std::string_view text);
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

/// Cross-field checks (seeds non-empty, alternative transforms only with
/// design E, ...). Raises ConfigError.
void validate(const ExperimentConfig& cfg);

/// Every field, as key=value pairs in a fixed order.
std::vector<std::pair<std::string, std::string>> to_key_values(const ExperimentConfig& cfg);
std::string to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(std::string_view json);

/// Channels of the frequency input for this config and source channel count.
int frequency_input_channels(const ExperimentConfig& cfg, int image_channels);
fft_block::FFTBlockConfig block_config(const ExperimentConfig& cfg, int image_channels, std::uint64_t seed);
mil::ModelConfig model_config(const ExperimentConfig& cfg, int image_channels, int classes, std::uint64_t seed);

/// FNV-1a over the fields that shape the model's parameters.
std::uint64_t config_hash(const ExperimentConfig& cfg, int image_channels, int classes);

}  // namespace fftmil::harness
