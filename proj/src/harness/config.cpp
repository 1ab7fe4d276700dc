#include "fftmil/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fftmil/error.hpp"

namespace fftmil::harness {

using json = nlohmann::ordered_json;

Spectra parse_spectra(std::string_view s) {
  if (s == "magnitude") return Spectra::magnitude;
  if (s == "phase") return Spectra::phase;
  if (s == "both") return Spectra::both;
  throw ConfigError("unknown spectra '" + std::string(s) + "' (expected magnitude, phase, both)");
}
const char* to_string(Spectra s) {
  return s == Spectra::magnitude ? "magnitude" : s == Spectra::phase ? "phase" : "both";
}

Region parse_region(std::string_view s) {
  if (s == "low") return Region::low;
  if (s == "high") return Region::high;
  if (s == "both") return Region::both;
  throw ConfigError("unknown region '" + std::string(s) + "' (expected low, high, both)");
}
const char* to_string(Region r) { return r == Region::low ? "low" : r == Region::high ? "high" : "both"; }

Transform parse_transform(std::string_view s) {
  if (s == "fft") return Transform::fft;
  if (s == "rfft") return Transform::rfft;
  if (s == "dct") return Transform::dct;
  if (s == "dct_abs") return Transform::dct_abs;
  if (s == "dwt" || s == "dwt_ll") return Transform::dwt;
  throw ConfigError("unknown transform '" + std::string(s) + "' (expected fft, rfft, dct, dct_abs, dwt)");
}
const char* to_string(Transform t) {
  switch (t) {
    case Transform::fft: return "fft";
    case Transform::rfft: return "rfft";
    case Transform::dct: return "dct";
    case Transform::dct_abs: return "dct_abs";
    case Transform::dwt: return "dwt";
  }
  return "?";
}

Selection parse_selection(std::string_view s) {
  if (s == "macro" || s == "macro_f1") return Selection::macro_f1;
  if (s == "weighted" || s == "weighted_f1") return Selection::weighted_f1;
  throw ConfigError("unknown selection '" + std::string(s) + "' (expected macro_f1, weighted_f1)");
}
const char* to_string(Selection s) { return s == Selection::macro_f1 ? "macro_f1" : "weighted_f1"; }

namespace {

template <class N>
N parse_number(const std::string& key, const std::string& v) {
  N out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("bad value for " + key + ": '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t n = 0;
    const double d = std::stod(v, &n);
    if (n != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad value for " + key + ": '" + v + "'");
  }
}

template <class N>
std::vector<N> parse_list(const std::string& key, const std::string& v) {
  std::vector<N> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_number<N>(key, item));
  if (out.empty()) throw ConfigError(key + " needs at least one value");
  return out;
}

template <class N>
std::string join(const std::vector<N>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string format_double(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

// Library parse functions throw InvalidArgument; the CLI wants ConfigError.
template <class F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

void set_option(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "dataset") c.dataset = v;
  else if (key == "out_dir") c.out_dir = v;
  else if (key == "branch") c.branch = as_config_error([&] { return mil::parse_branch(v); });
  else if (key == "fusion") c.fusion = as_config_error([&] { return mil::parse_fusion(v); });
  else if (key == "fft_design") c.design = as_config_error([&] { return fft_block::parse_design(v); });
  else if (key == "crop_size") c.crop_size = parse_number<int>(key, v);
  else if (key == "downsample") c.downsample = parse_number<int>(key, v);
  else if (key == "spectra") c.spectra = parse_spectra(v);
  else if (key == "region") c.region = parse_region(v);
  else if (key == "normalization") c.normalization = as_config_error([&] { return ad::parse_norm_mode(v); });
  else if (key == "transform") c.transform = parse_transform(v);
  else if (key == "cnn_layers") c.cnn_layers = parse_number<int>(key, v);
  else if (key == "max_channels") c.max_channels = parse_number<int>(key, v);
  else if (key == "mlp_hidden") c.mlp_hidden = parse_number<int>(key, v);
  else if (key == "embed_dim") c.embed_dim = parse_number<int>(key, v);
  else if (key == "attn_hidden") c.attn_hidden = parse_number<int>(key, v);
  else if (key == "patch_size") c.patch_size = parse_number<int>(key, v);
  else if (key == "encoder_seed") c.encoder_seed = parse_number<std::uint64_t>(key, v);
  else if (key == "epochs") c.epochs = parse_number<int>(key, v);
  else if (key == "lr") c.lr = parse_double(key, v);
  else if (key == "seeds") c.seeds = parse_list<std::uint64_t>(key, v);
  else if (key == "selection") c.selection = parse_selection(v);
  else if (key == "crop_values") c.crop_values = parse_list<int>(key, v);
  else if (key == "downsample_values") c.downsample_values = parse_list<int>(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    for (const auto& [k, v] : parse_key_values(ss.str())) set_option(base, k, v);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return base;
}

void validate(const ExperimentConfig& c) {
  if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
  if (c.crop_size <= 0 || c.crop_size % 2) throw ConfigError("crop_size must be positive and even");
  if (c.downsample < 1) throw ConfigError("downsample must be >= 1");
  if (c.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(c.lr > 0)) throw ConfigError("lr must be positive");
  if (c.patch_size <= 0) throw ConfigError("patch_size must be positive");
  if (c.embed_dim <= 0 || c.attn_hidden <= 0) throw ConfigError("embed_dim and attn_hidden must be positive");
  if (c.transform != Transform::fft && fft_block::uses_complex_input(c.design))
    throw ConfigError(std::string("transform ") + to_string(c.transform) +
                      " produces a real tensor; it needs fft_design E");
  if (c.branch != mil::Branch::spatial) {
    fft_block::FFTBlockConfig b;
    b.cnn_layers = c.cnn_layers;
    b.max_channels = c.max_channels;
    b.crop_size = c.crop_size;
    b.mlp_hidden = c.mlp_hidden;
    try {
      fft_block::validate(b);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
}

std::vector<std::pair<std::string, std::string>> to_key_values(const ExperimentConfig& c) {
  return {
      {"dataset", c.dataset},
      {"out_dir", c.out_dir},
      {"branch", mil::to_string(c.branch)},
      {"fusion", mil::to_string(c.fusion)},
      {"fft_design", fft_block::to_string(c.design)},
      {"crop_size", std::to_string(c.crop_size)},
      {"downsample", std::to_string(c.downsample)},
      {"spectra", to_string(c.spectra)},
      {"region", to_string(c.region)},
      {"normalization", ad::to_string(c.normalization)},
      {"transform", to_string(c.transform)},
      {"cnn_layers", std::to_string(c.cnn_layers)},
      {"max_channels", std::to_string(c.max_channels)},
      {"mlp_hidden", std::to_string(c.mlp_hidden)},
      {"embed_dim", std::to_string(c.embed_dim)},
      {"attn_hidden", std::to_string(c.attn_hidden)},
      {"patch_size", std::to_string(c.patch_size)},
      {"encoder_seed", std::to_string(c.encoder_seed)},
      {"epochs", std::to_string(c.epochs)},
      {"lr", format_double(c.lr)},
      {"seeds", join(c.seeds)},
      {"selection", to_string(c.selection)},
      {"crop_values", join(c.crop_values)},
      {"downsample_values", join(c.downsample_values)},
  };
}

std::string to_json(const ExperimentConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : to_key_values(c)) j[k] = v;
  // Numbers read better as numbers; the lists and lr stay strings so the
  // text round-trips exactly.
  for (const char* k : {"crop_size", "downsample", "cnn_layers", "max_channels", "mlp_hidden", "embed_dim",
                        "attn_hidden", "patch_size", "epochs"})
    j[k] = std::stoi(j[k].get<std::string>());
  j["encoder_seed"] = c.encoder_seed;
  j["resolved_mlp_hidden"] = c.mlp_hidden > 0 ? c.mlp_hidden : 8 * c.max_channels;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config json: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "resolved_mlp_hidden") continue;
    set_option(c, k, v.is_string() ? v.get<std::string>() : v.dump());
  }
  return c;
}

int frequency_input_channels(const ExperimentConfig& c, int image_channels) {
  if (fft_block::uses_complex_input(c.design)) return c.region == Region::both ? 2 * image_channels : image_channels;
  switch (c.transform) {
    case Transform::fft:
    case Transform::rfft: {
      const int per = c.spectra == Spectra::both ? 2 * image_channels : image_channels;
      return (c.transform == Transform::fft && c.region == Region::both) ? 2 * per : per;
    }
    case Transform::dct:
    case Transform::dct_abs:
    case Transform::dwt:
      return image_channels;
  }
  return image_channels;
}

fft_block::FFTBlockConfig block_config(const ExperimentConfig& c, int image_channels, std::uint64_t seed) {
  fft_block::FFTBlockConfig b;
  b.design = c.design;
  b.cnn_layers = c.cnn_layers;
  b.max_channels = c.max_channels;
  b.input_channels = frequency_input_channels(c, image_channels);
  b.crop_size = c.crop_size;
  b.output_dim = c.embed_dim;
  b.mlp_hidden = c.mlp_hidden;
  b.norm = c.normalization;
  b.spatial_cnn = c.transform == Transform::dwt;
  b.seed = seed;
  return b;
}

mil::ModelConfig model_config(const ExperimentConfig& c, int image_channels, int classes, std::uint64_t seed) {
  mil::ModelConfig m;
  m.branch = c.branch;
  m.fusion = c.fusion;
  m.embed_dim = c.embed_dim;
  m.attn_hidden = c.attn_hidden;
  m.classes = classes;
  m.block = block_config(c, image_channels, seed);
  m.seed = seed;
  return m;
}

std::uint64_t config_hash(const ExperimentConfig& c, int image_channels, int classes) {
  std::string key;
  for (const auto& [k, v] : to_key_values(c))
    if (k == "branch" || k == "fusion" || k == "fft_design" || k == "crop_size" || k == "spectra" ||
        k == "region" || k == "normalization" || k == "transform" || k == "cnn_layers" || k == "max_channels" ||
        k == "mlp_hidden" || k == "embed_dim" || k == "attn_hidden" || k == "patch_size" || k == "downsample" ||
        k == "encoder_seed")
      key += k + "=" + v + ";";
  key += "image_channels=" + std::to_string(image_channels) + ";classes=" + std::to_string(classes);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : key) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace fftmil::harness
