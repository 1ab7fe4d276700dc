#include "fftmil/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fftmil/error.hpp"
#include "fftmil/spectral/tensor_io.hpp"

namespace fftmil::data {

namespace fs = std::filesystem;

const LabeledImage& Dataset::find(const std::string& id) const {
  for (const auto& im : images)
    if (im.id == id) return im;
  throw InvalidArgument("dataset has no image '" + id + "'");
}

std::string image_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%04d", index);
  return buf;
}

DatasetSplit stratified_split(const std::vector<LabeledImage>& images, int classes, double test_fraction,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed * 2654435761ULL + 99);
  DatasetSplit split;
  for (int k = 0; k < classes; ++k) {
    std::vector<std::string> ids;
    for (const auto& im : images)
      if (im.label == k) ids.push_back(im.id);
    std::sort(ids.begin(), ids.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * ids.size()));
    split.test.insert(split.test.end(), ids.begin(), ids.begin() + n_test);
    split.train.insert(split.train.end(), ids.begin() + n_test, ids.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Dataset make_dataset(const SyntheticConfig& cfg) {
  validate(cfg);
  if (cfg.per_class < 5) throw InvalidArgument("per_class must be >= 5 for an 80/20 split");
  Dataset ds;
  ds.classes = cfg.classes;
  const int n = cfg.classes * cfg.per_class;
  ds.images.resize(n);
  // Every image owns its stream, so the loop order does not matter.
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    auto rng = image_rng(cfg.seed, static_cast<std::uint64_t>(i));
    auto img = generate_dead_leaves(cfg, rng);
    ds.images[i] = plant_signal(std::move(img), i / cfg.per_class, cfg, rng);
    ds.images[i].id = image_id(i);
  }
  ds.split = stratified_split(ds.images, cfg.classes, 0.2, cfg.seed);
  return ds;
}

void persist_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir / "images");
  std::map<std::string, const char*> which;
  for (const auto& id : ds.split.train) which[id] = "train";
  for (const auto& id : ds.split.test) which[id] = "test";
  std::ofstream man(dir / "manifest.csv", std::ios::trunc);
  if (!man) throw std::runtime_error("cannot write " + (dir / "manifest.csv").string());
  man << "id,label,split\n";
  for (const auto& im : ds.images) {
    spectral::save_image(dir / "images" / (im.id + ".fmt"), im.image);
    auto it = which.find(im.id);
    man << im.id << ',' << im.label << ',' << (it == which.end() ? "none" : it->second) << '\n';
  }
  if (!man) throw std::runtime_error("write failed: " + (dir / "manifest.csv").string());
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.csv";
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open " + manifest.string());
  std::string line;
  if (!std::getline(in, line) || line != "id,label,split")
    throw FormatError(manifest.string() + ": expected header 'id,label,split'");
  Dataset ds;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, label, split;
    if (!std::getline(ss, id, ',') || !std::getline(ss, label, ',') || !std::getline(ss, split))
      throw FormatError(manifest.string() + ":" + std::to_string(lineno) + ": malformed row");
    LabeledImage im;
    im.id = id;
    try {
      im.label = std::stoi(label);
    } catch (const std::exception&) {
      throw FormatError(manifest.string() + ":" + std::to_string(lineno) + ": bad label '" + label + "'");
    }
    if (im.label < 0) throw FormatError(manifest.string() + ":" + std::to_string(lineno) + ": negative label");
    const fs::path file = dir / "images" / (id + ".fmt");
    if (!fs::exists(file)) throw FormatError("image '" + id + "' listed in the manifest is missing (" + file.string() + ")");
    try {
      im.image = spectral::load_image(file);
    } catch (const FormatError& e) {
      throw FormatError("image '" + id + "': " + e.what());
    }
    ds.classes = std::max(ds.classes, im.label + 1);
    if (split == "train") ds.split.train.push_back(id);
    else if (split == "test") ds.split.test.push_back(id);
    else if (split != "none")
      throw FormatError(manifest.string() + ":" + std::to_string(lineno) + ": unknown split '" + split + "'");
    ds.images.push_back(std::move(im));
  }
  return ds;
}

}  // namespace fftmil::data
