#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fftmil/data/synthetic.hpp"

namespace fftmil::data {

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

struct Dataset {
  std::vector<LabeledImage> images;
  DatasetSplit split;
  int classes = 0;

  const LabeledImage& find(const std::string& id) const;
};

/// Id of image `index`: "img_0000", "img_0001", ...
std::string image_id(int index);

/// Stratified split: per class round(0.2 n) test items, chosen by a seeded
/// shuffle; both lists in id order.
DatasetSplit stratified_split(const std::vector<LabeledImage>& images, int classes, double test_fraction,
                              std::uint64_t seed);

/// classes * per_class images (class-major order), each generated from its
/// own stream image_rng(seed, index), plus the 80/20 split.
Dataset make_dataset(const SyntheticConfig& cfg);

/// Writes <dir>/images/<id>.fmt and <dir>/manifest.csv ("id,label,split").
void persist_dataset(const Dataset& ds, const std::filesystem::path& dir);
/// Reads a dataset written by persist_dataset. A manifest entry whose file is
/// missing or corrupt is reported with its id.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace fftmil::data
