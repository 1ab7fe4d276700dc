#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fftmil/spectral/image.hpp"

namespace fftmil::mil {

/// N x D patch embeddings of one slide.
struct PatchBag {
  int rows = 0;  // N
  int dim = 0;   // D
  std::vector<double> features;  // row-major N x D
  int patch_size = 0;
  int label = 0;
  std::string slide_id;

  double at(int i, int d) const { return features[static_cast<std::size_t>(i) * dim + d]; }
};

/// Frozen random projection standing in for a pretrained patch CNN:
/// h = relu(W vec(patch) + b), W ~ N(0, 1/fan_in). Patches are taken on a
/// non-overlapping grid; images whose sides are not multiples of the patch
/// size are zero-padded on the high side.
class PatchEncoder {
 public:
  PatchEncoder(int channels, int patch, int embed_dim, std::uint64_t seed);

  PatchBag encode(const spectral::SpatialImage& img) const;

  int patch() const { return patch_; }
  int embed_dim() const { return dim_; }

 private:
  int channels_;
  int patch_;
  int dim_;
  std::vector<float> w_;  // [D, C*P*P]
  std::vector<float> b_;
};

}  // namespace fftmil::mil
