#include "fftmil/mil/patch_encoder.hpp"

#include <cmath>
#include <random>

#include "fftmil/error.hpp"
#include "fftmil/kernels/gemm.hpp"

namespace fftmil::mil {

PatchEncoder::PatchEncoder(int channels, int patch, int embed_dim, std::uint64_t seed)
    : channels_(channels), patch_(patch), dim_(embed_dim) {
  if (patch <= 0) throw InvalidArgument("patch size must be positive, got " + std::to_string(patch));
  if (channels <= 0 || embed_dim <= 0) throw InvalidArgument("patch encoder: bad channel or embedding width");
  const std::size_t fan_in = static_cast<std::size_t>(channels) * patch * patch;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
  w_.resize(fan_in * embed_dim);
  for (auto& v : w_) v = static_cast<float>(gauss(rng));
  std::normal_distribution<double> bias(0.0, 0.1);
  b_.resize(embed_dim);
  for (auto& v : b_) v = static_cast<float>(bias(rng));
}

PatchBag PatchEncoder::encode(const spectral::SpatialImage& img) const {
  if (img.channels() != channels_)
    throw InvalidArgument("patch encoder expects " + std::to_string(channels_) + " channels, got " +
                          std::to_string(img.channels()));
  const int P = patch_;
  const int gy = (img.height() + P - 1) / P;
  const int gx = (img.width() + P - 1) / P;
  const int n = gy * gx;
  const int fan_in = channels_ * P * P;

  std::vector<float> patches(static_cast<std::size_t>(n) * fan_in, 0.0f);
  for (int py = 0; py < gy; ++py)
    for (int px = 0; px < gx; ++px) {
      float* row = patches.data() + static_cast<std::size_t>(py * gx + px) * fan_in;
      for (int c = 0; c < channels_; ++c)
        for (int y = 0; y < P; ++y) {
          const int iy = py * P + y;
          if (iy >= img.height()) continue;
          for (int x = 0; x < P; ++x) {
            const int ix = px * P + x;
            if (ix < img.width()) row[(c * P + y) * P + x] = static_cast<float>(img.at(c, iy, ix));
          }
        }
    }

  PatchBag bag;
  bag.rows = n;
  bag.dim = dim_;
  bag.patch_size = P;
  std::vector<float> h(static_cast<std::size_t>(n) * dim_);
  kernels::linear_forward<float>(n, fan_in, dim_, patches, w_, b_, h);
  bag.features.resize(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) bag.features[i] = h[i] > 0.0f ? h[i] : 0.0;
  return bag;
}

}  // namespace fftmil::mil
