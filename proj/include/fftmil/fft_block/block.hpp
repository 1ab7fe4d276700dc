#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fftmil/autodiff/complex_ops.hpp"
#include "fftmil/fft_block/config.hpp"

namespace fftmil::fft_block {

/// What the block reads depends on the design: `packed` ([B,2C,h,w] real)
/// for E and the spatial CNN, `spectrum` ([B,C,h,w] complex) otherwise.
template <class T>
struct BlockInput {
  ad::Var<T> packed;
  ad::ComplexVar<T> spectrum;
};

/// Trainable frequency branch producing the global feature O of width
/// output_dim. Parameters live in the caller's ParameterSet under `prefix`.
template <class T>
class FFTBlock {
 public:
  FFTBlock(const FFTBlockConfig& cfg, ad::ParameterSet<T>& params, const std::string& prefix = "fft");

  /// Returns [B, output_dim].
  ad::Var<T> forward(const BlockInput<T>& in, bool training);

  const FFTBlockConfig& config() const { return cfg_; }

  /// Every batch norm owned by the block, keyed by its parameter prefix, so
  /// running statistics can be checkpointed.
  std::vector<std::pair<std::string, ad::BatchNorm<T>*>> batchnorms();
  std::size_t batchnorm_count() { return batchnorms().size(); }

 private:
  ad::Var<T> mlp(const ad::Var<T>& features);
  ad::Var<T> forward_real(const ad::Var<T>& x, bool training);
  ad::Var<T> forward_vanilla(const ad::ComplexVar<T>& x, bool training);
  ad::Var<T> forward_complex(const ad::ComplexVar<T>& x, bool training);

  FFTBlockConfig cfg_;
  std::string prefix_;
  std::vector<int> channels_;

  std::vector<ad::Var<T>> conv_w_, conv_b_;       // real layers
  std::vector<ad::ComplexConv<T>> cconv_;         // complex layers
  std::vector<ad::BatchNorm<T>> bn_;              // spatial, per layer
  std::vector<ad::ComplexBatchNorm<T>> cbn_;      // frequency, per layer
  std::vector<ad::BatchNorm<T>> bn_out_;          // at most one, after the final iFFT
  ad::Var<T> w1_, b1_, w2_, b2_;
};

/// Builds the block for `tag` on top of `base` (design field overridden).
template <class T>
FFTBlock<T> build_design_variant(Design tag, FFTBlockConfig base, ad::ParameterSet<T>& params,
                                 const std::string& prefix = "fft");

}  // namespace fftmil::fft_block
