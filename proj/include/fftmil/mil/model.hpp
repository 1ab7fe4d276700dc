#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fftmil/autodiff/checkpoint.hpp"
#include "fftmil/fft_block/block.hpp"
#include "fftmil/mil/patch_encoder.hpp"

namespace fftmil::mil {

using ad::Var;

enum class Fusion { addition, multiplication, concat, cross_attention };
Fusion parse_fusion(std::string_view name);
const char* to_string(Fusion f);
const std::vector<Fusion>& all_fusions();

enum class Branch { spatial, frequency, both };
Branch parse_branch(std::string_view name);
const char* to_string(Branch b);

/// Gated attention: a_i = w . (tanh(V h_i + bv) * sigmoid(U h_i + bu)).
template <class T>
struct AttentionParams {
  Var<T> V, bv, U, bu, w;
};

template <class T>
AttentionParams<T> make_attention(ad::ParameterSet<T>& params, const std::string& name, int dim,
                                  int hidden, std::uint64_t seed);

template <class T>
struct AttentionState {
  Var<T> logits;   // [N]
  Var<T> weights;  // [N], softmax of logits
};

template <class T>
AttentionState<T> attention_scores(const Var<T>& h, const AttentionParams<T>& p);

/// sum_i weights_i h_i as a [1,D] row.
template <class T>
Var<T> attention_pool(const Var<T>& h, const AttentionState<T>& attn);

template <class T>
struct FusionParams {
  Var<T> proj_w, proj_b;  // concat: [D, 2D], [D]
  Var<T> g1, g2;          // cross-attention gates, [1] each
};

template <class T>
FusionParams<T> make_fusion(ad::ParameterSet<T>& params, Fusion mode, int dim);

template <class T>
struct FusionResult {
  Var<T> pooled;            // [1,D]
  Var<T> fused_weights;     // cross-attention only: softmax(g1 a + g2 b)
};

/// Joins the global feature O ([1,D] or [D]) with the patch features h
/// [N,D]. The instance attention `attn` is always computed from the
/// unfused features, so addition and the other pointwise modes reuse it
/// unchanged.
template <class T>
FusionResult<T> fuse(const Var<T>& h, const Var<T>& O, const AttentionState<T>& attn, Fusion mode,
                     const FusionParams<T>& p);

/// Linear head D -> K.
template <class T>
Var<T> classify(const Var<T>& pooled, const Var<T>& w, const Var<T>& b);

struct ModelConfig {
  Branch branch = Branch::both;
  Fusion fusion = Fusion::addition;
  int embed_dim = 512;
  int attn_hidden = 128;
  int classes = 3;
  fft_block::FFTBlockConfig block;  // output_dim is forced to embed_dim
  std::uint64_t seed = 0;
};

/// Attention MIL with an optional frequency branch.
template <class T>
class MilModel {
 public:
  explicit MilModel(const ModelConfig& cfg);
  MilModel(const MilModel&) = delete;
  MilModel& operator=(const MilModel&) = delete;

  struct Output {
    Var<T> logits;     // [1,K]
    Var<T> frequency;  // O, [1,D]; undefined for the spatial branch
    std::optional<AttentionState<T>> attention;
    Var<T> fused_weights;
  };

  /// `bag` is [N,D]; `freq` is read unless the branch is spatial.
  Output forward(const Var<T>& bag, const fft_block::BlockInput<T>& freq, bool training);

  ad::ParameterSet<T>& params() { return params_; }
  const ModelConfig& config() const { return cfg_; }
  fft_block::FFTBlock<T>* block() { return block_ ? &*block_ : nullptr; }
  FusionParams<T>& fusion_params() { return fusion_; }

  /// Parameters plus batch-norm running statistics.
  std::vector<ad::TensorRecord> state();
  void load_state(const std::vector<ad::TensorRecord>& records);

 private:
  ModelConfig cfg_;
  ad::ParameterSet<T> params_;
  std::optional<fft_block::FFTBlock<T>> block_;
  AttentionParams<T> attn_;
  FusionParams<T> fusion_;
  Var<T> head_w_, head_b_;
};

/// Converts a bag to a constant [N,D] tensor.
template <class T>
Var<T> bag_tensor(const PatchBag& bag);

}  // namespace fftmil::mil
