#include "fftmil/mil/model.hpp"

#include <cmath>

#include "fftmil/error.hpp"

namespace fftmil::mil {

Fusion parse_fusion(std::string_view name) {
  if (name == "addition") return Fusion::addition;
  if (name == "multiplication") return Fusion::multiplication;
  if (name == "concat") return Fusion::concat;
  if (name == "cross-attention" || name == "cross_attention") return Fusion::cross_attention;
  throw InvalidArgument("unknown fusion '" + std::string(name) +
                        "' (expected addition, multiplication, concat, cross-attention)");
}

const char* to_string(Fusion f) {
  switch (f) {
    case Fusion::addition: return "addition";
    case Fusion::multiplication: return "multiplication";
    case Fusion::concat: return "concat";
    case Fusion::cross_attention: return "cross-attention";
  }
  return "?";
}

const std::vector<Fusion>& all_fusions() {
  static const std::vector<Fusion> v{Fusion::addition, Fusion::multiplication, Fusion::concat,
                                     Fusion::cross_attention};
  return v;
}

Branch parse_branch(std::string_view name) {
  if (name == "spatial") return Branch::spatial;
  if (name == "frequency") return Branch::frequency;
  if (name == "both") return Branch::both;
  throw InvalidArgument("unknown branch '" + std::string(name) + "' (expected spatial, frequency, both)");
}

const char* to_string(Branch b) {
  switch (b) {
    case Branch::spatial: return "spatial";
    case Branch::frequency: return "frequency";
    case Branch::both: return "both";
  }
  return "?";
}

template <class T>
AttentionParams<T> make_attention(ad::ParameterSet<T>& params, const std::string& name, int dim,
                                  int hidden, std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(hidden) * dim;
  AttentionParams<T> a;
  a.V = params.add(name + ".V", {hidden, dim}, ad::init_uniform<T>(n, dim, seed));
  a.bv = params.add_zeros(name + ".bv", {hidden});
  a.U = params.add(name + ".U", {hidden, dim}, ad::init_uniform<T>(n, dim, seed + 1));
  a.bu = params.add_zeros(name + ".bu", {hidden});
  a.w = params.add(name + ".w", {1, hidden}, ad::init_uniform<T>(hidden, hidden, seed + 2));
  return a;
}

template <class T>
AttentionState<T> attention_scores(const Var<T>& h, const AttentionParams<T>& p) {
  const Var<T> none;
  Var<T> gate = ad::mul(ad::tanh(ad::linear(h, p.V, p.bv)), ad::sigmoid(ad::linear(h, p.U, p.bu)));
  Var<T> logits = ad::reshape(ad::linear(gate, p.w, none), {h.dim(0)});
  return {logits, ad::softmax(logits)};
}

template <class T>
Var<T> attention_pool(const Var<T>& h, const AttentionState<T>& attn) {
  return ad::weighted_sum(attn.weights, h);
}

template <class T>
FusionParams<T> make_fusion(ad::ParameterSet<T>& params, Fusion mode, int dim) {
  FusionParams<T> f;
  if (mode == Fusion::concat) {
    // [I | 0]: the projection starts out returning the spatial half.
    std::vector<T> w(static_cast<std::size_t>(dim) * 2 * dim, T(0));
    for (int d = 0; d < dim; ++d) w[static_cast<std::size_t>(d) * 2 * dim + d] = T(1);
    f.proj_w = params.add("fusion.proj.w", {dim, 2 * dim}, std::move(w));
    f.proj_b = params.add_zeros("fusion.proj.b", {dim});
  } else if (mode == Fusion::cross_attention) {
    f.g1 = params.add("fusion.g1", {1}, {T(1)});
    f.g2 = params.add("fusion.g2", {1}, {T(0)});
  }
  return f;
}

template <class T>
FusionResult<T> fuse(const Var<T>& h, const Var<T>& O_in, const AttentionState<T>& attn, Fusion mode,
                     const FusionParams<T>& p) {
  const int D = h.dim(1);
  if (static_cast<int>(O_in.size()) != D)
    throw InvalidArgument("fuse: frequency feature width " + std::to_string(O_in.size()) +
                          " does not match patch feature width " + std::to_string(D));
  const Var<T> O = O_in.rank() == 1 ? O_in : ad::reshape(O_in, {D});
  switch (mode) {
    case Fusion::addition:
      return {ad::weighted_sum(attn.weights, ad::add_rows(h, O)), {}};
    case Fusion::multiplication:
      return {ad::weighted_sum(attn.weights, ad::mul_rows(h, O)), {}};
    case Fusion::concat:
      return {ad::weighted_sum(attn.weights, ad::linear(ad::concat_rows(h, O), p.proj_w, p.proj_b)), {}};
    case Fusion::cross_attention: {
      Var<T> b = ad::scale(ad::row_dot(h, O), T(1) / std::sqrt(static_cast<T>(D)));
      Var<T> fused = ad::softmax(ad::add(ad::scalar_mul(p.g1, attn.logits), ad::scalar_mul(p.g2, b)));
      Var<T> px = ad::reshape(ad::weighted_sum(fused, h), {D});
      return {ad::weighted_sum(attn.weights, ad::add_rows(h, px)), fused};
    }
  }
  throw InvalidArgument("fuse: bad mode");
}

template <class T>
Var<T> classify(const Var<T>& pooled, const Var<T>& w, const Var<T>& b) {
  return ad::linear(pooled, w, b);
}

template <class T>
MilModel<T>::MilModel(const ModelConfig& cfg) : cfg_(cfg) {
  if (cfg_.classes < 2) throw InvalidArgument("model needs at least 2 classes");
  const int D = cfg_.embed_dim;
  if (cfg_.branch != Branch::spatial) {
    cfg_.block.output_dim = D;
    block_.emplace(cfg_.block, params_, "fft");
  }
  if (cfg_.branch != Branch::frequency) {
    attn_ = make_attention(params_, "attn", D, cfg_.attn_hidden, cfg_.seed * 7919 + 101);
    if (cfg_.branch == Branch::both) fusion_ = make_fusion(params_, cfg_.fusion, D);
  }
  head_w_ = params_.add("head.w", {cfg_.classes, D},
                        ad::init_uniform<T>(static_cast<std::size_t>(cfg_.classes) * D, D, cfg_.seed * 7919 + 211));
  head_b_ = params_.add_zeros("head.b", {cfg_.classes});
}

template <class T>
typename MilModel<T>::Output MilModel<T>::forward(const Var<T>& bag, const fft_block::BlockInput<T>& freq,
                                                  bool training) {
  Output out;
  if (cfg_.branch != Branch::spatial) out.frequency = block_->forward(freq, training);
  if (cfg_.branch == Branch::frequency) {
    out.logits = classify(out.frequency, head_w_, head_b_);
    return out;
  }
  if (bag.rank() != 2 || bag.dim(1) != cfg_.embed_dim || bag.dim(0) < 1)
    throw InvalidArgument("model: bag must be [N," + std::to_string(cfg_.embed_dim) + "], got " +
                          ad::shape_string(bag.shape()));
  AttentionState<T> attn = attention_scores(bag, attn_);
  Var<T> pooled;
  if (cfg_.branch == Branch::spatial) {
    pooled = attention_pool(bag, attn);
  } else {
    auto fr = fuse(bag, out.frequency, attn, cfg_.fusion, fusion_);
    pooled = fr.pooled;
    out.fused_weights = fr.fused_weights;
  }
  out.attention = attn;
  out.logits = classify(pooled, head_w_, head_b_);
  return out;
}

template <class T>
std::vector<ad::TensorRecord> MilModel<T>::state() {
  std::vector<ad::TensorRecord> out;
  auto push = [&](const std::string& name, const ad::Shape& shape, std::span<const T> v) {
    out.push_back({name, shape, std::vector<float>(v.begin(), v.end())});
  };
  for (const auto& p : params_.items()) push(p.name, p.var.shape(), p.var.value());
  if (block_)
    for (auto& [name, bn] : block_->batchnorms()) {
      const int c = static_cast<int>(bn->running_mean.size());
      push(name + ".running_mean", {c}, bn->running_mean);
      push(name + ".running_var", {c}, bn->running_var);
    }
  return out;
}

template <class T>
void MilModel<T>::load_state(const std::vector<ad::TensorRecord>& records) {
  auto copy_into = [&](const std::string& name, const ad::Shape& shape, std::span<T> dst) {
    const ad::TensorRecord& r = ad::find_record(records, name);
    if (r.shape != shape)
      throw FormatError("checkpoint tensor '" + name + "' has shape " + ad::shape_string(r.shape) +
                        ", model expects " + ad::shape_string(shape));
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(r.values[i]);
  };
  for (auto& p : params_.items()) copy_into(p.name, p.var.shape(), p.var.mutable_value());
  if (block_)
    for (auto& [name, bn] : block_->batchnorms()) {
      const int c = static_cast<int>(bn->running_mean.size());
      copy_into(name + ".running_mean", {c}, bn->running_mean);
      copy_into(name + ".running_var", {c}, bn->running_var);
    }
}

template <class T>
Var<T> bag_tensor(const PatchBag& bag) {
  return Var<T>::constant({bag.rows, bag.dim}, std::vector<T>(bag.features.begin(), bag.features.end()));
}

#define FFTMIL_INSTANTIATE_MIL(T)                                                                        \
  template AttentionParams<T> make_attention(ad::ParameterSet<T>&, const std::string&, int, int,        \
                                             std::uint64_t);                                             \
  template AttentionState<T> attention_scores(const Var<T>&, const AttentionParams<T>&);                \
  template Var<T> attention_pool(const Var<T>&, const AttentionState<T>&);                              \
  template FusionParams<T> make_fusion(ad::ParameterSet<T>&, Fusion, int);                              \
  template FusionResult<T> fuse(const Var<T>&, const Var<T>&, const AttentionState<T>&, Fusion,         \
                                const FusionParams<T>&);                                                 \
  template Var<T> classify(const Var<T>&, const Var<T>&, const Var<T>&);                                \
  template class MilModel<T>;                                                                            \
  template Var<T> bag_tensor<T>(const PatchBag&);

FFTMIL_INSTANTIATE_MIL(float)
FFTMIL_INSTANTIATE_MIL(double)

}  // namespace fftmil::mil
