#include "fftmil/autodiff/optim.hpp"

#include <cmath>

#include "fftmil/error.hpp"

namespace fftmil::ad {

template <class T>
Adam<T>::Adam(ParameterSet<T>& params, AdamConfig cfg) : params_(params), cfg_(cfg) {
  if (!(cfg.lr > 0) || !std::isfinite(cfg.lr)) throw InvalidArgument("adam: lr must be positive");
  for (const auto& p : params_.items()) {
    m_.emplace_back(p.var.size(), T(0));
    v_.emplace_back(p.var.size(), T(0));
  }
}

template <class T>
void Adam<T>::step() {
  auto& items = params_.items();
  if (items.size() != m_.size())
    throw ContractViolation("adam: parameter set changed after the optimizer was built");
  for (const auto& p : items)
    for (T g : p.var.grad())
      if (!std::isfinite(g)) throw NumericalError("non-finite gradient in parameter '" + p.name + "'");

  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const T b1 = static_cast<T>(cfg_.beta1);
  const T b2 = static_cast<T>(cfg_.beta2);
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto g = items[k].var.grad();
    if (g.empty()) continue;
    auto w = items[k].var.mutable_value();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] -= static_cast<T>(cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace fftmil::ad
