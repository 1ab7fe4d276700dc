#pragma once

#include "fftmil/autodiff/var.hpp"

namespace fftmil::ad {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moments are kept per parameter in the order of
/// the ParameterSet, so the set must not grow after construction.
template <class T>
class Adam {
 public:
  Adam(ParameterSet<T>& params, AdamConfig cfg = {});

  /// Applies one update from the gradients currently stored on the
  /// parameters. A parameter never touched by backward counts as zero
  /// gradient. Any NaN/Inf gradient rejects the whole step (NumericalError
  /// naming the parameter) and leaves every value unchanged.
  void step();

  long steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  ParameterSet<T>& params_;
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

}  // namespace fftmil::ad
