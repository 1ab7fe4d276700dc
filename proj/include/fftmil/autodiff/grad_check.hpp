#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fftmil/autodiff/var.hpp"

namespace fftmil::ad {

struct GradCheckOptions {
  double step = 1e-5;
  /// Coordinates probed per input; 0 probes all of them. Sampled without
  /// replacement from `seed`.
  std::size_t max_coords = 0;
  std::uint64_t seed = 0;
  /// Lower bound on the denominator of the relative error, so that
  /// coordinates whose true gradient is ~0 are judged on absolute error.
  double floor = 1e-8;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coords = 0;
  std::string worst;  // "input k, index i: analytic a vs numeric n"
};

/// Compares reverse-mode gradients of the scalar `fn()` with respect to each
/// of `inputs` against central differences. `fn` must rebuild its graph from
/// the current input values on every call.
GradCheckResult grad_check(const std::function<Var<double>()>& fn, std::vector<Var<double>> inputs,
                           const GradCheckOptions& opt = {});

}  // namespace fftmil::ad
