#include "fftmil/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace fftmil::ad {

GradCheckResult grad_check(const std::function<Var<double>()>& fn, std::vector<Var<double>> inputs,
                           const GradCheckOptions& opt) {
  for (auto& x : inputs) x.zero_grad();
  Var<double> loss = fn();
  backward(loss);
  std::vector<std::vector<double>> analytic;
  for (auto& x : inputs) analytic.emplace_back(x.grad().begin(), x.grad().end());

  GradCheckResult res;
  std::mt19937_64 rng(opt.seed);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    std::vector<std::size_t> idx(inputs[k].size());
    std::iota(idx.begin(), idx.end(), 0);
    if (opt.max_coords && opt.max_coords < idx.size()) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(opt.max_coords);
    }
    for (std::size_t i : idx) {
      auto v = inputs[k].mutable_value();
      const double orig = v[i];
      v[i] = orig + opt.step;
      const double up = fn().value()[0];
      v[i] = orig - opt.step;
      const double down = fn().value()[0];
      v[i] = orig;
      const double num = (up - down) / (2 * opt.step);
      const double a = analytic[k][i];
      const double rel = std::abs(a - num) / std::max({std::abs(a), std::abs(num), opt.floor});
      ++res.coords;
      if (rel > res.max_rel_error || !std::isfinite(rel)) {
        res.max_rel_error = std::isfinite(rel) ? rel : HUGE_VAL;
        std::ostringstream os;
        os << "input " << k << ", index " << i << ": analytic " << a << " vs numeric " << num;
        res.worst = os.str();
      }
    }
  }
  return res;
}

}  // namespace fftmil::ad
