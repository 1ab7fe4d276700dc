#include "fftmil/harness/energy_study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fftmil/data/synthetic.hpp"
#include "fftmil/error.hpp"
#include "fftmil/spectral/energy.hpp"
#include "fftmil/spectral/transforms.hpp"

namespace fftmil::harness {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need two or more paired points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::max(y[i], 1.0));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += lx[i] / n, my += ly[i] / n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den == 0) throw InvalidArgument("loglog_slope: x values are all equal");
  return num / den;
}

EnergyScalingResult energy_scaling(const EnergyScalingConfig& cfg) {
  if (cfg.seeds < 1) throw InvalidArgument("energy scaling: seeds must be >= 1");
  EnergyScalingResult r;
  r.sides = cfg.sides;
  r.radius.assign(cfg.seeds, std::vector<int>(cfg.sides.size()));
  r.slope.assign(cfg.seeds, 0.0);
  std::vector<double> xs(cfg.sides.begin(), cfg.sides.end());
  for (int s = 0; s < cfg.seeds; ++s) {
    std::vector<double> ys;
    for (std::size_t i = 0; i < cfg.sides.size(); ++i) {
      data::SyntheticConfig dc;
      dc.image_side = cfg.sides[i];
      dc.alpha = cfg.alpha;
      dc.seed = static_cast<std::uint64_t>(s);
      auto rng = data::image_rng(dc.seed, static_cast<std::uint64_t>(cfg.sides[i]));
      const auto img = data::generate_dead_leaves(dc, rng);
      const auto spec = spectral::fftshift(spectral::fft2d(img), spectral::ShiftDirection::forward);
      const auto prof = spectral::radial_energy_profile(spec, {.exclude_dc = true});
      r.radius[s][i] = spectral::energy_radius(prof, cfg.fraction);
      ys.push_back(r.radius[s][i]);
    }
    r.slope[s] = loglog_slope(xs, ys);
    r.mean_slope += r.slope[s] / cfg.seeds;
  }
  return r;
}

std::string energy_scaling_csv(const EnergyScalingResult& r) {
  std::string out = "seed,side,radius\n";
  for (std::size_t s = 0; s < r.radius.size(); ++s)
    for (std::size_t i = 0; i < r.sides.size(); ++i)
      out += std::to_string(s) + "," + std::to_string(r.sides[i]) + "," + std::to_string(r.radius[s][i]) + "\n";
  out += "\nseed,slope\n";
  char line[64];
  for (std::size_t s = 0; s < r.slope.size(); ++s) {
    std::snprintf(line, sizeof line, "%zu,%.10g\n", s, r.slope[s]);
    out += line;
  }
  std::snprintf(line, sizeof line, "mean,%.10g\n", r.mean_slope);
  return out + line;
}

}  // namespace fftmil::harness
