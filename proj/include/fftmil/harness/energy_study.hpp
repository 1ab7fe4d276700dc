#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fftmil::harness {

struct EnergyScalingConfig {
  std::vector<int> sides{128, 256, 512};
  int seeds = 5;
  double alpha = 3.0;
  double fraction = 0.5;
};

struct EnergyScalingResult {
  std::vector<int> sides;
  std::vector<std::vector<int>> radius;  // [seed][side]
  std::vector<double> slope;             // per seed, least squares in log-log
  double mean_slope = 0;
};

/// Energy radius (DC excluded) of one dead-leaves image per (seed, side);
/// image s at side n comes from image_rng(s, n).
EnergyScalingResult energy_scaling(const EnergyScalingConfig& cfg);

/// `seed,side,radius` rows followed by `seed,slope` rows.
std::string energy_scaling_csv(const EnergyScalingResult& r);

/// Least-squares slope of log(y) against log(x). y values below 1 count as 1.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fftmil::harness
