#include "fftmil/spectral/energy.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <complex>

#include "fftmil/error.hpp"

namespace fftmil::spectral {

namespace {

// Smallest integer r with r*r >= d2.
int ceil_sqrt(long long d2) {
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(d2)));
  while (r * r < d2) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= d2) --r;
  return static_cast<int>(r);
}

}  // namespace

RadialEnergyProfile radial_energy_profile(const Spectrum& spec, ProfileOptions opts) {
  if (!spec.centered) throw InvalidArgument("radial_energy_profile: spectrum must be centered");
  const int cu = spec.height / 2;
  const int cv = spec.width / 2;

  int r_max = 0;
  for (int u : {0, spec.height - 1})
    for (int v : {0, spec.width - 1}) {
      const long long du = u - cu, dv = v - cv;
      r_max = std::max(r_max, ceil_sqrt(du * du + dv * dv));
    }

  std::vector<double> shell(r_max + 1, 0.0);
  for (int c = 0; c < spec.channels; ++c)
    for (int u = 0; u < spec.height; ++u)
      for (int v = 0; v < spec.width; ++v) {
        if (opts.exclude_dc && u == cu && v == cv) continue;
        const long long du = u - cu, dv = v - cv;
        shell[ceil_sqrt(du * du + dv * dv)] += std::norm(spec.at(c, u, v));
      }

  double total = 0.0;
  for (double e : shell) total += e;
  if (!(total > 0.0))
    throw InvalidArgument("radial_energy_profile: spectrum has no energy to normalize");

  RadialEnergyProfile p;
  p.radii.resize(r_max + 1);
  p.cumulative_energy.resize(r_max + 1);
  double running = 0.0;
  for (int r = 0; r <= r_max; ++r) {
    running += shell[r];
    p.radii[r] = r;
    p.cumulative_energy[r] = running / total;
  }
  p.cumulative_energy.back() = 1.0;
  return p;
}

int energy_radius(const RadialEnergyProfile& profile, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw InvalidArgument("energy_radius: fraction must lie in (0, 1]");
  for (std::size_t i = 0; i < profile.cumulative_energy.size(); ++i)
    if (profile.cumulative_energy[i] >= fraction) return profile.radii[i];
  throw InvalidArgument("energy_radius: profile is empty");
}

std::string profile_to_csv(const RadialEnergyProfile& profile) {
  std::string out = "radius,cumulative_energy\n";
  char line[64];
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    std::snprintf(line, sizeof line, "%d,%.17g\n", profile.radii[i],
                  profile.cumulative_energy[i]);
    out += line;
  }
  return out;
}

}  // namespace fftmil::spectral
