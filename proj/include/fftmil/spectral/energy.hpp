#pragma once

#include <string>
#include <vector>

#include "fftmil/spectral/image.hpp"

namespace fftmil::spectral {

/// Fraction of spectral energy inside discs of integer radius around the
/// center bin. cumulative_energy[r] covers every bin at Euclidean distance
/// <= r; the last entry is exactly 1.
struct RadialEnergyProfile {
  std::vector<int> radii;
  std::vector<double> cumulative_energy;
};

struct ProfileOptions {
  /// Leave the DC bin out of both the sums and the total. The DC term of a
  /// [0,1]-valued image holds most of its energy, which would pin r_0.5 at 0.
  bool exclude_dc = false;
};

/// Requires a centered spectrum with non-zero energy. Channels are summed.
RadialEnergyProfile radial_energy_profile(const Spectrum& spec, ProfileOptions opts = {});

/// Smallest radius whose cumulative energy reaches `fraction` (0 < fraction <= 1).
int energy_radius(const RadialEnergyProfile& profile, double fraction);

/// `radius,cumulative_energy` lines with a header.
std::string profile_to_csv(const RadialEnergyProfile& profile);

}  // namespace fftmil::spectral
