#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fftmil/kernels/conv2d.hpp"

namespace fftmil::spectral {

/// Precomputed 1D DFT of a fixed length. Power-of-two lengths run an
/// iterative radix-2 transform; other lengths go through Bluestein's chirp-z
/// on a padded power-of-two. Both directions are unnormalized: callers apply
/// 1/n where they need it.
template <class T>
class FftPlan {
 public:
  explicit FftPlan(int n);

  int size() const { return n_; }
  /// In-place. `inverse` flips the exponent sign.
  void execute(std::span<std::complex<T>> a, bool inverse) const;

 private:
  void radix2(std::span<std::complex<T>> a, bool inverse) const;

  int n_ = 0;
  int m_ = 0;  // radix-2 working length (== n_ for powers of two)
  std::vector<int> bitrev_;
  std::vector<std::complex<T>> roots_;  // exp(-2 pi i k / m_), k < m_/2
  // Bluestein data (empty for powers of two)
  std::vector<std::complex<T>> chirp_;         // exp(-i pi k^2 / n)
  std::vector<std::complex<T>> chirp_kernel_;  // FFT of conj chirp, padded to m_
};

bool is_power_of_two(int n);

/// Batched 2D DFT over `planes` contiguous H x W planes, in place,
/// unnormalized. Rows then columns; independent lines are spread over
/// OpenMP threads when `backend` is parallel.
template <class T>
void fft2d_planes(std::span<std::complex<T>> data, int planes, int height, int width,
                  bool inverse, kernels::Backend backend = kernels::Backend::parallel);

}  // namespace fftmil::spectral
