#include "fftmil/spectral/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "fftmil/error.hpp"

namespace fftmil::spectral {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

int next_power_of_two(int n) {
  int m = 1;
  while (m < n) m <<= 1;
  return m;
}

template <class T>
std::complex<T> unit_root(long double angle) {
  return {static_cast<T>(std::cos(angle)), static_cast<T>(std::sin(angle))};
}

}  // namespace

template <class T>
FftPlan<T>::FftPlan(int n) : n_(n) {
  if (n < 1) throw InvalidArgument("FFT length must be positive");
  m_ = is_power_of_two(n) ? n : next_power_of_two(2 * n - 1);

  bitrev_.resize(m_);
  int bits = 0;
  while ((1 << bits) < m_) ++bits;
  for (int i = 0; i < m_; ++i) {
    int r = 0;
    for (int b = 0; b < bits; ++b)
      if (i & (1 << b)) r |= 1 << (bits - 1 - b);
    bitrev_[i] = r;
  }
  roots_.resize(std::max(1, m_ / 2));
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (int k = 0; k < m_ / 2; ++k) roots_[k] = unit_root<T>(-two_pi * k / m_);

  if (m_ != n_) {
    chirp_.resize(n_);
    const long long two_n = 2LL * n_;
    for (int k = 0; k < n_; ++k) {
      const long long k2 = (static_cast<long long>(k) * k) % two_n;
      chirp_[k] = unit_root<T>(-std::numbers::pi_v<long double> * k2 / n_);
    }
    chirp_kernel_.assign(m_, {});
    chirp_kernel_[0] = std::conj(chirp_[0]);
    for (int k = 1; k < n_; ++k) {
      chirp_kernel_[k] = std::conj(chirp_[k]);
      chirp_kernel_[m_ - k] = std::conj(chirp_[k]);
    }
    radix2(chirp_kernel_, false);
  }
}

template <class T>
void FftPlan<T>::radix2(std::span<std::complex<T>> a, bool inverse) const {
  for (int i = 0; i < m_; ++i)
    if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
  for (int len = 2; len <= m_; len <<= 1) {
    const int half = len / 2;
    const int step = m_ / len;
    for (int i = 0; i < m_; i += len)
      for (int j = 0; j < half; ++j) {
        std::complex<T> w = roots_[j * step];
        if (inverse) w = std::conj(w);
        const std::complex<T> u = a[i + j];
        const std::complex<T> v = a[i + j + half] * w;
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
  }
}

template <class T>
void FftPlan<T>::execute(std::span<std::complex<T>> a, bool inverse) const {
  if (static_cast<int>(a.size()) != n_) throw InvalidArgument("FFT buffer length mismatch");
  if (m_ == n_) {
    radix2(a, inverse);
    return;
  }
  // Bluestein. The inverse is conj(DFT(conj(x))).
  std::vector<std::complex<T>> work(m_);
  for (int k = 0; k < n_; ++k) {
    const std::complex<T> x = inverse ? std::conj(a[k]) : a[k];
    work[k] = x * chirp_[k];
  }
  radix2(work, false);
  for (int k = 0; k < m_; ++k) work[k] *= chirp_kernel_[k];
  radix2(work, true);
  const T scale = T(1) / static_cast<T>(m_);
  for (int k = 0; k < n_; ++k) {
    const std::complex<T> y = work[k] * scale * chirp_[k];
    a[k] = inverse ? std::conj(y) : y;
  }
}

template <class T>
void fft2d_planes(std::span<std::complex<T>> data, int planes, int height, int width,
                  bool inverse, kernels::Backend backend) {
  if (data.size() != static_cast<std::size_t>(planes) * height * width)
    throw InvalidArgument("fft2d: buffer does not match planes x H x W");
  const FftPlan<T> row_plan(width);
  const FftPlan<T> col_plan(height);
  const int rows = planes * height;
  const int cols = planes * width;
  const bool par = backend == kernels::Backend::parallel;

#pragma omp parallel for schedule(static) if (par)
  for (int r = 0; r < rows; ++r)
    row_plan.execute(data.subspan(static_cast<std::size_t>(r) * width, width), inverse);

#pragma omp parallel if (par)
  {
    std::vector<std::complex<T>> line(height);
#pragma omp for schedule(static)
    for (int c = 0; c < cols; ++c) {
      const int p = c / width;
      const int x = c % width;
      std::complex<T>* base = data.data() + static_cast<std::size_t>(p) * height * width + x;
      for (int y = 0; y < height; ++y) line[y] = base[static_cast<std::size_t>(y) * width];
      col_plan.execute(line, inverse);
      for (int y = 0; y < height; ++y) base[static_cast<std::size_t>(y) * width] = line[y];
    }
  }
}

template class FftPlan<float>;
template class FftPlan<double>;
template void fft2d_planes<float>(std::span<std::complex<float>>, int, int, int, bool,
                                  kernels::Backend);
template void fft2d_planes<double>(std::span<std::complex<double>>, int, int, int, bool,
                                   kernels::Backend);

}  // namespace fftmil::spectral
