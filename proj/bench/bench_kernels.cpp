// Serial reference loops against the OpenMP kernels. Set OMP_NUM_THREADS to
// vary the thread count.

#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "fftmil/kernels/conv2d.hpp"
#include "fftmil/kernels/gemm.hpp"
#include "fftmil/spectral/fft.hpp"

using fftmil::kernels::Backend;

namespace {

std::vector<float> random_floats(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-1, 1);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// args: channels in/out, side
void BM_Conv2dForward(benchmark::State& st, Backend be) {
  fftmil::kernels::ConvShape s;
  s.in_channels = static_cast<int>(st.range(0));
  s.out_channels = static_cast<int>(st.range(1));
  s.height = s.width = static_cast<int>(st.range(2));
  const auto in = random_floats(static_cast<std::size_t>(s.in_channels) * s.height * s.width, 1);
  const auto w = random_floats(static_cast<std::size_t>(s.out_channels) * s.in_channels * 9, 2);
  const auto b = random_floats(s.out_channels, 3);
  std::vector<float> out(static_cast<std::size_t>(s.out_channels) * s.height * s.width);
  for (auto _ : st) {
    fftmil::kernels::conv2d_forward<float>(s, in, w, b, out, be);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(out.size()) * s.in_channels * 9);
}

void BM_Conv2dBackwardWeight(benchmark::State& st, Backend be) {
  fftmil::kernels::ConvShape s;
  s.in_channels = static_cast<int>(st.range(0));
  s.out_channels = static_cast<int>(st.range(1));
  s.height = s.width = static_cast<int>(st.range(2));
  const auto in = random_floats(static_cast<std::size_t>(s.in_channels) * s.height * s.width, 1);
  const auto go = random_floats(static_cast<std::size_t>(s.out_channels) * s.height * s.width, 2);
  std::vector<float> gw(static_cast<std::size_t>(s.out_channels) * s.in_channels * 9), gb(s.out_channels);
  for (auto _ : st) {
    fftmil::kernels::conv2d_backward_weight<float>(s, in, go, gw, gb, be);
    benchmark::DoNotOptimize(gw.data());
  }
}

// args: rows, in, out
void BM_Linear(benchmark::State& st, Backend be) {
  const int rows = static_cast<int>(st.range(0)), in = static_cast<int>(st.range(1)), out = static_cast<int>(st.range(2));
  const auto x = random_floats(static_cast<std::size_t>(rows) * in, 1);
  const auto w = random_floats(static_cast<std::size_t>(out) * in, 2);
  const auto b = random_floats(out, 3);
  std::vector<float> y(static_cast<std::size_t>(rows) * out);
  for (auto _ : st) {
    fftmil::kernels::linear_forward<float>(rows, in, out, x, w, b, y, be);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(rows) * in * out);
}

// args: planes, side
void BM_FFT2D(benchmark::State& st, Backend be) {
  const int planes = static_cast<int>(st.range(0)), side = static_cast<int>(st.range(1));
  const auto re = random_floats(static_cast<std::size_t>(planes) * side * side, 4);
  std::vector<std::complex<double>> data(re.begin(), re.end());
  for (auto _ : st) {
    st.PauseTiming();
    std::vector<std::complex<double>> work = data;
    st.ResumeTiming();
    fftmil::spectral::fft2d_planes<double>(work, planes, side, side, false, be);
    benchmark::DoNotOptimize(work.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Conv2dForward, serial, Backend::serial)->Args({4, 8, 256})->Args({32, 32, 32})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Conv2dForward, parallel, Backend::parallel)->Args({4, 8, 256})->Args({32, 32, 32})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Conv2dBackwardWeight, serial, Backend::serial)->Args({16, 32, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Conv2dBackwardWeight, parallel, Backend::parallel)->Args({16, 32, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Linear, serial, Backend::serial)->Args({256, 512, 128})->Args({1, 2048, 256})->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Linear, parallel, Backend::parallel)->Args({256, 512, 128})->Args({1, 2048, 256})->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_FFT2D, serial, Backend::serial)->Args({3, 512})->Args({6, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FFT2D, parallel, Backend::parallel)->Args({3, 512})->Args({6, 64})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
