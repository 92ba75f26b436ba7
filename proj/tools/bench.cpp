#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "intloc/distributions.hpp"
#include "intloc/fft.hpp"
#include "intloc/grid_pmf.hpp"
#include "intloc/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::complex<double>> random_signal(std::size_t n) {
  intloc::Rng rng(12345);
  std::vector<std::complex<double>> v(n);
  for (auto& z : v) z = {rng.next_unit() - 0.5, rng.next_unit() - 0.5};
  return v;
}

void bench_fft() {
  std::printf("fft: serial reference vs table-driven parallel\n");
  std::printf("%10s %12s %12s %9s %12s\n", "n", "serial_s", "parallel_s",
              "speedup", "max_diff");
  for (std::size_t lg = 18; lg <= 22; lg += 2) {
    const std::size_t n = std::size_t{1} << lg;
    const auto base = random_signal(n);

    auto a = base;
    const auto t0 = Clock::now();
    intloc::fft_serial(a.data(), n, false);
    const double ts = seconds_since(t0);

    auto b = base;
    const auto t1 = Clock::now();
    intloc::fft_parallel(b.data(), n, false);
    const double tp = seconds_since(t1);

    double max_diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      max_diff = std::max(max_diff, std::abs(a[i] - b[i]));
    }
    std::printf("%10zu %12.4f %12.4f %9.2f %12.3e\n", n, ts, tp, ts / tp,
                max_diff);
  }
}

void bench_sampling() {
  std::printf("\nsampling: S_16 sums of std_exponential\n");
  const std::size_t count = 2000000;
  const auto t0 = Clock::now();
  const std::vector<double> sums =
      intloc::sample_sum(intloc::builtin("std_exponential"), 16, 42, count);
  const double dt = seconds_since(t0);
  double acc = 0.0;
  for (double s : sums) acc += s;
  std::printf("%zu sums in %.3f s (%.2e draws/s), mean %.3e\n", count, dt,
              16.0 * static_cast<double>(count) / dt,
              acc / static_cast<double>(count));
}

void bench_conv() {
  std::printf("\nconvolution chain: S_64 of std_exponential at h = 1e-4\n");
  const auto t0 = Clock::now();
  const intloc::GridPmf pmf =
      intloc::sn_pmf(intloc::builtin("std_exponential"), 64, 1e-4);
  const double dt = seconds_since(t0);
  std::printf("%zu cells in %.3f s, total mass deviation %.3e\n",
              pmf.masses.size(), dt, std::abs(pmf.total_mass() - 1.0));
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("openmp disabled (serial build)\n\n");
#endif
  bench_fft();
  bench_sampling();
  bench_conv();
  return 0;
}
