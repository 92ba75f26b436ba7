#include "intloc/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace intloc {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_pow2(std::size_t n) {
  if (n == 0 || !is_pow2(n)) {
    throw std::invalid_argument("fft: length must be a power of two");
  }
}

void bit_reverse_permute(std::complex<double>* a, std::size_t n) {
  const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < nn; ++i) {
    // Reverse the log2(n) low bits of i.
    std::size_t j = 0;
    std::size_t x = static_cast<std::size_t>(i);
    for (std::size_t m = n >> 1; m > 0; m >>= 1) {
      j = (j << 1) | (x & 1);
      x >>= 1;
    }
    if (static_cast<std::size_t>(i) < j) {
      std::swap(a[i], a[j]);
    }
  }
}

// Split twiddle table: w^j = coarse[j >> kSplitBits] * fine[j & (kFine-1)],
// keeping table memory O(sqrt n)-ish instead of O(n) at transform sizes ~2^27.
constexpr std::size_t kSplitBits = 12;
constexpr std::size_t kFine = std::size_t{1} << kSplitBits;

struct TwiddleTable {
  std::vector<std::complex<double>> coarse;
  std::vector<std::complex<double>> fine;
  std::size_t n = 0;

  void build(std::size_t size, double sign) {
    n = size;
    const std::size_t half = n / 2;  // only indices < n/2 are used
    const std::size_t fine_count = std::min(kFine, half > 0 ? half : 1);
    const std::size_t coarse_count = (half + kFine - 1) / kFine + 1;
    fine.resize(fine_count);
    coarse.resize(coarse_count);
    const double step = sign * kTwoPi / static_cast<double>(n);
    for (std::size_t j = 0; j < fine_count; ++j) {
      fine[j] = std::polar(1.0, step * static_cast<double>(j));
    }
    for (std::size_t j = 0; j < coarse_count; ++j) {
      coarse[j] = std::polar(1.0, step * static_cast<double>(j * kFine));
    }
  }

  std::complex<double> get(std::size_t j) const {
    return coarse[j >> kSplitBits] * fine[j & (kFine - 1)];
  }
};

}  // namespace

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t fft_pad_size(std::size_t need) {
  std::size_t n = 1;
  while (n < need) n <<= 1;
  return n;
}

void fft_serial(std::complex<double>* a, std::size_t n, bool inverse) {
  check_pow2(n);
  if (n == 1) return;
  // Serial bit reversal.
  for (std::size_t i = 0, j = 0; i < n; ++i) {
    if (i < j) std::swap(a[i], a[j]);
    std::size_t m = n >> 1;
    while (m >= 1 && (j & m)) {
      j ^= m;
      m >>= 1;
    }
    j |= m;
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const double ang = sign * kTwoPi / static_cast<double>(len);
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> w =
            std::polar(1.0, ang * static_cast<double>(j));
        const std::complex<double> t = w * a[start + j + half];
        a[start + j + half] = a[start + j] - t;
        a[start + j] += t;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= scale;
  }
}

void fft_parallel(std::complex<double>* a, std::size_t n, bool inverse) {
  check_pow2(n);
  if (n == 1) return;
  bit_reverse_permute(a, n);
  TwiddleTable table;
  table.build(n, inverse ? 1.0 : -1.0);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;  // twiddle index step within a block
    const std::size_t nblocks = n / len;
    if (nblocks >= 64) {
      const auto bn = static_cast<std::int64_t>(nblocks);
#pragma omp parallel for schedule(static)
      for (std::int64_t b = 0; b < bn; ++b) {
        const std::size_t start = static_cast<std::size_t>(b) * len;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < half; ++j, idx += stride) {
          const std::complex<double> w = table.get(idx);
          const std::complex<double> t = w * a[start + j + half];
          a[start + j + half] = a[start + j] - t;
          a[start + j] += t;
        }
      }
    } else {
      for (std::size_t start = 0; start < n; start += len) {
        const auto hn = static_cast<std::int64_t>(half);
#pragma omp parallel for schedule(static)
        for (std::int64_t j = 0; j < hn; ++j) {
          const std::size_t idx = static_cast<std::size_t>(j) * stride;
          const std::complex<double> w = table.get(idx);
          const std::complex<double> t = w * a[start + j + half];
          a[start + j + half] = a[start + j] - t;
          a[start + j] += t;
        }
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) a[i] *= scale;
  }
}

}  // namespace intloc
