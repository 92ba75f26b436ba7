#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "intloc/fft.hpp"
#include "intloc/rng.hpp"

using namespace intloc;
using cvec = std::vector<std::complex<double>>;

namespace {

cvec random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  cvec v(n);
  for (auto& z : v) z = {rng.next_unit() - 0.5, rng.next_unit() - 0.5};
  return v;
}

double max_diff(const cvec& a, const cvec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

// O(n^2) reference DFT.
cvec dft_naive(const cvec& a, bool inverse) {
  const std::size_t n = a.size();
  const double sgn = inverse ? 1.0 : -1.0;
  cvec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = sgn * 6.283185307179586476925286766559 *
                         double(j) * double(k) / double(n);
      acc += a[j] * std::polar(1.0, ang);
    }
    out[k] = inverse ? acc / double(n) : acc;
  }
  return out;
}

}  // namespace

TEST_CASE("fft: matches the naive DFT") {
  for (std::size_t n : {1u, 2u, 8u, 64u}) {
    cvec a = random_signal(n, 11 + n);
    const cvec ref = dft_naive(a, false);
    cvec s = a;
    fft_serial(s.data(), n, false);
    CHECK(max_diff(s, ref) < 1e-11);
    cvec p = a;
    fft_parallel(p.data(), n, false);
    CHECK(max_diff(p, ref) < 1e-11);
  }
}

TEST_CASE("fft: forward then inverse is the identity") {
  for (std::size_t n : {4u, 256u, 4096u}) {
    const cvec a = random_signal(n, n);
    cvec w = a;
    fft_parallel(w.data(), n, false);
    fft_parallel(w.data(), n, true);
    CHECK(max_diff(w, a) < 1e-12);
    cvec v = a;
    fft_serial(v.data(), n, false);
    fft_serial(v.data(), n, true);
    CHECK(max_diff(v, a) < 1e-12);
  }
}

TEST_CASE("fft: impulse transforms to a flat spectrum") {
  cvec a(512, {0.0, 0.0});
  a[0] = {1.0, 0.0};
  fft_parallel(a.data(), a.size(), false);
  for (const auto& z : a) {
    CHECK(z.real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(z.imag()) < 1e-13);
  }
}

TEST_CASE("fft: serial and parallel agree bitwise on large inputs") {
  const std::size_t n = 1u << 16;
  const cvec a = random_signal(n, 3);
  cvec s = a, p = a;
  fft_serial(s.data(), n, false);
  fft_parallel(p.data(), n, false);
  // Same kernel, different twiddle evaluation: equal to roundoff.
  CHECK(max_diff(s, p) < 1e-10);
  cvec p2 = a;
  fft_parallel(p2.data(), n, false);
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(p[i].real() == p2[i].real());
    REQUIRE(p[i].imag() == p2[i].imag());
  }
}

TEST_CASE("fft: pointwise product in frequency is circular convolution") {
  const std::size_t n = 128;
  Rng rng(21);
  std::vector<double> f(16), g(16);
  for (auto& v : f) v = rng.next_unit();
  for (auto& v : g) v = rng.next_unit();
  // Direct linear convolution, zero-padded so circular == linear.
  std::vector<double> direct(31, 0.0);
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 16; ++j) direct[i + j] += f[i] * g[j];
  }
  cvec fa(n, {0.0, 0.0}), ga(n, {0.0, 0.0});
  for (std::size_t i = 0; i < 16; ++i) {
    fa[i] = {f[i], 0.0};
    ga[i] = {g[i], 0.0};
  }
  fft_parallel(fa.data(), n, false);
  fft_parallel(ga.data(), n, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= ga[i];
  fft_parallel(fa.data(), n, true);
  for (std::size_t i = 0; i < direct.size(); ++i) {
    CHECK(fa[i].real() == doctest::Approx(direct[i]).epsilon(1e-12));
  }
  for (std::size_t i = direct.size(); i < n; ++i) {
    CHECK(std::abs(fa[i]) < 1e-12);
  }
}

TEST_CASE("fft: size helpers and non-power-of-two rejection") {
  CHECK(is_pow2(1));
  CHECK(is_pow2(1024));
  CHECK_FALSE(is_pow2(0));
  CHECK_FALSE(is_pow2(768));
  CHECK(fft_pad_size(1) == 1);
  CHECK(fft_pad_size(5) == 8);
  CHECK(fft_pad_size(1024) == 1024);
  CHECK(fft_pad_size(1025) == 2048);
  cvec a(6);
  CHECK_THROWS_AS(fft_serial(a.data(), 6, false), std::invalid_argument);
  CHECK_THROWS_AS(fft_parallel(a.data(), 6, false), std::invalid_argument);
}
