#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "intloc/inversion.hpp"
#include "intloc/oracle.hpp"
#include "intloc/rng.hpp"

using namespace intloc;

TEST_CASE("psi_eval: closed-form values and series/direct continuity") {
  CHECK(psi_eval(0.0) == cplx(1.0, 0.0));
  CHECK(std::abs(psi_eval(2.0 * 3.14159265358979323846)) < 1e-12);
  CHECK(std::abs(psi_eval(3.14159265358979323846)) ==
        doctest::Approx(0.63661977236758134308).epsilon(1e-13));
  // Series branch hands off to the direct form at |l| = 1e-4. Subtracting
  // the first-order change (psi' = -i/2 - l/3) isolates the handoff jump,
  // which is the dropped l^3/24 series term, ~4e-14.
  for (double sgn : {1.0, -1.0}) {
    const cplx below = psi_eval(sgn * 0.99999e-4);
    const cplx above = psi_eval(sgn * 1.00001e-4);
    const cplx slope(-sgn * 1.0e-4 / 3.0, -0.5);
    CHECK(std::abs(below - above - slope * (-2e-9 * sgn)) < 1e-12);
  }
  // |psi| <= 1 everywhere, approaching 1 only near the origin.
  for (double l = -50.0; l <= 50.0; l += 0.037) {
    CHECK(std::abs(psi_eval(l)) <= 1.0 + 1e-14);
  }
}

TEST_CASE("psi_eval: product kernel obeys the min(1, 4/(ds d l^2)) envelope") {
  const double ds = 0.01;
  const double d = 0.5;
  for (int k = 1; k <= 10000; ++k) {
    const double l = 0.02 * k;
    const double prod = std::abs(psi_eval(ds * l)) * std::abs(psi_eval(d * l));
    const double env = std::min(1.0, 4.0 / (ds * d * l * l));
    REQUIRE(prod <= env * (1.0 + 1e-12));
  }
}

TEST_CASE("smoothed inversion: triangular window with tiny smoothing") {
  // ds = 1e-4 keeps the smoothing bias below the check tolerance.
  const InversionConfig cfg{1e-4, 1e7, 1.0, 1e-6};
  const SmoothedResult r =
      smoothed_interval_detail(builtin("std_uniform"), {2, 0.0, 0.1}, cfg);
  CHECK(r.tolerance_met);
  CHECK(std::abs(r.value - 0.028450846792814621559) < 1e-5);
  CHECK(r.tail_cert <= 1e-6);
  CHECK(r.quad_cert < 1e-10);
  CHECK(r.imag_residual < 1e-10);
  CHECK(r.delta_smooth == 1e-4);
  CHECK(r.evals > 100);
  CHECK(smoothed_interval_prob(builtin("std_uniform"), {2, 0.0, 0.1}, cfg) ==
        r.value);
}

TEST_CASE("smoothed inversion: default smoothing width is delta / n") {
  const SmoothedResult r = smoothed_interval_detail(
      builtin("std_exponential"), {8, 0.5, 0.5}, InversionConfig{});
  CHECK(r.delta_smooth == doctest::Approx(0.5 / 8.0).epsilon(1e-15));
  CHECK(r.tolerance_met);
}

TEST_CASE("smoothed inversion: bounded support short-circuits far windows") {
  const SmoothedResult far = smoothed_interval_detail(
      builtin("std_uniform"), {2, -1e6, 0.1}, InversionConfig{});
  CHECK(far.value == 0.0);
  CHECK(far.evals == 0);
  const SmoothedResult high = smoothed_interval_detail(
      builtin("std_uniform"), {2, 4.0, 0.1}, InversionConfig{});
  CHECK(high.value == 0.0);
  CHECK(high.evals == 0);
}

TEST_CASE("smoothed inversion: agrees with the grid oracle at n = 256") {
  const IntervalQuery q{256, 0.0, 0.5};
  const InversionConfig cfg{0.0, 1e7, 1.0, 1e-7};
  const SmoothedResult r = smoothed_interval_detail(builtin("std_exponential"), q, cfg);
  const OracleEstimate fft = interval_prob_fft(builtin("std_exponential"), q, 1e-4);
  CHECK(std::abs(r.value - fft.value) < 1e-5);
}

TEST_CASE("smoothed inversion: certificates track truncation and step changes") {
  const IntervalQuery q{2, 0.0, 0.1};
  // Uniform chf decays like 1/l^2, so the truncation point actually moves.
  const InversionConfig loose{1e-4, 1e7, 1.0, 1e-6};
  const InversionConfig tight{1e-4, 1e7, 1.0, 1e-9};
  const SmoothedResult a = smoothed_interval_detail(builtin("std_uniform"), q, loose);
  const SmoothedResult b = smoothed_interval_detail(builtin("std_uniform"), q, tight);
  CHECK(b.lambda_used > 2.0 * a.lambda_used);
  CHECK(b.tail_cert <= 1e-9);
  CHECK(std::abs(a.value - b.value) <=
        1.05 * (a.tail_cert + b.tail_cert + a.quad_cert + b.quad_cert));
  // Halving the step keeps the value within the quadrature certificate.
  const InversionConfig half{1e-4, 1e7, 0.5, 1e-6};
  const SmoothedResult c = smoothed_interval_detail(builtin("std_uniform"), q, half);
  CHECK(c.step_used < a.step_used);
  CHECK(std::abs(a.value - c.value) <=
        a.quad_cert + c.quad_cert + 1e-12);
}

TEST_CASE("smoothed inversion: unattainable tolerance reported, not silenced") {
  // The atom keeps |chf| >= ~1/2, so no truncation point can reach 1e-15.
  const InversionConfig cfg{0.0, 10.0, 1.0, 1e-15};
  const SmoothedResult r =
      smoothed_interval_detail(builtin("atomic_mix"), {2, 0.0, 0.5}, cfg);
  CHECK_FALSE(r.tolerance_met);
  CHECK(std::isnan(r.value));
  CHECK(r.evals == 0);
  CHECK(r.achievable_tail > 0.01);
  CHECK_THROWS_AS(
      smoothed_interval_prob(builtin("atomic_mix"), {2, 0.0, 0.5}, cfg),
      std::runtime_error);
}

TEST_CASE("sandwich_bracket: orders, shrinks, and contains the grid value") {
  double prev_width = 1e9;
  for (int n : {4, 16, 64}) {
    const IntervalQuery q{n, 0.3, 0.5};
    const SandwichBracket br =
        sandwich_bracket(builtin("std_exponential"), q, InversionConfig{});
    CHECK(br.lower <= br.upper);
    const double width = br.upper - br.lower;
    CHECK(width < prev_width);
    prev_width = width;
    const OracleEstimate fft =
        interval_prob_fft(builtin("std_exponential"), q, 1e-4);
    CHECK(fft.value >= br.lower - br.tol - fft.error_half_width);
    CHECK(fft.value <= br.upper + br.tol + fft.error_half_width);
    CHECK(br.tol < 1e-5);
    CHECK(br.lower_run.delta_smooth == br.upper_run.delta_smooth);
  }
}

TEST_CASE("sandwich_bracket: random windows stay inside the bracket") {
  Rng rng(77);
  for (int t = 0; t < 12; ++t) {
    const int n = 2 + int(rng.next_u64() % 32);
    const double x = (rng.next_unit() - 0.5) * 3.0 * std::sqrt(double(n));
    const IntervalQuery q{n, x, 0.5};
    const SandwichBracket br =
        sandwich_bracket(builtin("std_laplace"), q, InversionConfig{});
    const OracleEstimate fft = interval_prob_fft(builtin("std_laplace"), q, 2e-4);
    REQUIRE(br.lower <= br.upper);
    REQUIRE(fft.value >= br.lower - br.tol - fft.error_half_width);
    REQUIRE(fft.value <= br.upper + br.tol + fft.error_half_width);
  }
}

TEST_CASE("sandwich_bracket: smoothing width must stay below the window") {
  const InversionConfig too_wide{0.5, 1e7, 1.0, 1e-6};
  CHECK_THROWS_AS(
      sandwich_bracket(builtin("std_uniform"), {4, 0.0, 0.5}, too_wide),
      std::invalid_argument);
  const InversionConfig equal{0.25, 1e7, 1.0, 1e-6};
  CHECK_NOTHROW(
      sandwich_bracket(builtin("std_uniform"), {4, 0.0, 0.5}, equal));
}

TEST_CASE("chf_expansion_residual: |theta| within the moment bound") {
  for (const auto& name : builtin_names()) {
    const auto& d = builtin(name);
    for (int k = 0; k < 1000; ++k) {
      const double mag = 1e-3 * std::pow(2e4, k / 999.0);
      const double l = (k % 2 == 0) ? mag : -mag;
      const ExpansionResidual res = chf_expansion_residual(d, l);
      CAPTURE(name);
      CAPTURE(l);
      REQUIRE(std::abs(res.theta) <= res.bound * (1.0 + 1e-9));
      REQUIRE(res.bound ==
              doctest::Approx(d.abs_moment_r * std::abs(l) / 24.0)
                  .epsilon(1e-14));
    }
  }
}

TEST_CASE("chf_expansion_residual: small-lambda limits") {
  // Uniform: theta -> -(9/120) l, within b*l/24 by an O(l^2) margin.
  const ExpansionResidual u = chf_expansion_residual(builtin("std_uniform"), 1e-3);
  CHECK(std::abs(u.theta) <= 1.8e-3 / 24.0);
  CHECK(u.theta.real() == doctest::Approx(-0.075e-3).epsilon(1e-5));
  CHECK(u.theta.imag() == 0.0);
  // Symmetric members have exactly real theta.
  CHECK(chf_expansion_residual(builtin("std_laplace"), 0.7).theta.imag() == 0.0);
  CHECK(chf_expansion_residual(builtin("atomic_mix"), 0.7).theta.imag() == 0.0);
  CHECK(chf_expansion_residual(builtin("std_exponential"), 0.5).theta.imag() != 0.0);
  CHECK_THROWS_AS(chf_expansion_residual(builtin("std_uniform"), 0.0),
                  std::invalid_argument);
}

TEST_CASE("region_split_diagnostics: frozen thresholds for b = 9, r = 4") {
  const RegionDiagnostics rd = region_split_diagnostics(
      builtin("std_exponential"), {64, 0.0, 0.5}, InversionConfig{});
  CHECK(rd.h1 == doctest::Approx(0.6112536410380642584).epsilon(1e-14));
  CHECK(rd.h2 == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(rd.g == doctest::Approx(0.21132486540518711775).epsilon(1e-14));
  CHECK(rd.q_geo == doctest::Approx(0.5 * (std::sqrt(rd.rho_hat) + 1.0))
                        .epsilon(1e-14));
  CHECK(rd.eta < 1.0);
  CHECK(rd.rho_hat < 1.0);
}

TEST_CASE("region_split_diagnostics: observed masses within analytic bounds") {
  for (int n : {64, 256}) {
    const RegionDiagnostics rd = region_split_diagnostics(
        builtin("std_exponential"), {n, 0.0, 0.5}, InversionConfig{});
    CAPTURE(n);
    CHECK(rd.i2_observed <= rd.i2_bound);
    CHECK(rd.i3_observed <= rd.i3_bound);
    CHECK(rd.i3_observed > 0.0);
  }
  // l1 = h1 n^{-1/3} still exceeds h2 at n = 64: the middle band is empty.
  const RegionDiagnostics r64 = region_split_diagnostics(
      builtin("std_exponential"), {64, 0.0, 0.5}, InversionConfig{});
  CHECK(r64.h1 / std::cbrt(64.0) > r64.h2);
  CHECK(r64.i2_observed == 0.0);
  const RegionDiagnostics r256 = region_split_diagnostics(
      builtin("std_exponential"), {256, 0.0, 0.5}, InversionConfig{});
  CHECK(r256.h1 / std::cbrt(256.0) < r256.h2);
  CHECK(r256.i2_observed > 0.0);
}

TEST_CASE("region_split_diagnostics: pieces sum back to the full integral") {
  // Valid split (l1 < h2) needs n >= 167 for b = 9.
  const IntervalQuery q{256, 0.3, 0.5};
  const RegionDiagnostics rd = region_split_diagnostics(
      builtin("std_exponential"), q, InversionConfig{});
  const SmoothedResult sm = smoothed_interval_detail(
      builtin("std_exponential"), q, InversionConfig{});
  const double sum = q.delta / (2.0 * 3.14159265358979323846) *
                     (rd.i1 + rd.i2_signed + rd.i3_signed).real();
  // Interior piece boundaries break the trapezoid's endpoint cancellation,
  // so the pieces carry real O(step^2) error the full-line run does not.
  CHECK(std::abs(sum - sm.value) < 5e-5);
}

TEST_CASE("region_split_diagnostics: geometric decay of the outer bound") {
  const InversionConfig cfg{0.0, 1e7, 1.0, 1e-3};
  const RegionDiagnostics a =
      region_split_diagnostics(builtin("atomic_mix"), {8, 0.0, 0.5}, cfg);
  const RegionDiagnostics b =
      region_split_diagnostics(builtin("atomic_mix"), {9, 0.0, 0.5}, cfg);
  CHECK(a.rho_hat == b.rho_hat);
  // i3_bound = 8 b rho^n n / delta^2, so consecutive n have ratio rho (n+1)/n.
  CHECK(b.i3_bound / a.i3_bound ==
        doctest::Approx(a.rho_hat * 9.0 / 8.0).epsilon(1e-12));
  // The atom pins rho_hat at ~atom mass even far out.
  CHECK(a.rho_hat > 0.5);
  CHECK(a.rho_hat < 1.0);
}

TEST_CASE("region_split_diagnostics: class constant must exceed 1") {
  Distribution fake = builtin("std_uniform");
  fake.abs_moment_r = 0.9;
  CHECK_THROWS_AS(
      region_split_diagnostics(fake, {16, 0.0, 0.5}, InversionConfig{}),
      std::invalid_argument);
}
