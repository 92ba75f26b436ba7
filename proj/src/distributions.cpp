#include "intloc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace intloc {
namespace {

constexpr double kSqrt3 = 1.7320508075688772935274463415059;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kPi = 3.1415926535897932384626433832795;

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t * kInvSqrt2); }

// 1 - sin(z)/z, stable for small z via the alternating Taylor series.
double one_minus_sinc(double z) {
  const double z2 = z * z;
  if (std::abs(z) < 0.25) {
    // z^2/6 - z^4/120 + z^6/5040 - z^8/362880; next term < 3e-12 relative.
    return z2 / 6.0 *
           (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0)));
  }
  return 1.0 - std::sin(z) / z;
}

// z - sin(z), stable for small z.
double z_minus_sin(double z) {
  const double z2 = z * z;
  if (std::abs(z) < 0.5) {
    return z * z2 / 6.0 *
           (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0)));
  }
  return z - std::sin(z);
}

Distribution make_std_uniform() {
  Distribution d;
  d.name = "std_uniform";
  d.mu3 = 0.0;
  d.r = 4.0;
  d.abs_moment_r = 9.0 / 5.0;  // E X^4 of U(-sqrt3, sqrt3)
  d.support_radius = kSqrt3;
  d.grid_radius = 8.0;
  d.chf = [](double l) -> cplx {
    const double z = kSqrt3 * l;
    if (std::abs(z) < 1e-8) return cplx(1.0 - z * z / 6.0, 0.0);
    return cplx(std::sin(z) / z, 0.0);
  };
  d.one_minus_chf = [](double l) -> cplx {
    return cplx(one_minus_sinc(kSqrt3 * l), 0.0);
  };
  d.chf_tail_env = [](double L) -> double {
    const double z = kSqrt3 * std::abs(L);
    if (z <= 0.0) return 1.0;
    if (z < kPi) return std::max(std::sin(z) / z, 1.0 / kPi);
    return 1.0 / z;
  };
  d.cont_cdf = [](double x) -> double {
    if (x <= -kSqrt3) return 0.0;
    if (x >= kSqrt3) return 1.0;
    return (x + kSqrt3) / (2.0 * kSqrt3);
  };
  d.cont_cell_mass = [](double lo, double hi) -> double {
    const double a = std::max(lo, -kSqrt3);
    const double b = std::min(hi, kSqrt3);
    return b > a ? (b - a) / (2.0 * kSqrt3) : 0.0;
  };
  d.sample = [](Rng& rng) -> double { return kSqrt3 * (2.0 * rng.next_unit() - 1.0); };
  return d;
}

Distribution make_std_exponential() {
  Distribution d;
  d.name = "std_exponential";
  d.mu3 = 2.0;
  d.r = 4.0;
  d.abs_moment_r = 9.0;  // E (E-1)^4 = E|X|^4
  d.support_radius = 0.0;
  d.grid_radius = 32.0;  // exp(-(32+1)) ~ 5e-15
  d.chf = [](double l) -> cplx {
    return std::exp(cplx(0.0, -l)) / cplx(1.0, -l);
  };
  d.one_minus_chf = [](double l) -> cplx {
    // 1 - e^{-il}/(1-il) = ((1-cos l) - i(l - sin l)) / (1 - il)
    const double s = std::sin(0.5 * l);
    return cplx(2.0 * s * s, -z_minus_sin(l)) / cplx(1.0, -l);
  };
  d.chf_tail_env = [](double L) -> double {
    return 1.0 / std::sqrt(1.0 + L * L);
  };
  d.cont_cdf = [](double x) -> double {
    return x > -1.0 ? -std::expm1(-(x + 1.0)) : 0.0;
  };
  d.cont_cell_mass = [](double lo, double hi) -> double {
    const double a = std::max(lo, -1.0);
    const double b = std::max(hi, -1.0);
    if (b <= a) return 0.0;
    return std::exp(-(a + 1.0)) * -std::expm1(-(b - a));
  };
  d.sample = [](Rng& rng) -> double {
    return -std::log(rng.next_unit_open()) - 1.0;
  };
  return d;
}

Distribution make_std_laplace() {
  const double beta = kInvSqrt2;  // scale for unit variance
  Distribution d;
  d.name = "std_laplace";
  d.mu3 = 0.0;
  d.r = 4.0;
  d.abs_moment_r = 6.0;  // 24 beta^4
  d.support_radius = 0.0;
  d.grid_radius = 24.0;  // 0.5 exp(-24 sqrt2) ~ 9e-16
  d.chf = [](double l) -> cplx { return cplx(1.0 / (1.0 + 0.5 * l * l), 0.0); };
  d.one_minus_chf = [](double l) -> cplx {
    const double h = 0.5 * l * l;
    return cplx(h / (1.0 + h), 0.0);
  };
  d.chf_tail_env = [](double L) -> double { return 1.0 / (1.0 + 0.5 * L * L); };
  d.cont_cdf = [beta](double x) -> double {
    return x < 0.0 ? 0.5 * std::exp(x / beta) : 1.0 - 0.5 * std::exp(-x / beta);
  };
  d.cont_cell_mass = [beta](double lo, double hi) -> double {
    if (hi <= lo) return 0.0;
    if (hi <= 0.0) return 0.5 * std::exp(lo / beta) * std::expm1((hi - lo) / beta);
    if (lo >= 0.0) return 0.5 * std::exp(-hi / beta) * std::expm1((hi - lo) / beta);
    return 0.5 * -std::expm1(lo / beta) + 0.5 * -std::expm1(-hi / beta);
  };
  d.sample = [beta](Rng& rng) -> double {
    const double u = rng.next_unit_open();
    return u < 0.5 ? beta * std::log(2.0 * u) : -beta * std::log(2.0 * (1.0 - u));
  };
  return d;
}

Distribution make_atomic_mix() {
  const double sd = std::sqrt(2.0);  // continuous part is N(0, 2)
  Distribution d;
  d.name = "atomic_mix";
  d.mu3 = 0.0;
  d.r = 4.0;
  d.abs_moment_r = 6.0;  // 0.5 * 3 * 4
  d.support_radius = 0.0;
  d.grid_radius = 17.0;  // 0.5 erfc(17/2) ~ 1e-32
  d.has_atom = true;
  d.atom = {0.0, 0.5};
  d.chf = [](double l) -> cplx {
    return cplx(0.5 + 0.5 * std::exp(-l * l), 0.0);
  };
  d.one_minus_chf = [](double l) -> cplx {
    return cplx(-0.5 * std::expm1(-l * l), 0.0);
  };
  d.chf_tail_env = [](double L) -> double {
    return 0.5 + 0.5 * std::exp(-L * L);
  };
  d.cont_cdf = [sd](double x) -> double { return 0.5 * std_normal_cdf(x / sd); };
  d.cont_cell_mass = [](double lo, double hi) -> double {
    if (hi <= lo) return 0.0;
    // erfc differences taken on the decaying side of the tail.
    if (lo >= 0.0) return 0.25 * (std::erfc(lo * 0.5) - std::erfc(hi * 0.5));
    if (hi <= 0.0) return 0.25 * (std::erfc(-hi * 0.5) - std::erfc(-lo * 0.5));
    return 0.25 * (2.0 - std::erfc(-lo * 0.5) - std::erfc(hi * 0.5));
  };
  d.sample = [sd](Rng& rng) -> double {
    const double u = rng.next_unit();
    if (u < 0.5) return 0.0;
    return sd * rng.next_normal();
  };
  return d;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "std_uniform", "std_exponential", "std_laplace", "atomic_mix"};
  return names;
}

const Distribution& builtin(const std::string& name) {
  static const Distribution uniform = make_std_uniform();
  static const Distribution exponential = make_std_exponential();
  static const Distribution laplace = make_std_laplace();
  static const Distribution atomic = make_atomic_mix();
  if (name == "std_uniform") return uniform;
  if (name == "std_exponential") return exponential;
  if (name == "std_laplace") return laplace;
  if (name == "atomic_mix") return atomic;
  std::string msg = "unknown distribution '" + name + "'; valid names:";
  for (const auto& n : builtin_names()) msg += " " + n;
  throw std::invalid_argument(msg);
}

StandardizeMap standardize(double raw_mean, double raw_sd, double raw_mu3) {
  if (!(raw_sd > 0.0)) {
    throw std::invalid_argument("standardize: raw_sd must be > 0");
  }
  StandardizeMap m;
  m.shift = -raw_mean;
  m.scale = 1.0 / raw_sd;
  m.mu3 = raw_mu3 / (raw_sd * raw_sd * raw_sd);
  return m;
}

CramerScan cramer_sup(const Distribution& dist, double epsilon,
                      double lambda_max, double grid_step) {
  if (!(epsilon > 0.0) || !(epsilon < lambda_max)) {
    throw std::invalid_argument("cramer_sup: need 0 < epsilon < lambda_max");
  }
  if (!(grid_step > 0.0) || grid_step > 1e-2) {
    throw std::invalid_argument("cramer_sup: need 0 < grid_step <= 1e-2");
  }
  CramerScan scan;
  scan.epsilon = epsilon;
  scan.lambda_max = lambda_max;
  scan.grid_step = grid_step;
  const auto count =
      static_cast<std::size_t>(std::floor((lambda_max - epsilon) / grid_step));
  for (std::size_t k = 0; k <= count; ++k) {
    const double l = epsilon + static_cast<double>(k) * grid_step;
    const double m = std::abs(dist.chf(l));
    if (m > scan.rho_hat) {
      scan.rho_hat = m;
      scan.arg_max = l;
    }
  }
  const double at_end = std::abs(dist.chf(lambda_max));
  if (at_end > scan.rho_hat) {
    scan.rho_hat = at_end;
    scan.arg_max = lambda_max;
  }
  return scan;
}

std::vector<double> sample_sum(const Distribution& dist, int n,
                               std::uint64_t seed, std::size_t count) {
  if (n < 1) throw std::invalid_argument("sample_sum: n must be >= 1");
  std::vector<double> out(count);
  constexpr std::size_t kBlock = 65536;
  const auto nblocks =
      static_cast<std::int64_t>((count + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    Rng rng(block_seed(seed, static_cast<std::uint64_t>(b)));
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(count, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += dist.sample(rng);
      out[i] = s;
    }
  }
  return out;
}

}  // namespace intloc
