#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "intloc/rng.hpp"

namespace intloc {

using cplx = std::complex<double>;

struct AtomInfo {
  double location = 0.0;
  double mass = 0.0;
};

// A standardized (mean 0, variance 1) non-lattice law.
//
// chf is the closed-form characteristic function. one_minus_chf returns
// 1 - chf(l) without cancellation near l = 0 (needed by expansion residuals).
// chf_tail_env(L) is a closed-form upper bound for sup over |l| >= L of
// |chf(l)|, non-increasing in L; it certifies quadrature truncation.
// cont_cdf / cont_cell_mass describe the continuous part only (they integrate
// to 1 minus the atom mass); cont_cell_mass(lo, hi) is a cancellation-safe
// CDF increment usable deep in the tails.
struct Distribution {
  std::string name;
  double mu3 = 0.0;
  double r = 4.0;              // moment order of the class bound
  double abs_moment_r = 0.0;   // E|X|^r, the class constant b
  double support_radius = 0.0; // 0 means unbounded support
  double grid_radius = 0.0;    // radius where the tail mass drops below ~1e-14
  bool has_atom = false;
  AtomInfo atom;
  std::function<cplx(double)> chf;
  std::function<cplx(double)> one_minus_chf;
  std::function<double(double)> chf_tail_env;
  std::function<double(double)> cont_cdf;
  std::function<double(double, double)> cont_cell_mass;
  std::function<double(Rng&)> sample;
};

struct CramerScan {
  double epsilon = 0.0;
  double lambda_max = 0.0;
  double grid_step = 0.0;
  double rho_hat = 0.0;  // observed sup of |chf| on the scan grid
  double arg_max = 0.0;
};

// Affine map y = (x + shift) * scale taking a raw law to mean 0, variance 1.
struct StandardizeMap {
  double shift = 0.0;
  double scale = 1.0;
  double mu3 = 0.0;  // third moment after the map
};

const Distribution& builtin(const std::string& name);
const std::vector<std::string>& builtin_names();

StandardizeMap standardize(double raw_mean, double raw_sd, double raw_mu3);

// Grid scan of |chf| over [epsilon, lambda_max]; negative half omitted by
// conjugate symmetry. Requires 0 < epsilon < lambda_max and grid_step <= 1e-2.
CramerScan cramer_sup(const Distribution& dist, double epsilon,
                      double lambda_max, double grid_step);

// count i.i.d. draws of S_n = X_1 + ... + X_n. Blocked per-stream seeding:
// identical (seed, n, count) reproduce bit-identical output at any thread count.
std::vector<double> sample_sum(const Distribution& dist, int n,
                               std::uint64_t seed, std::size_t count);

}  // namespace intloc
