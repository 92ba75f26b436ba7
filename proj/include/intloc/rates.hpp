#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "intloc/distributions.hpp"

namespace intloc {

enum class OracleChoice { fft, mc, inversion };
enum class ApproxChoice { stone, refined };

const char* oracle_choice_name(OracleChoice c);
const char* approx_choice_name(ApproxChoice c);
OracleChoice parse_oracle_choice(const std::string& s);
ApproxChoice parse_approx_choice(const std::string& s);

// Sweep over n of the sup over an x grid of per-unit-delta error.
// x grid: {k*s*sqrt(n) : |k*s| <= m}. h = 0 selects the default grid pitch
// for the FFT oracle; tail_tol applies to the inversion oracle.
struct SweepConfig {
  std::string dist;
  std::vector<int> n_list;
  double delta = 0.5;
  double m = 6.0;
  double s = 0.05;
  OracleChoice oracle = OracleChoice::fft;
  ApproxChoice approx = ApproxChoice::refined;
  double h = 0.0;
  std::uint64_t seed = 0;
  std::size_t mc_samples = 1000000;
  double tail_tol = 1e-9;
};

struct SweepPoint {
  int n = 0;
  double x = 0.0;
  double approx_value = 0.0;  // interval-probability scale
  double oracle_value = 0.0;
  double oracle_half_width = 0.0;
  double err_per_delta = 0.0;
  bool flagged = false;    // certificate > 10% of the observed error
  bool dominated = false;  // certificate >= the observed error
};

struct SweepN {
  int n = 0;
  double sup_err = 0.0;  // per-unit-delta
  double arg_max_x = 0.0;
  double approx_at_max = 0.0;
  double oracle_at_max = 0.0;
  double half_width_at_max = 0.0;
  std::size_t flagged_count = 0;
  std::size_t dominated_count = 0;
  std::size_t total_points = 0;
};

struct SweepResult {
  ApproxChoice approx = ApproxChoice::refined;
  double h_used = 0.0;
  std::vector<SweepPoint> points;  // sorted by (n, x)
  std::vector<SweepN> per_n;       // sorted by n
};

// Thrown when certificate-dominated points exceed 20% of the grid.
class SweepAborted : public std::runtime_error {
 public:
  explicit SweepAborted(const std::string& what) : std::runtime_error(what) {}
};

// One shared oracle pass, one result per requested approximation kind.
// Power-of-two doubling n_lists reuse the convolution chain across n.
std::vector<SweepResult> run_sweep_kinds(const SweepConfig& cfg,
                                         const std::vector<ApproxChoice>& kinds);

SweepResult run_sweep(const SweepConfig& cfg);

// Sup over the x grid for a single n (cfg.n_list must contain n).
double sup_error(const SweepConfig& cfg, int n);

struct RatePoint {
  double n = 0.0;
  double err = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares on (log n, log err). Requires >= 3 points with
// err > 0.
RateFit rate_fit(const std::vector<RatePoint>& points);

// Geometric floor demonstration at x = 0 for the half-atom mixture:
// floor = 2^-n <= P(S_n = 0) versus the refined formula value for a window
// of width delta < 2^-n.
struct AtomFloorReport {
  double floor = 0.0;
  double formula_value = 0.0;
  double ratio = 0.0;
};
AtomFloorReport atom_floor_demo(int n, double delta);

// |sum over |k*delta| <= 10 sqrt(n) of refined totals - 1|.
double mass_check(const Distribution& dist, int n, double delta);

}  // namespace intloc
