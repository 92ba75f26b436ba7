#pragma once

#include <cstddef>
#include <vector>

#include "intloc/distributions.hpp"

namespace intloc {

// Cell-centered probability mass grid. Cell k is centered at origin + k*h and
// covers [center - h/2, center + h/2). origin is always an integer multiple of
// h, so 0 sits exactly on a cell center and convolution grids stay aligned.
//
// masses holds the continuous part (exact CDF increments at construction);
// atoms is an exact point-mass list kept outside the cells so interval sums
// can treat point masses without smearing. deficit = 1 - total accounted mass
// (tail truncation plus window trims), never silently dropped.
struct GridPmf {
  double origin = 0.0;
  double h = 0.0;
  std::vector<double> masses;
  std::vector<AtomInfo> atoms;
  double deficit = 0.0;

  double cell_center(std::size_t k) const {
    return origin + static_cast<double>(k) * h;
  }
  double total_mass() const;  // cells + atoms, compensated summation
  double mean() const;
  double variance() const;
};

// Deterministic compensated (Neumaier) sum.
double neumaier_sum(const double* v, std::size_t n);

// Exact CDF increments over cells covering [-radius, radius].
// Requires 0 < h <= 1e-2 and radius >= 8.
GridPmf discretize(const Distribution& dist, double h, double radius);

// n-fold convolution by one zero-padded transform, pointwise n-th power,
// inverse transform. Output spans the full n-fold support of the input grid.
// Negative dust (|v| <= 1e-12) is clipped and the cells renormalized to the
// exact n-th power of the input mass. Throws std::length_error with a minimal
// feasible h when the padded transform exceeds the memory budget.
GridPmf convolve_n(const GridPmf& pmf, int n);

// Distribution of S_n on the grid, built by a binary squaring/product chain
// with guarded stage windows: stage m keeps |s| <= min(m * support_radius,
// 8 sqrt(m) + 44); trimmed mass goes into deficit. For n <= 121 the final
// window contains the default +-12 sqrt(n) radius.
GridPmf sn_pmf(const Distribution& dist, int n, double h);

// One doubling step of the chain: S_{2m} from S_m, trimmed to the stage-2m
// window. Consumes the input grid (peak-memory control).
GridPmf sn_double(const Distribution& dist, GridPmf&& sn_m, int m);

// Mass of [x, x + delta): boundary cells split proportionally to overlap,
// atom masses included exactly when their location lies in the interval.
double window_prob(const GridPmf& pmf, double x, double delta);

// O(1)-per-query interval sums over one pmf (prefix-summed cells).
class PmfWindowSummer {
 public:
  explicit PmfWindowSummer(const GridPmf& pmf);
  double prob(double x, double delta) const;

 private:
  double mass_below(double t) const;
  const GridPmf& pmf_;
  std::vector<double> prefix_;  // prefix_[k] = mass of cells 0..k-1
};

// Grid pitch for the FFT oracle: fine enough that the discretization
// certificate (2h/delta) * value stays below the error scales being measured,
// coarse enough that the padded transforms fit the memory budget.
double default_grid_h(double delta, int n_max);

// Memory budget for one padded complex transform buffer, in cells.
std::size_t fft_budget_cells();

}  // namespace intloc
