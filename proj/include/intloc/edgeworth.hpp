#pragma once

#include "intloc/distributions.hpp"

namespace intloc {

// One target probability P(S_n in [x, x + delta)).
struct IntervalQuery {
  int n = 1;
  double x = 0.0;
  double delta = 1.0;
};

// Interval-probability expansion split into its three terms; all on
// probability scale (divide by delta for the per-unit scale).
// total may be negative for extreme v; callers that need a probability
// clamp explicitly.
struct ApproxBreakdown {
  double v = 0.0;  // x n^{-1/2}
  double stone_term = 0.0;
  double skew_term = 0.0;
  double delta_term = 0.0;
  double total = 0.0;
};

struct CumulantSet {
  double gamma3 = 0.0;
  double gamma4 = 0.0;
};

double normal_density(double t);

// Chebyshev-Hermite polynomial He_k by the three-term recurrence; k <= 10.
double hermite_che(int k, double x);

// Leading term: delta * n^{-1/2} * phi(x n^{-1/2}).
double stone_approx(const IntervalQuery& q);

// Shared evaluation core; refined_approx and cdf_difference_approx both call
// this so the two surfaces are bit-identical.
ApproxBreakdown refined_terms(double mu3, const IntervalQuery& q);

ApproxBreakdown refined_approx(const Distribution& dist, const IntervalQuery& q);

// CDF expansion with skew and kurtosis corrections at argument v.
double edgeworth_cdf(const CumulantSet& cum, int n, double v);

// Interval probability as a difference of expanded CDFs, reduced to closed
// form; equals refined_approx's total.
double cdf_difference_approx(const CumulantSet& cum, const IntervalQuery& q);

// gamma3 = mu3; gamma4 = E X^4 - 3, available when the stored moment order is 4.
CumulantSet cumulants_of(const Distribution& dist);

}  // namespace intloc
