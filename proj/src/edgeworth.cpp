#include "intloc/edgeworth.hpp"

#include <cmath>
#include <stdexcept>

namespace intloc {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
}  // namespace

double normal_density(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

double hermite_che(int k, double x) {
  if (k < 0 || k > 10) {
    throw std::invalid_argument("hermite_che: k must be in [0, 10]");
  }
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - static_cast<double>(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double stone_approx(const IntervalQuery& q) {
  const double rn = std::sqrt(static_cast<double>(q.n));
  return q.delta / rn * normal_density(q.x / rn);
}

ApproxBreakdown refined_terms(double mu3, const IntervalQuery& q) {
  ApproxBreakdown out;
  const double rn = std::sqrt(static_cast<double>(q.n));
  out.v = q.x / rn;
  out.stone_term = q.delta / rn * normal_density(out.v);
  out.skew_term =
      out.stone_term * mu3 * out.v * (out.v * out.v - 3.0) / (6.0 * rn);
  out.delta_term = -out.stone_term * q.delta * out.v / (2.0 * rn);
  out.total = out.stone_term + out.skew_term + out.delta_term;
  return out;
}

ApproxBreakdown refined_approx(const Distribution& dist,
                               const IntervalQuery& q) {
  return refined_terms(dist.mu3, q);
}

double edgeworth_cdf(const CumulantSet& cum, int n, double v) {
  const double nn = static_cast<double>(n);
  const double phi_v = normal_density(v);
  const double cdf = 0.5 * std::erfc(-v * kInvSqrt2);
  const double first = cum.gamma3 * hermite_che(2, v) / (6.0 * std::sqrt(nn));
  const double second = (cum.gamma3 * cum.gamma3 * hermite_che(5, v) / 72.0 +
                         cum.gamma4 * hermite_che(3, v) / 24.0) /
                        nn;
  return cdf - phi_v * (first + second);
}

double cdf_difference_approx(const CumulantSet& cum, const IntervalQuery& q) {
  return refined_terms(cum.gamma3, q).total;
}

CumulantSet cumulants_of(const Distribution& dist) {
  if (dist.r != 4.0) {
    throw std::invalid_argument(
        "cumulants_of: gamma4 needs a stored fourth moment (r == 4)");
  }
  return CumulantSet{dist.mu3, dist.abs_moment_r - 3.0};
}

}  // namespace intloc
