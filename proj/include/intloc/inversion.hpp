#pragma once

#include <cstddef>

#include "intloc/distributions.hpp"
#include "intloc/edgeworth.hpp"

namespace intloc {

// (1 - e^{-i*lambda}) / (i*lambda), extended by 1 at lambda = 0; series for
// |lambda| < 1e-4 to avoid cancellation.
cplx psi_eval(double lambda);

struct InversionConfig {
  double delta_smooth = 0.0;  // smoothing width; 0 selects delta / n
  double lambda_cap = 1e7;    // truncation search gives up past this point
  double step_scale = 1.0;    // multiplies the quadrature step rule
  double tail_tol = 1e-6;     // target truncation error
};

// One smoothed inversion run with its certificates. value approximates
// P(S_n - delta_smooth*U in [x, x + width)) (U uniform on [0,1]); with the
// upper kernel, P(S_n + delta_smooth*U in [x, x + width)).
struct SmoothedResult {
  double value = 0.0;
  double tail_cert = 0.0;      // truncation bound actually achieved
  double quad_cert = 0.0;      // step-halving estimate plus roundoff floor
  double imag_residual = 0.0;  // |imag part| of the scaled integral
  double lambda_used = 0.0;
  double step_used = 0.0;
  double delta_smooth = 0.0;
  bool tolerance_met = true;   // false: tail_tol unreachable within the cap
  double achievable_tail = 0.0;  // best tail bound within the cap
  std::size_t evals = 0;
};

// Composite-trapezoid evaluation of
//   (width/2pi) * Int_{-L}^{L} e^{-i*lambda*x} chf^n psi(ds*l) psi(width*l) dl
// with width = q.delta. Truncation point from the analytic tail bound
// (distribution-free rule improved by the closed-form |chf| tail envelope);
// quadrature certified by step halving. Single-threaded fixed summation
// order. When tail_tol is unreachable within lambda_cap no quadrature runs:
// tolerance_met = false, value = NaN, achievable_tail reports the best bound.
SmoothedResult smoothed_interval_detail(const Distribution& dist,
                                        const IntervalQuery& q,
                                        const InversionConfig& cfg,
                                        bool upper_kernel = false);

// Convenience wrapper: returns the value, throwing when the truncation
// tolerance is unattainable or the imaginary residual exceeds 1e-8.
double smoothed_interval_prob(const Distribution& dist, const IntervalQuery& q,
                              const InversionConfig& cfg);

// lower = smoothed P(S_n - dU in [x, x + delta - d)),
// upper = smoothed P(S_n + dU in [x, x + delta + d)), d = delta_smooth.
// Then lower - tol <= P(S_n in [x, x + delta)) <= upper + tol.
struct SandwichBracket {
  double lower = 0.0;
  double upper = 0.0;
  double tol = 0.0;  // max over both runs of tail + quadrature certificates
  SmoothedResult lower_run;
  SmoothedResult upper_run;
};

// Requires delta_smooth < q.delta (the lower window has width delta - d).
SandwichBracket sandwich_bracket(const Distribution& dist,
                                 const IntervalQuery& q,
                                 const InversionConfig& cfg);

// theta = (1 - chf(l) - l^2/2 - i*mu3*l^3/6) / l^3 and its class bound
// 2^{4-r} E|X|^r |l|^{r-3} / (r(r-1)(r-2)). Requires lambda != 0.
struct ExpansionResidual {
  cplx theta;
  double bound = 0.0;
};
ExpansionResidual chf_expansion_residual(const Distribution& dist,
                                         double lambda);

// Split of the inversion integral over |l| < h1*n^{-1/3} (B1),
// h1*n^{-1/3} <= |l| < h2 (B2), |l| >= h2 (B3), h2 = 1/b, with the analytic
// bounds for the B2/B3 pieces alongside the numerically observed
// |integrand| masses. Requires b = E|X|^r > 1.
struct RegionDiagnostics {
  double h1 = 0.0;
  double h2 = 0.0;
  double g = 0.0;
  cplx i1;          // signed integral over B1
  cplx i2_signed;   // signed integral over B2 (both signs of lambda)
  cplx i3_signed;   // signed integral over B3 up to the truncation point
  double i2_observed = 0.0;  // integral of |integrand| over B2
  double i3_observed = 0.0;  // over B3, plus the beyond-truncation envelope
  double i2_bound = 0.0;     // n^{-1/2}(1 + 1/(2 g h1^2 n^{1/3})) e^{-g h1^2 n^{1/3}}
  double i3_bound = 0.0;     // 8 b delta^{-2} rho^n n
  double rho_hat = 0.0;      // scanned sup of |chf| over |l| >= h2
  double q_geo = 0.0;        // (sqrt(rho_hat)+1)/2, recorded instantiation
  double eta = 0.0;          // rho_hat / q_geo^2
  double lambda_used = 0.0;
  double step_used = 0.0;
};

RegionDiagnostics region_split_diagnostics(const Distribution& dist,
                                           const IntervalQuery& q,
                                           const InversionConfig& cfg);

}  // namespace intloc
