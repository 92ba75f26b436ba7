#include "intloc/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace intloc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

// Compensated complex accumulator plus a compensated |term| tally for the
// roundoff floor. Fixed summation order keeps runs bit-identical.
class KernelSum {
 public:
  void add(cplx z) {
    add_part(re_, cre_, z.real());
    add_part(im_, cim_, z.imag());
    add_part(abs_, cabs_, std::abs(z));
  }
  cplx value() const { return {re_ + cre_, im_ + cim_}; }
  double abs_value() const { return abs_ + cabs_; }

 private:
  static void add_part(double& s, double& c, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v)) {
      c += (s - t) + v;
    } else {
      c += (v - t) + s;
    }
    s = t;
  }
  double re_ = 0.0, im_ = 0.0, abs_ = 0.0;
  double cre_ = 0.0, cim_ = 0.0, cabs_ = 0.0;
};

cplx chf_pow(const Distribution& dist, double lambda, int n) {
  const cplx f = dist.chf(lambda);
  const double r = std::abs(f);
  if (r == 0.0) return {0.0, 0.0};
  return std::polar(std::pow(r, n), static_cast<double>(n) * std::arg(f));
}

// Integrand of the smoothed inversion formula (without the width/2pi factor).
cplx kernel_eval(const Distribution& dist, int n, double x, double ds,
                 double width, bool upper, double lambda) {
  cplx f = chf_pow(dist, lambda, n);
  cplx smooth = psi_eval(ds * lambda);
  if (upper) smooth = std::conj(smooth);
  f *= smooth * psi_eval(width * lambda);
  return f * std::polar(1.0, -lambda * x);
}

struct PieceResult {
  cplx integral;        // refined trapezoid value
  double abs_integral;  // refined trapezoid of |integrand|
  double cert;          // |refined - coarse| + roundoff floor
  double step;          // refined step actually used
  std::size_t evals = 0;
};

// Trapezoid over [a, b] at the target step, then one midpoint refinement.
// Superconvergent for these smooth decaying integrands, so the halving
// difference is a generous certificate.
template <typename F>
PieceResult trap_refined(double a, double b, double step_target, F&& f) {
  PieceResult out;
  if (!(b > a)) {
    out.integral = {0.0, 0.0};
    out.abs_integral = 0.0;
    out.cert = 0.0;
    out.step = step_target;
    return out;
  }
  const auto n_cells = static_cast<std::size_t>(
      std::max(1.0, std::ceil((b - a) / step_target)));
  const double s = (b - a) / static_cast<double>(n_cells);

  KernelSum coarse;
  coarse.add(0.5 * f(a));
  for (std::size_t j = 1; j < n_cells; ++j) {
    coarse.add(f(a + static_cast<double>(j) * s));
  }
  coarse.add(0.5 * f(b));
  const cplx t1 = s * coarse.value();
  const double a1 = s * coarse.abs_value();

  KernelSum mid;
  for (std::size_t j = 0; j < n_cells; ++j) {
    mid.add(f(a + (static_cast<double>(j) + 0.5) * s));
  }
  const cplx t2 = 0.5 * t1 + 0.5 * s * mid.value();
  const double a2 = 0.5 * a1 + 0.5 * s * mid.abs_value();

  out.integral = t2;
  out.abs_integral = a2;
  out.cert = std::abs(t2 - t1) + 1e-14 * a2;
  out.step = 0.5 * s;
  out.evals = 2 * n_cells + 1;
  return out;
}

double step_rule(double x, int n, double step_scale) {
  const double rule =
      std::min(0.5, kPi / (4.0 * (1.0 + std::abs(x) +
                                  std::sqrt(static_cast<double>(n)))));
  return step_scale * rule;
}

// Truncation bound for cutting the integral at L: the kernel product obeys
// |psi(ds*l) psi(w*l)| <= 4/(ds*w*l^2), and |chf|^n <= env(L)^n past L, so
// the discarded two-sided tail of the scaled integral is at most
// (4/pi) * min(1, env(L)^n) / (ds * L).
double tail_bound(const Distribution& dist, int n, double ds, double lambda) {
  double envn = 1.0;
  if (dist.chf_tail_env) {
    const double env = std::min(1.0, dist.chf_tail_env(lambda));
    envn = std::pow(env, n);
  }
  return (4.0 / kPi) * envn / (ds * lambda);
}

struct TruncChoice {
  double lambda = 0.0;
  double tail = 0.0;
  bool met = true;
  double achievable = 0.0;
};

TruncChoice choose_lambda(const Distribution& dist, int n, double ds,
                          double tail_tol, double cap) {
  TruncChoice out;
  double lam = 1.0;
  double tb = tail_bound(dist, n, ds, lam);
  while (tb > tail_tol && lam < cap) {
    lam = std::min(cap, lam * 1.25);
    tb = tail_bound(dist, n, ds, lam);
  }
  out.lambda = lam;
  out.tail = tb;
  out.met = (tb <= tail_tol);
  out.achievable = tb;
  return out;
}

void validate_query(const IntervalQuery& q) {
  if (q.n < 1) throw std::invalid_argument("inversion: n must be >= 1");
  if (!(q.delta > 0.0)) {
    throw std::invalid_argument("inversion: delta must be > 0");
  }
}

double resolve_delta_smooth(const IntervalQuery& q,
                            const InversionConfig& cfg) {
  const double ds = cfg.delta_smooth > 0.0
                        ? cfg.delta_smooth
                        : q.delta / static_cast<double>(q.n);
  if (!(ds > 0.0) || ds > q.delta) {
    throw std::invalid_argument(
        "inversion: delta_smooth must lie in (0, delta]");
  }
  return ds;
}

// Smoothed probability of [x, x + width) for either kernel orientation.
SmoothedResult run_smoothed(const Distribution& dist, int n, double x,
                            double width, double ds,
                            const InversionConfig& cfg, bool upper) {
  SmoothedResult out;
  out.delta_smooth = ds;

  if (dist.support_radius > 0.0) {
    const double reach = static_cast<double>(n) * dist.support_radius;
    if (x - ds >= reach || x + width + ds <= -reach) {
      return out;  // event lies wholly outside the support of S_n
    }
  }

  const TruncChoice trunc =
      choose_lambda(dist, n, ds, cfg.tail_tol, cfg.lambda_cap);
  out.tolerance_met = trunc.met;
  out.achievable_tail = trunc.achievable;
  out.tail_cert = trunc.tail;
  out.lambda_used = trunc.lambda;
  if (!trunc.met) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const double step = step_rule(x, n, cfg.step_scale);
  auto f = [&](double lambda) {
    return kernel_eval(dist, n, x, ds, width, upper, lambda);
  };
  const PieceResult piece =
      trap_refined(-trunc.lambda, trunc.lambda, step, f);

  const double scale = width / kTwoPi;
  out.value = scale * piece.integral.real();
  out.imag_residual = scale * std::abs(piece.integral.imag());
  out.quad_cert = scale * piece.cert;
  out.step_used = piece.step;
  out.evals = piece.evals;
  return out;
}

}  // namespace

cplx psi_eval(double lambda) {
  const double a = std::abs(lambda);
  if (a < 1e-4) {
    return {1.0 - lambda * lambda / 6.0,
            -lambda / 2.0 + lambda * lambda * lambda / 24.0};
  }
  // (1 - e^{-il}) / (il) = (1 - cos l + i sin l) / (il)
  const cplx num(1.0 - std::cos(lambda), std::sin(lambda));
  return num / cplx(0.0, lambda);
}

SmoothedResult smoothed_interval_detail(const Distribution& dist,
                                        const IntervalQuery& q,
                                        const InversionConfig& cfg,
                                        bool upper_kernel) {
  validate_query(q);
  const double ds = resolve_delta_smooth(q, cfg);
  return run_smoothed(dist, q.n, q.x, q.delta, ds, cfg, upper_kernel);
}

double smoothed_interval_prob(const Distribution& dist, const IntervalQuery& q,
                              const InversionConfig& cfg) {
  const SmoothedResult r = smoothed_interval_detail(dist, q, cfg);
  if (!r.tolerance_met) {
    throw std::runtime_error(
        "smoothed_interval_prob: truncation tolerance unattainable within "
        "the lambda cap; achievable tail bound = " +
        std::to_string(r.achievable_tail));
  }
  if (r.imag_residual > 1e-8) {
    throw std::runtime_error(
        "smoothed_interval_prob: imaginary residual " +
        std::to_string(r.imag_residual) + " exceeds 1e-8");
  }
  return r.value;
}

SandwichBracket sandwich_bracket(const Distribution& dist,
                                 const IntervalQuery& q,
                                 const InversionConfig& cfg) {
  validate_query(q);
  const double ds = resolve_delta_smooth(q, cfg);
  if (!(ds < q.delta)) {
    throw std::invalid_argument(
        "sandwich_bracket: delta_smooth must be < delta (the lower window "
        "has width delta - delta_smooth)");
  }
  SandwichBracket out;
  out.lower_run =
      run_smoothed(dist, q.n, q.x, q.delta - ds, ds, cfg, false);
  out.upper_run = run_smoothed(dist, q.n, q.x, q.delta + ds, ds, cfg, true);
  if (!out.lower_run.tolerance_met || !out.upper_run.tolerance_met) {
    const double worst =
        std::max(out.lower_run.achievable_tail, out.upper_run.achievable_tail);
    throw std::runtime_error(
        "sandwich_bracket: truncation tolerance unattainable within the "
        "lambda cap; achievable tail bound = " +
        std::to_string(worst));
  }
  out.lower = out.lower_run.value;
  out.upper = out.upper_run.value;
  const double lower_tol = out.lower_run.tail_cert + out.lower_run.quad_cert +
                           out.lower_run.imag_residual;
  const double upper_tol = out.upper_run.tail_cert + out.upper_run.quad_cert +
                           out.upper_run.imag_residual;
  out.tol = std::max(lower_tol, upper_tol);
  return out;
}

ExpansionResidual chf_expansion_residual(const Distribution& dist,
                                         double lambda) {
  if (lambda == 0.0) {
    throw std::invalid_argument("chf_expansion_residual: lambda must be != 0");
  }
  const double l2 = lambda * lambda;
  const double l3 = l2 * lambda;
  const cplx one_minus = dist.one_minus_chf(lambda);
  ExpansionResidual out;
  out.theta =
      (one_minus - cplx(l2 / 2.0, dist.mu3 * l3 / 6.0)) / l3;
  const double r = dist.r;
  out.bound = std::pow(2.0, 4.0 - r) * dist.abs_moment_r *
              std::pow(std::abs(lambda), r - 3.0) /
              (r * (r - 1.0) * (r - 2.0));
  return out;
}

RegionDiagnostics region_split_diagnostics(const Distribution& dist,
                                           const IntervalQuery& q,
                                           const InversionConfig& cfg) {
  validate_query(q);
  const double ds = resolve_delta_smooth(q, cfg);
  const double b = dist.abs_moment_r;
  if (!(b > 1.0)) {
    throw std::invalid_argument(
        "region_split_diagnostics: needs b = E|X|^r > 1; h2 = 1/b would not "
        "be below 1 and g hits the (1 - b^{-2})^{-2} singularity");
  }
  const double r = dist.r;
  RegionDiagnostics out;
  out.h2 = 1.0 / b;
  const double inv_b2 = 1.0 / (b * b);
  out.h1 = std::pow(std::pow(b, 3.0 / r) / 6.0 + b / 3.0 +
                        0.5 / ((1.0 - inv_b2) * (1.0 - inv_b2)),
                    -1.0 / 3.0);
  out.g = (1.0 - std::pow(b, 3.0 / r - 1.0)) / 2.0;

  const int n = q.n;
  const double cbrt_n = std::cbrt(static_cast<double>(n));
  const double l1 = out.h1 / cbrt_n;

  const TruncChoice trunc =
      choose_lambda(dist, n, ds, cfg.tail_tol, cfg.lambda_cap);
  if (!trunc.met) {
    throw std::runtime_error(
        "region_split_diagnostics: truncation tolerance unattainable within "
        "the lambda cap; achievable tail bound = " +
        std::to_string(trunc.achievable));
  }
  const double lam = trunc.lambda;
  out.lambda_used = lam;
  const double step = step_rule(q.x, n, cfg.step_scale);
  auto f = [&](double lambda) {
    return kernel_eval(dist, n, q.x, ds, q.delta, false, lambda);
  };

  const PieceResult p1 = trap_refined(-l1, l1, step, f);
  out.i1 = p1.integral;
  out.step_used = p1.step;

  const double b2_hi = std::min(out.h2, lam);
  if (l1 < b2_hi) {
    const PieceResult pos = trap_refined(l1, b2_hi, step, f);
    const PieceResult neg = trap_refined(-b2_hi, -l1, step, f);
    out.i2_signed = pos.integral + neg.integral;
    out.i2_observed = pos.abs_integral + neg.abs_integral;
  }
  if (out.h2 < lam) {
    const PieceResult pos = trap_refined(out.h2, lam, step, f);
    const PieceResult neg = trap_refined(-lam, -out.h2, step, f);
    out.i3_signed = pos.integral + neg.integral;
    // Beyond the truncation point the |integrand| mass is at most the
    // unscaled envelope tail 2 * env^n * 4/(ds * delta * lam).
    double envn = 1.0;
    if (dist.chf_tail_env) {
      envn = std::pow(std::min(1.0, dist.chf_tail_env(lam)), n);
    }
    out.i3_observed = pos.abs_integral + neg.abs_integral +
                      8.0 * envn / (ds * q.delta * lam);
  }

  const double gh = out.g * out.h1 * out.h1 * cbrt_n;
  out.i2_bound = (1.0 + 0.5 / gh) * std::exp(-gh) /
                 std::sqrt(static_cast<double>(n));

  // rho = sup of |chf| over |l| >= h2: grid scan up to a cap, closed-form
  // envelope past it.
  const double scan_hi = std::max(out.h2 + 30.0, std::min(lam, 2000.0));
  const CramerScan scan = cramer_sup(dist, out.h2, scan_hi, 1e-3);
  double rho = scan.rho_hat;
  if (dist.chf_tail_env) {
    rho = std::max(rho, std::min(1.0, dist.chf_tail_env(scan_hi)));
  }
  out.rho_hat = rho;
  out.q_geo = 0.5 * (std::sqrt(rho) + 1.0);
  out.eta = rho / (out.q_geo * out.q_geo);
  out.i3_bound = 8.0 * b * std::pow(rho, n) * static_cast<double>(n) /
                 (q.delta * q.delta);
  return out;
}

}  // namespace intloc
