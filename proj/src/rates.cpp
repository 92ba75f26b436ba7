#include "intloc/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "intloc/edgeworth.hpp"
#include "intloc/grid_pmf.hpp"
#include "intloc/inversion.hpp"
#include "intloc/oracle.hpp"
#include "intloc/rng.hpp"

namespace intloc {

namespace {

void validate_config(const SweepConfig& cfg) {
  if (cfg.n_list.empty()) {
    throw std::invalid_argument("sweep: n_list must be non-empty");
  }
  int prev = 0;
  for (int n : cfg.n_list) {
    if (n < 1) throw std::invalid_argument("sweep: n values must be >= 1");
    if (n <= prev) {
      throw std::invalid_argument("sweep: n_list must be strictly increasing");
    }
    prev = n;
  }
  if (!(cfg.delta > 0.0)) {
    throw std::invalid_argument("sweep: delta must be > 0");
  }
  if (!(cfg.m >= 4.0)) throw std::invalid_argument("sweep: m must be >= 4");
  if (!(cfg.s > 0.0)) throw std::invalid_argument("sweep: s must be > 0");
}

std::vector<double> x_grid(const SweepConfig& cfg, int n) {
  const auto kmax = static_cast<long long>(std::floor(cfg.m / cfg.s + 1e-9));
  const double rn = std::sqrt(static_cast<double>(n));
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(2 * kmax + 1));
  for (long long k = -kmax; k <= kmax; ++k) {
    xs.push_back(static_cast<double>(k) * cfg.s * rn);
  }
  return xs;
}

bool is_doubling_chain(const std::vector<int>& ns) {
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] != 2 * ns[i - 1]) return false;
  }
  return ns.size() >= 2;
}

struct OraclePoint {
  double value = 0.0;
  double half = 0.0;
};

using OracleTable = std::vector<std::vector<OraclePoint>>;  // [n index][x index]

void fill_fft_rows(const Distribution& dist, const SweepConfig& cfg, double h,
                   OracleTable& table) {
  const auto emit = [&](std::size_t ni, const GridPmf& pmf) {
    const PmfWindowSummer summer(pmf);
    const std::vector<double> xs = x_grid(cfg, cfg.n_list[ni]);
    auto& row = table[ni];
    row.resize(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const OracleEstimate est = interval_prob_from_pmf(
          pmf, summer, {cfg.n_list[ni], xs[j], cfg.delta});
      row[j] = {est.value, est.error_half_width};
    }
  };

  if (is_doubling_chain(cfg.n_list)) {
    GridPmf acc = sn_pmf(dist, cfg.n_list.front(), h);
    emit(0, acc);
    for (std::size_t i = 1; i < cfg.n_list.size(); ++i) {
      acc = sn_double(dist, std::move(acc), cfg.n_list[i - 1]);
      emit(i, acc);
    }
  } else {
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
      emit(i, sn_pmf(dist, cfg.n_list[i], h));
    }
  }
}

void fill_mc_rows(const Distribution& dist, const SweepConfig& cfg,
                  OracleTable& table) {
  const auto samples = static_cast<double>(cfg.mc_samples);
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    const int n = cfg.n_list[i];
    // One sample vector per n, shared across the x grid; per-point intervals
    // stay marginally valid and the sort makes counting O(log N) per x.
    std::vector<double> sums = sample_sum(
        dist, n, block_seed(cfg.seed, static_cast<std::uint64_t>(n)),
        cfg.mc_samples);
    std::sort(sums.begin(), sums.end());
    const std::vector<double> xs = x_grid(cfg, n);
    auto& row = table[i];
    row.resize(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const auto lo = std::lower_bound(sums.begin(), sums.end(), xs[j]);
      const auto hi =
          std::lower_bound(sums.begin(), sums.end(), xs[j] + cfg.delta);
      const double p = static_cast<double>(hi - lo) / samples;
      const double wald = 1.96 * std::sqrt(p * (1.0 - p) / samples);
      row[j] = {p, std::max(wald, 1.96 / (2.0 * samples))};
    }
  }
}

void fill_inversion_rows(const Distribution& dist, const SweepConfig& cfg,
                         OracleTable& table) {
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    const int n = cfg.n_list[i];
    InversionConfig icfg;
    icfg.tail_tol = cfg.tail_tol;
    // delta_smooth defaults to delta/n; n = 1 needs a strictly smaller width
    // for the sandwich's lower window.
    if (n == 1) icfg.delta_smooth = cfg.delta / 2.0;
    const std::vector<double> xs = x_grid(cfg, n);
    auto& row = table[i];
    row.resize(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const SandwichBracket br =
          sandwich_bracket(dist, {n, xs[j], cfg.delta}, icfg);
      row[j] = {0.5 * (br.lower + br.upper),
                0.5 * (br.upper - br.lower) + br.tol};
    }
  }
}

SweepResult reduce_kind(const Distribution& dist, const SweepConfig& cfg,
                        ApproxChoice kind, double h_used,
                        const OracleTable& table) {
  SweepResult out;
  out.approx = kind;
  out.h_used = h_used;
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    const int n = cfg.n_list[i];
    const std::vector<double> xs = x_grid(cfg, n);
    SweepN agg;
    agg.n = n;
    agg.total_points = xs.size();
    agg.sup_err = -1.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const ApproxBreakdown bd =
          refined_terms(dist.mu3, {n, xs[j], cfg.delta});
      SweepPoint pt;
      pt.n = n;
      pt.x = xs[j];
      pt.approx_value =
          (kind == ApproxChoice::stone) ? bd.stone_term : bd.total;
      pt.oracle_value = table[i][j].value;
      pt.oracle_half_width = table[i][j].half;
      pt.err_per_delta =
          std::abs(pt.approx_value - pt.oracle_value) / cfg.delta;
      const double cert_per_delta = pt.oracle_half_width / cfg.delta;
      pt.flagged = cert_per_delta > 0.1 * pt.err_per_delta;
      pt.dominated = (cert_per_delta >= pt.err_per_delta) &&
                     !(cert_per_delta == 0.0 && pt.err_per_delta == 0.0);
      if (pt.flagged) ++agg.flagged_count;
      if (pt.dominated) ++agg.dominated_count;
      if (pt.err_per_delta > agg.sup_err) {
        agg.sup_err = pt.err_per_delta;
        agg.arg_max_x = pt.x;
        agg.approx_at_max = pt.approx_value;
        agg.oracle_at_max = pt.oracle_value;
        agg.half_width_at_max = pt.oracle_half_width;
      }
      out.points.push_back(pt);
    }
    if (agg.dominated_count * 5 > agg.total_points) {
      std::ostringstream msg;
      msg << "sweep aborted: " << agg.dominated_count << " of "
          << agg.total_points << " grid points certificate-dominated at n="
          << n << " for " << approx_choice_name(kind)
          << "; improve oracle resolution (smaller h for fft, more samples "
             "for mc, tighter tail_tol for inversion)";
      throw SweepAborted(msg.str());
    }
    out.per_n.push_back(agg);
  }
  return out;
}

}  // namespace

const char* oracle_choice_name(OracleChoice c) {
  switch (c) {
    case OracleChoice::fft:
      return "fft";
    case OracleChoice::mc:
      return "mc";
    case OracleChoice::inversion:
      return "inversion";
  }
  return "unknown";
}

const char* approx_choice_name(ApproxChoice c) {
  return c == ApproxChoice::stone ? "stone" : "refined";
}

OracleChoice parse_oracle_choice(const std::string& s) {
  if (s == "fft") return OracleChoice::fft;
  if (s == "mc") return OracleChoice::mc;
  if (s == "inversion") return OracleChoice::inversion;
  throw std::invalid_argument("unknown oracle kind: " + s);
}

ApproxChoice parse_approx_choice(const std::string& s) {
  if (s == "stone") return ApproxChoice::stone;
  if (s == "refined") return ApproxChoice::refined;
  throw std::invalid_argument("unknown approx kind: " + s);
}

std::vector<SweepResult> run_sweep_kinds(
    const SweepConfig& cfg, const std::vector<ApproxChoice>& kinds) {
  validate_config(cfg);
  if (kinds.empty()) {
    throw std::invalid_argument("sweep: at least one approx kind");
  }
  const Distribution& dist = builtin(cfg.dist);

  double h_used = 0.0;
  OracleTable table(cfg.n_list.size());
  switch (cfg.oracle) {
    case OracleChoice::fft:
      h_used = cfg.h > 0.0 ? cfg.h
                           : default_grid_h(cfg.delta, cfg.n_list.back());
      fill_fft_rows(dist, cfg, h_used, table);
      break;
    case OracleChoice::mc:
      fill_mc_rows(dist, cfg, table);
      break;
    case OracleChoice::inversion:
      fill_inversion_rows(dist, cfg, table);
      break;
  }

  std::vector<SweepResult> out;
  out.reserve(kinds.size());
  for (ApproxChoice kind : kinds) {
    out.push_back(reduce_kind(dist, cfg, kind, h_used, table));
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  return std::move(run_sweep_kinds(cfg, {cfg.approx}).front());
}

double sup_error(const SweepConfig& cfg, int n) {
  bool found = false;
  for (int v : cfg.n_list) found = found || (v == n);
  if (!found) {
    throw std::invalid_argument("sup_error: n must be a member of n_list");
  }
  SweepConfig one = cfg;
  one.n_list = {n};
  return run_sweep(one).per_n.front().sup_err;
}

RateFit rate_fit(const std::vector<RatePoint>& points) {
  if (points.size() < 3) {
    throw std::invalid_argument("rate_fit: needs at least 3 points");
  }
  const auto count = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(points.size()), ly(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].n > 0.0) || !(points[i].err > 0.0)) {
      throw std::invalid_argument("rate_fit: points must have n, err > 0");
    }
    lx[i] = std::log(points[i].n);
    ly[i] = std::log(points[i].err);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / count;
  const double my = sy / count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("rate_fit: all n equal; slope undefined");
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

AtomFloorReport atom_floor_demo(int n, double delta) {
  if (n < 1) throw std::invalid_argument("atom_floor_demo: n must be >= 1");
  const double floor_val = std::ldexp(1.0, -n);
  if (!(delta > 0.0) || delta >= floor_val) {
    throw std::invalid_argument(
        "atom_floor_demo: needs 0 < delta < 2^-n (window below the atom "
        "floor)");
  }
  AtomFloorReport out;
  out.floor = floor_val;
  out.formula_value =
      refined_terms(builtin("atomic_mix").mu3, {n, 0.0, delta}).total;
  out.ratio = out.floor / out.formula_value;
  return out;
}

double mass_check(const Distribution& dist, int n, double delta) {
  if (n < 1) throw std::invalid_argument("mass_check: n must be >= 1");
  if (!(delta > 0.0)) {
    throw std::invalid_argument("mass_check: delta must be > 0");
  }
  const double reach = 10.0 * std::sqrt(static_cast<double>(n));
  const auto kmax = static_cast<long long>(std::floor(reach / delta + 1e-9));
  double sum = 0.0, comp = 0.0;
  for (long long k = -kmax; k <= kmax; ++k) {
    const double term =
        refined_terms(dist.mu3, {n, static_cast<double>(k) * delta, delta})
            .total;
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  return std::abs(sum + comp - 1.0);
}

}  // namespace intloc
