#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "intloc/edgeworth.hpp"
#include "intloc/inversion.hpp"
#include "intloc/io.hpp"
#include "intloc/oracle.hpp"
#include "intloc/rates.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace intloc;

void apply_thread_cap() {
#ifdef _OPENMP
  const char* env = std::getenv("INTLOC_THREADS");
  if (env != nullptr && *env != '\0') {
    const int t = std::atoi(env);
    if (t >= 1) omp_set_num_threads(t);
  }
#endif
}

void print_kv(const char* key, const std::string& value) {
  std::printf("%s = %s\n", key, value.c_str());
}

void print_kv(const char* key, double value) {
  print_kv(key, format_double(value));
}

struct ApproxArgs {
  std::string dist;
  int n = 1;
  double x = 0.0;
  double delta = 1.0;
  bool clamp = false;
};

int run_approx(const ApproxArgs& a) {
  const Distribution& dist = builtin(a.dist);
  const IntervalQuery q{a.n, a.x, a.delta};
  const ApproxBreakdown bd = refined_approx(dist, q);
  print_kv("dist", a.dist);
  print_kv("n", std::to_string(a.n));
  print_kv("x", a.x);
  print_kv("delta", a.delta);
  print_kv("v", bd.v);
  print_kv("stone_term", bd.stone_term);
  print_kv("skew_term", bd.skew_term);
  print_kv("delta_term", bd.delta_term);
  print_kv("total", bd.total);
  print_kv("per_delta_stone", bd.stone_term / a.delta);
  print_kv("per_delta_total", bd.total / a.delta);
  if (a.clamp) {
    print_kv("clamped_total", std::min(1.0, std::max(0.0, bd.total)));
  }
  return 0;
}

struct OracleArgs {
  std::string kind;
  std::string dist;
  int n = 1;
  double x = 0.0;
  double delta = 1.0;
  double h = 0.0;
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  double tail_tol = 1e-6;
  double delta_smooth = 0.0;
  double lambda_cap = 1e7;
  bool bracket = false;
  bool regions = false;
};

void print_estimate(const OracleEstimate& est) {
  print_kv("value", est.value);
  print_kv("error_kind", error_kind_name(est.error_kind));
  print_kv("error_half_width", est.error_half_width);
}

int run_oracle(const OracleArgs& a) {
  const Distribution& dist = builtin(a.dist);
  const IntervalQuery q{a.n, a.x, a.delta};
  print_kv("kind", a.kind);

  if (a.kind == "fft") {
    const double h = a.h > 0.0 ? a.h : default_grid_h(a.delta, a.n);
    print_kv("h", h);
    print_estimate(interval_prob_fft(dist, q, h));
    return 0;
  }
  if (a.kind == "mc") {
    print_kv("samples", std::to_string(a.samples));
    print_kv("seed", std::to_string(a.seed));
    print_estimate(interval_prob_mc(dist, q, a.samples, a.seed));
    return 0;
  }

  InversionConfig cfg;
  cfg.delta_smooth = a.delta_smooth;
  cfg.lambda_cap = a.lambda_cap;
  cfg.tail_tol = a.tail_tol;

  if (a.bracket) {
    const SandwichBracket br = sandwich_bracket(dist, q, cfg);
    print_kv("lower", br.lower);
    print_kv("upper", br.upper);
    print_kv("tol", br.tol);
    print_kv("value", 0.5 * (br.lower + br.upper));
    print_kv("error_kind", "bracket");
    print_kv("error_half_width", 0.5 * (br.upper - br.lower) + br.tol);
    return 0;
  }

  const SmoothedResult r = smoothed_interval_detail(dist, q, cfg);
  if (!r.tolerance_met) {
    std::fprintf(stderr,
                 "error: truncation tolerance %s unattainable within "
                 "lambda cap %s; achievable tail bound = %s\n",
                 format_double(a.tail_tol).c_str(),
                 format_double(a.lambda_cap).c_str(),
                 format_double(r.achievable_tail).c_str());
    return 1;
  }
  print_kv("value", r.value);
  print_kv("tail_cert", r.tail_cert);
  print_kv("quad_cert", r.quad_cert);
  print_kv("imag_residual", r.imag_residual);
  print_kv("delta_smooth", r.delta_smooth);
  print_kv("lambda_used", r.lambda_used);
  print_kv("step_used", r.step_used);
  print_kv("evals", std::to_string(r.evals));

  if (a.regions) {
    const RegionDiagnostics rd = region_split_diagnostics(dist, q, cfg);
    print_kv("h1", rd.h1);
    print_kv("h2", rd.h2);
    print_kv("g", rd.g);
    print_kv("i1_re", rd.i1.real());
    print_kv("i1_im", rd.i1.imag());
    print_kv("i2_observed", rd.i2_observed);
    print_kv("i2_bound", rd.i2_bound);
    print_kv("i3_observed", rd.i3_observed);
    print_kv("i3_bound", rd.i3_bound);
    print_kv("rho_hat", rd.rho_hat);
    print_kv("q_geo", rd.q_geo);
    print_kv("eta", rd.eta);
    print_kv("lambda_used_regions", rd.lambda_used);
  }
  return 0;
}

int run_sweep_cmd(const std::string& config_path, std::uint64_t cli_seed,
                  bool cli_seed_given) {
  SweepFileConfig fc = parse_config(config_path);
  if (cli_seed_given || !fc.seed_given) {
    if (cli_seed_given) fc.sweep.seed = cli_seed;
  }
  const SweepResult res = run_sweep(fc.sweep);
  const std::string ts = iso8601_utc_now();
  write_csv(fc.out, sweep_records(fc.sweep, res, ts));
  for (const SweepN& agg : res.per_n) {
    std::printf("n=%d sup_err_per_delta=%s arg_max_x=%s flagged=%zu/%zu "
                "dominated=%zu/%zu\n",
                agg.n, format_double(agg.sup_err).c_str(),
                format_double(agg.arg_max_x).c_str(), agg.flagged_count,
                agg.total_points, agg.dominated_count, agg.total_points);
  }
  std::printf("wrote %s\n", fc.out.c_str());
  return 0;
}

int run_ratefit(const std::string& in_path, const std::string& plot_out) {
  const std::vector<ExperimentRecord> rows = read_csv(in_path);
  std::vector<RatePoint> pts;
  for (const ExperimentRecord& r : rows) {
    if (r.approx_kind.rfind("sup_", 0) == 0) {
      pts.push_back({static_cast<double>(r.n), r.abs_err_per_delta});
    }
  }
  if (pts.size() < 3) {
    std::fprintf(stderr, "error: need at least 3 summary rows, found %zu\n",
                 pts.size());
    return 1;
  }
  const RateFit fit = rate_fit(pts);
  print_kv("points", std::to_string(pts.size()));
  print_kv("slope", fit.slope);
  print_kv("intercept", fit.intercept);
  print_kv("r_squared", fit.r_squared);
  if (!plot_out.empty()) {
    std::ofstream out(plot_out);
    if (!out) throw std::runtime_error("cannot open for writing: " + plot_out);
    for (const RatePoint& p : pts) {
      out << format_double(std::log(p.n)) << ' '
          << format_double(std::log(p.err)) << '\n';
    }
    std::printf("wrote %s\n", plot_out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{
      "Refined interval-probability approximations for standardized i.i.d. "
      "sums, with brute-force oracles and rate studies"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "RNG seed (default 0)");

  ApproxArgs aa;
  CLI::App* approx = app.add_subcommand(
      "approx", "evaluate the approximation terms for one query");
  approx->fallthrough();
  approx->add_option("--dist", aa.dist, "distribution name")->required();
  approx->add_option("--n", aa.n, "number of summands")
      ->required()
      ->check(CLI::PositiveNumber);
  approx->add_option("--x", aa.x, "window left endpoint")->required();
  approx->add_option("--delta", aa.delta, "window width")
      ->required()
      ->check(CLI::PositiveNumber);
  approx->add_flag("--clamp", aa.clamp, "also print total clamped to [0,1]");

  OracleArgs oa;
  CLI::App* oracle =
      app.add_subcommand("oracle", "ground-truth interval probability");
  oracle->fallthrough();
  oracle->add_option("--kind", oa.kind, "fft | mc | inversion")
      ->required()
      ->check(CLI::IsMember({"fft", "mc", "inversion"}));
  oracle->add_option("--dist", oa.dist, "distribution name")->required();
  oracle->add_option("--n", oa.n, "number of summands")
      ->required()
      ->check(CLI::PositiveNumber);
  oracle->add_option("--x", oa.x, "window left endpoint")->required();
  oracle->add_option("--delta", oa.delta, "window width")
      ->required()
      ->check(CLI::PositiveNumber);
  oracle->add_option("--pitch", oa.h, "grid pitch h (fft; 0 = automatic)");
  oracle->add_option("--samples", oa.samples, "sample count (mc)");
  oracle->add_option("--tail-tol", oa.tail_tol,
                     "truncation tolerance (inversion)");
  oracle->add_option("--delta-smooth", oa.delta_smooth,
                     "smoothing width (inversion; 0 = delta/n)");
  oracle->add_option("--lambda-cap", oa.lambda_cap,
                     "truncation search cap (inversion)");
  oracle->add_flag("--bracket", oa.bracket,
                   "print the sandwich bracket (inversion)");
  oracle->add_flag("--regions", oa.regions,
                   "print region-split diagnostics (inversion)");

  std::string config_path;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run a rate sweep from a config file");
  sweep->fallthrough();
  sweep->add_option("--config", config_path, "key = value config file")
      ->required();

  std::string in_path, plot_out;
  CLI::App* ratefit =
      app.add_subcommand("ratefit", "fit a decay slope to sweep output");
  ratefit->fallthrough();
  ratefit->add_option("--in", in_path, "CSV produced by sweep")->required();
  ratefit->add_option("--plot-out", plot_out,
                      "write (log n, log err) pairs to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*approx) return run_approx(aa);
    if (*oracle) {
      oa.seed = seed;
      return run_oracle(oa);
    }
    if (*sweep) {
      return run_sweep_cmd(config_path, seed, seed_opt->count() > 0);
    }
    if (*ratefit) return run_ratefit(in_path, plot_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
