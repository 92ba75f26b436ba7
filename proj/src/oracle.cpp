#include "intloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "intloc/rng.hpp"

namespace intloc {

namespace {

double clip01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::discretization:
      return "discretization";
    case ErrorKind::confidence:
      return "confidence";
    case ErrorKind::bracket:
      return "bracket";
  }
  return "unknown";
}

OracleEstimate interval_prob_from_pmf(const GridPmf& pmf,
                                      const PmfWindowSummer& summer,
                                      const IntervalQuery& q) {
  if (q.delta <= 0.0) {
    throw std::invalid_argument("interval_prob: delta must be > 0");
  }
  OracleEstimate out;
  out.value = clip01(summer.prob(q.x, q.delta));
  out.error_kind = ErrorKind::discretization;
  out.error_half_width =
      (2.0 * pmf.h / q.delta) * out.value + std::max(0.0, pmf.deficit);
  return out;
}

OracleEstimate interval_prob_fft(const Distribution& dist,
                                 const IntervalQuery& q, double h) {
  if (q.n < 1) throw std::invalid_argument("interval_prob_fft: n must be >= 1");
  const GridPmf sn = sn_pmf(dist, q.n, h);
  const PmfWindowSummer summer(sn);
  return interval_prob_from_pmf(sn, summer, q);
}

OracleEstimate interval_prob_mc(const Distribution& dist,
                                const IntervalQuery& q, std::size_t samples,
                                std::uint64_t seed) {
  if (q.n < 1) throw std::invalid_argument("interval_prob_mc: n must be >= 1");
  if (q.delta <= 0.0) {
    throw std::invalid_argument("interval_prob_mc: delta must be > 0");
  }
  if (samples < 1000) {
    throw std::invalid_argument("interval_prob_mc: samples must be >= 1000");
  }
  const double lo = q.x;
  const double hi = q.x + q.delta;
  constexpr std::size_t kBlock = 65536;
  const auto nblocks =
      static_cast<std::int64_t>((samples + kBlock - 1) / kBlock);
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    Rng rng(block_seed(seed, static_cast<std::uint64_t>(b)));
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(begin + kBlock, samples);
    std::uint64_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (int k = 0; k < q.n; ++k) s += dist.sample(rng);
      if (s >= lo && s < hi) ++local;
    }
    hits += local;
  }
  const double p =
      static_cast<double>(hits) / static_cast<double>(samples);
  OracleEstimate out;
  out.value = clip01(p);
  out.error_kind = ErrorKind::confidence;
  const double wald =
      1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  const double floor = 1.96 / (2.0 * static_cast<double>(samples));
  out.error_half_width = std::max(wald, floor);
  return out;
}

}  // namespace intloc
