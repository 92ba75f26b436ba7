#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "intloc/rates.hpp"

namespace intloc {

// One CSV row: either a sweep grid point or a per-n summary row whose
// approx_kind carries the "sup_" prefix and whose x is the arg-max point.
struct ExperimentRecord {
  std::string dist;
  int n = 0;
  double delta = 0.0;
  double x = 0.0;
  std::string approx_kind;
  double approx_value = 0.0;
  std::string oracle_kind;
  double oracle_value = 0.0;
  double oracle_half_width = 0.0;
  double abs_err_per_delta = 0.0;
  std::uint64_t seed = 0;
  std::string timestamp;
};

extern const char* const kCsvHeader;

// 17 significant digits: lossless double round-trip.
std::string format_double(double v);

std::string iso8601_utc_now();

void write_csv(const std::string& path,
               const std::vector<ExperimentRecord>& rows);

// Validates the header line and field count per row.
std::vector<ExperimentRecord> read_csv(const std::string& path);

// Flat key = value config for cmd_sweep. Required keys: dist, n_list,
// delta, oracle, approx, grid.m, grid.s, out. Optional: h, seed,
// mc_samples, tail_tol. Unknown or malformed keys are rejected by name.
struct SweepFileConfig {
  SweepConfig sweep;
  std::string out;
  bool seed_given = false;
};

SweepFileConfig parse_config(const std::string& path);

// Point rows in (n, x) order followed by one summary row per n.
std::vector<ExperimentRecord> sweep_records(const SweepConfig& cfg,
                                            const SweepResult& result,
                                            const std::string& timestamp);

}  // namespace intloc
