#include "intloc/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace intloc {

const char* const kCsvHeader =
    "dist,n,delta,x,approx_kind,approx_value,oracle_kind,oracle_value,"
    "oracle_half_width,abs_err_per_delta,seed,timestamp";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "': not a real number: '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "': not an integer: '" + v + "'");
  }
}

void record_to_row(const ExperimentRecord& r, std::ostream& os) {
  os << r.dist << ',' << r.n << ',' << format_double(r.delta) << ','
     << format_double(r.x) << ',' << r.approx_kind << ','
     << format_double(r.approx_value) << ',' << r.oracle_kind << ','
     << format_double(r.oracle_value) << ','
     << format_double(r.oracle_half_width) << ','
     << format_double(r.abs_err_per_delta) << ',' << r.seed << ','
     << r.timestamp << '\n';
}

}  // namespace

void write_csv(const std::string& path,
               const std::vector<ExperimentRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << kCsvHeader << '\n';
  for (const auto& r : rows) record_to_row(r, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<ExperimentRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw std::runtime_error("bad CSV header in " + path);
  }
  std::vector<ExperimentRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(trim(line), ',');
    if (f.size() != 12) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 12 fields, got " +
                               std::to_string(f.size()));
    }
    ExperimentRecord r;
    r.dist = f[0];
    r.n = static_cast<int>(parse_int("n", f[1]));
    r.delta = parse_real("delta", f[2]);
    r.x = parse_real("x", f[3]);
    r.approx_kind = f[4];
    r.approx_value = parse_real("approx_value", f[5]);
    r.oracle_kind = f[6];
    r.oracle_value = parse_real("oracle_value", f[7]);
    r.oracle_half_width = parse_real("oracle_half_width", f[8]);
    r.abs_err_per_delta = parse_real("abs_err_per_delta", f[9]);
    r.seed = static_cast<std::uint64_t>(parse_int("seed", f[10]));
    r.timestamp = f[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

SweepFileConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);

  SweepFileConfig out;
  bool has_dist = false, has_n_list = false, has_delta = false,
       has_oracle = false, has_approx = false, has_m = false, has_s = false,
       has_out = false;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    }

    if (key == "dist") {
      out.sweep.dist = val;
      has_dist = true;
    } else if (key == "n_list") {
      out.sweep.n_list.clear();
      for (const std::string& piece : split(val, ',')) {
        out.sweep.n_list.push_back(
            static_cast<int>(parse_int("n_list", trim(piece))));
      }
      has_n_list = true;
    } else if (key == "delta") {
      out.sweep.delta = parse_real(key, val);
      has_delta = true;
    } else if (key == "oracle") {
      out.sweep.oracle = parse_oracle_choice(val);
      has_oracle = true;
    } else if (key == "approx") {
      out.sweep.approx = parse_approx_choice(val);
      has_approx = true;
    } else if (key == "grid.m") {
      out.sweep.m = parse_real(key, val);
      has_m = true;
    } else if (key == "grid.s") {
      out.sweep.s = parse_real(key, val);
      has_s = true;
    } else if (key == "out") {
      out.out = val;
      has_out = true;
    } else if (key == "h") {
      out.sweep.h = parse_real(key, val);
    } else if (key == "seed") {
      out.sweep.seed = static_cast<std::uint64_t>(parse_int(key, val));
      out.seed_given = true;
    } else if (key == "mc_samples") {
      out.sweep.mc_samples = static_cast<std::size_t>(parse_int(key, val));
    } else if (key == "tail_tol") {
      out.sweep.tail_tol = parse_real(key, val);
    } else {
      throw std::invalid_argument("config key '" + key + "' is not known");
    }
  }

  std::string missing;
  if (!has_dist) missing = "dist";
  else if (!has_n_list) missing = "n_list";
  else if (!has_delta) missing = "delta";
  else if (!has_oracle) missing = "oracle";
  else if (!has_approx) missing = "approx";
  else if (!has_m) missing = "grid.m";
  else if (!has_s) missing = "grid.s";
  else if (!has_out) missing = "out";
  if (!missing.empty()) {
    throw std::invalid_argument("config key '" + missing + "' is required");
  }
  return out;
}

std::vector<ExperimentRecord> sweep_records(const SweepConfig& cfg,
                                            const SweepResult& result,
                                            const std::string& timestamp) {
  std::vector<ExperimentRecord> rows;
  rows.reserve(result.points.size() + result.per_n.size());
  const std::string kind = approx_choice_name(result.approx);
  const std::string oracle = oracle_choice_name(cfg.oracle);
  for (const SweepPoint& pt : result.points) {
    ExperimentRecord r;
    r.dist = cfg.dist;
    r.n = pt.n;
    r.delta = cfg.delta;
    r.x = pt.x;
    r.approx_kind = kind;
    r.approx_value = pt.approx_value;
    r.oracle_kind = oracle;
    r.oracle_value = pt.oracle_value;
    r.oracle_half_width = pt.oracle_half_width;
    r.abs_err_per_delta = pt.err_per_delta;
    r.seed = cfg.seed;
    r.timestamp = timestamp;
    rows.push_back(std::move(r));
  }
  for (const SweepN& agg : result.per_n) {
    ExperimentRecord r;
    r.dist = cfg.dist;
    r.n = agg.n;
    r.delta = cfg.delta;
    r.x = agg.arg_max_x;
    r.approx_kind = "sup_" + kind;
    r.approx_value = agg.approx_at_max;
    r.oracle_kind = oracle;
    r.oracle_value = agg.oracle_at_max;
    r.oracle_half_width = agg.half_width_at_max;
    r.abs_err_per_delta = agg.sup_err;
    r.seed = cfg.seed;
    r.timestamp = timestamp;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace intloc
