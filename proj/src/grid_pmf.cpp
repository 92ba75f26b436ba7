#include "intloc/grid_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "intloc/fft.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace intloc {
namespace {

// One padded complex buffer of this many cells is ~2.15 GB; a second buffer
// for pair convolutions halves the allowance.
constexpr std::size_t kBudgetCells = std::size_t{1} << 27;
constexpr double kDustFloor = -1e-12;

long long atom_index(const GridPmf& p, double location) {
  const double raw = (location - p.origin) / p.h;
  const double rounded = std::nearbyint(raw);
  if (std::abs(raw - rounded) > 1e-6) {
    throw std::invalid_argument("grid_pmf: atom location is off-grid");
  }
  return static_cast<long long>(rounded);
}

void merge_atom(std::vector<AtomInfo>& atoms, double location, double mass) {
  for (auto& a : atoms) {
    if (a.location == location) {
      a.mass += mass;
      return;
    }
  }
  atoms.push_back({location, mass});
}

// Clip negative dust in place; anything below the dust floor means a real bug.
void clip_dust(std::vector<double>& v) {
  const auto n = static_cast<std::int64_t>(v.size());
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(min : worst)
  for (std::int64_t i = 0; i < n; ++i) {
    if (v[i] < worst) worst = v[i];
    if (v[i] < 0.0) v[i] = 0.0;
  }
  if (worst < kDustFloor) {
    throw std::runtime_error(
        "grid_pmf: convolution produced negative mass beyond dust scale: " +
        std::to_string(worst));
  }
}

struct ConvPlan {
  std::size_t pad = 0;
  std::size_t out_len = 0;
};

ConvPlan plan_conv(std::size_t out_len, std::size_t buffers,
                   double out_span) {
  ConvPlan plan;
  plan.out_len = out_len;
  plan.pad = fft_pad_size(out_len);
  if (plan.pad > kBudgetCells / buffers) {
    const double h_min =
        out_span / (static_cast<double>(kBudgetCells / buffers) / 2.0);
    throw std::length_error(
        "grid_pmf: padded transform of " + std::to_string(plan.pad) +
        " cells exceeds the memory budget; minimal grid h that fits is about " +
        std::to_string(h_min));
  }
  return plan;
}

// Fold cells and atoms of src into the first src-length slots of buf.
void pack(const GridPmf& src, std::vector<std::complex<double>>& buf) {
  const auto n = static_cast<std::int64_t>(src.masses.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) buf[i] = src.masses[i];
  for (const auto& a : src.atoms) {
    buf[static_cast<std::size_t>(atom_index(src, a.location))] += a.mass;
  }
}

// Trim result cells to centers within [-window, window]; returns trimmed pmf.
GridPmf extract_window(const std::vector<std::complex<double>>& buf,
                       double origin, double h, std::size_t out_len,
                       double window) {
  const double lo_center = -window;
  const double hi_center = window;
  long long first = static_cast<long long>(std::ceil((lo_center - origin) / h - 1e-9));
  long long last = static_cast<long long>(std::floor((hi_center - origin) / h + 1e-9));
  first = std::max<long long>(first, 0);
  last = std::min<long long>(last, static_cast<long long>(out_len) - 1);
  GridPmf out;
  out.h = h;
  if (last < first) return out;
  out.origin = origin + static_cast<double>(first) * h;
  out.masses.resize(static_cast<std::size_t>(last - first + 1));
  const auto count = static_cast<std::int64_t>(out.masses.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    out.masses[static_cast<std::size_t>(i)] =
        buf[static_cast<std::size_t>(first + i)].real();
  }
  clip_dust(out.masses);
  return out;
}

double stage_window(const Distribution& dist, long long m) {
  const double guarded = 8.0 * std::sqrt(static_cast<double>(m)) + 44.0;
  if (dist.support_radius > 0.0) {
    return std::min(static_cast<double>(m) * dist.support_radius, guarded);
  }
  return guarded;
}

// Pairwise product of the two pmfs' atom lists.
std::vector<AtomInfo> atom_products(const std::vector<AtomInfo>& a,
                                    const std::vector<AtomInfo>& b) {
  std::vector<AtomInfo> out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      merge_atom(out, x.location + y.location, x.mass * y.mass);
    }
  }
  return out;
}

// Move exact atom masses out of the folded convolution cells.
void unfold_atoms(GridPmf& pmf, const std::vector<AtomInfo>& atoms) {
  for (const auto& a : atoms) {
    const long long idx = atom_index(pmf, a.location);
    if (idx < 0 || idx >= static_cast<long long>(pmf.masses.size())) continue;
    auto& cell = pmf.masses[static_cast<std::size_t>(idx)];
    cell = std::max(0.0, cell - a.mass);
    pmf.atoms.push_back(a);
  }
}

// Self-convolution trimmed to the given window; consumes the input's cell
// vector before transforming to cap peak memory. Atoms ride inside the
// transform at their exact cell index and the pairwise products are restored
// afterwards.
GridPmf conv_self_windowed(GridPmf&& a, double window) {
  const std::size_t out_len = 2 * a.masses.size() - 1;
  const double out_origin = 2.0 * a.origin;
  const double out_span = static_cast<double>(out_len) * a.h;
  const ConvPlan plan = plan_conv(out_len, 1, out_span);
  const std::vector<AtomInfo> atoms = a.atoms;
  const double h = a.h;

  std::vector<std::complex<double>> buf(plan.pad);
  pack(a, buf);
  a.masses.clear();
  a.masses.shrink_to_fit();
  fft_parallel(buf.data(), plan.pad, false);
  const auto n = static_cast<std::int64_t>(plan.pad);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) buf[i] *= buf[i];
  fft_parallel(buf.data(), plan.pad, true);

  GridPmf out = extract_window(buf, out_origin, h, plan.out_len, window);
  buf.clear();
  buf.shrink_to_fit();
  unfold_atoms(out, atom_products(atoms, atoms));
  out.deficit = 1.0 - out.total_mass();
  return out;
}

// Pair convolution (two transform buffers); used for the low bits of n where
// grids are comparatively small.
GridPmf conv_pair_windowed(const GridPmf& a, const GridPmf& b, double window) {
  const std::size_t out_len = a.masses.size() + b.masses.size() - 1;
  const double out_origin = a.origin + b.origin;
  const double out_span = static_cast<double>(out_len) * a.h;
  const ConvPlan plan = plan_conv(out_len, 2, out_span);

  std::vector<std::complex<double>> fa(plan.pad);
  pack(a, fa);
  {
    std::vector<std::complex<double>> fb(plan.pad);
    pack(b, fb);
    fft_parallel(fa.data(), plan.pad, false);
    fft_parallel(fb.data(), plan.pad, false);
    const auto n = static_cast<std::int64_t>(plan.pad);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) fa[i] *= fb[i];
  }
  fft_parallel(fa.data(), plan.pad, true);

  GridPmf out = extract_window(fa, out_origin, a.h, plan.out_len, window);
  fa.clear();
  fa.shrink_to_fit();
  unfold_atoms(out, atom_products(a.atoms, b.atoms));
  out.deficit = 1.0 - out.total_mass();
  return out;
}

}  // namespace

double neumaier_sum(const double* v, std::size_t n) {
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = sum + v[i];
    if (std::abs(sum) >= std::abs(v[i])) {
      comp += (sum - t) + v[i];
    } else {
      comp += (v[i] - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double GridPmf::total_mass() const {
  double total = neumaier_sum(masses.data(), masses.size());
  for (const auto& a : atoms) total += a.mass;
  return total;
}

double GridPmf::mean() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) acc += masses[k] * cell_center(k);
  for (const auto& a : atoms) acc += a.mass * a.location;
  return acc;
}

double GridPmf::variance() const {
  const double mu = mean();
  double acc = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    const double d = cell_center(k) - mu;
    acc += masses[k] * d * d;
  }
  for (const auto& a : atoms) {
    const double d = a.location - mu;
    acc += a.mass * d * d;
  }
  return acc;
}

GridPmf discretize(const Distribution& dist, double h, double radius) {
  if (!(h > 0.0) || h > 1e-2) {
    throw std::invalid_argument("discretize: need 0 < h <= 1e-2");
  }
  if (radius < 8.0) {
    throw std::invalid_argument("discretize: need radius >= 8");
  }
  const auto half_cells = static_cast<long long>(std::ceil(radius / h));
  const std::size_t count = static_cast<std::size_t>(2 * half_cells + 1);
  if (count > kBudgetCells) {
    throw std::length_error("discretize: grid exceeds the memory budget");
  }
  GridPmf out;
  out.h = h;
  out.origin = -static_cast<double>(half_cells) * h;
  out.masses.resize(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    const double c = out.cell_center(static_cast<std::size_t>(k));
    out.masses[static_cast<std::size_t>(k)] =
        dist.cont_cell_mass(c - 0.5 * h, c + 0.5 * h);
  }
  if (dist.has_atom) {
    atom_index(out, dist.atom.location);  // validates grid alignment
    out.atoms.push_back(dist.atom);
  }
  out.deficit = 1.0 - out.total_mass();
  return out;
}

GridPmf convolve_n(const GridPmf& pmf, int n) {
  if (n < 1) throw std::invalid_argument("convolve_n: n must be >= 1");
  if (pmf.atoms.size() > 1) {
    throw std::invalid_argument(
        "convolve_n: more than one exact atom is unsupported");
  }
  if (n == 1) return pmf;
  const std::size_t in_len = pmf.masses.size();
  const std::size_t out_len =
      static_cast<std::size_t>(n) * (in_len - 1) + 1;
  const double out_span = static_cast<double>(out_len) * pmf.h;
  const ConvPlan plan = plan_conv(out_len, 1, out_span);

  const double total_in = pmf.total_mass();
  std::vector<std::complex<double>> buf(plan.pad);
  pack(pmf, buf);
  fft_parallel(buf.data(), plan.pad, false);
  const auto pn = static_cast<std::int64_t>(plan.pad);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < pn; ++i) {
    // Binary powering keeps per-bin error at ~log2(n) rounding steps.
    std::complex<double> base = buf[i];
    std::complex<double> acc(1.0, 0.0);
    int e = n;
    while (e > 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    buf[i] = acc;
  }
  fft_parallel(buf.data(), plan.pad, true);

  GridPmf out;
  out.h = pmf.h;
  out.origin = static_cast<double>(n) * pmf.origin;
  out.masses.resize(out_len);
  const auto on = static_cast<std::int64_t>(out_len);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < on; ++i) {
    out.masses[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(i)].real();
  }
  buf.clear();
  buf.shrink_to_fit();
  clip_dust(out.masses);

  // Renormalize the cells to the exact n-th power of the input mass.
  const double target = std::pow(total_in, n);
  const double current = neumaier_sum(out.masses.data(), out.masses.size());
  if (current > 0.0) {
    const double scale = target / current;
    const auto cn = static_cast<std::int64_t>(out.masses.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < cn; ++i) out.masses[static_cast<std::size_t>(i)] *= scale;
  }
  if (!pmf.atoms.empty()) {
    const auto& a = pmf.atoms.front();
    unfold_atoms(out, {{static_cast<double>(n) * a.location,
                        std::pow(a.mass, n)}});
  }
  out.deficit = 1.0 - out.total_mass();
  return out;
}

GridPmf sn_pmf(const Distribution& dist, int n, double h) {
  if (n < 1) throw std::invalid_argument("sn_pmf: n must be >= 1");
  const GridPmf base = discretize(dist, h, std::max(8.0, dist.grid_radius));
  if (n == 1) return base;
  int top_bit = 31;
  while (((n >> top_bit) & 1) == 0) --top_bit;
  GridPmf acc = base;
  long long m = 1;
  for (int bit = top_bit - 1; bit >= 0; --bit) {
    acc = conv_self_windowed(std::move(acc), stage_window(dist, 2 * m));
    m *= 2;
    if ((n >> bit) & 1) {
      acc = conv_pair_windowed(acc, base, stage_window(dist, m + 1));
      m += 1;
    }
  }
  return acc;
}

GridPmf sn_double(const Distribution& dist, GridPmf&& sn_m, int m) {
  if (m < 1) throw std::invalid_argument("sn_double: m must be >= 1");
  return conv_self_windowed(std::move(sn_m), stage_window(dist, 2LL * m));
}

double window_prob(const GridPmf& pmf, double x, double delta) {
  PmfWindowSummer summer(pmf);
  return summer.prob(x, delta);
}

PmfWindowSummer::PmfWindowSummer(const GridPmf& pmf) : pmf_(pmf) {
  prefix_.resize(pmf.masses.size() + 1);
  double sum = 0.0;
  double comp = 0.0;
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < pmf.masses.size(); ++i) {
    const double val = pmf.masses[i];
    const double t = sum + val;
    if (std::abs(sum) >= std::abs(val)) {
      comp += (sum - t) + val;
    } else {
      comp += (val - t) + sum;
    }
    sum = t;
    prefix_[i + 1] = sum + comp;
  }
}

double PmfWindowSummer::mass_below(double t) const {
  const std::size_t count = pmf_.masses.size();
  if (count == 0) return 0.0;
  // Position within the grid in cell units; cell k spans [k - 0.5, k + 0.5).
  const double pos = (t - pmf_.origin) / pmf_.h + 0.5;
  if (pos <= 0.0) return 0.0;
  if (pos >= static_cast<double>(count)) return prefix_[count];
  const double fl = std::floor(pos);
  const auto k = static_cast<std::size_t>(fl);
  return prefix_[k] + pmf_.masses[k] * (pos - fl);
}

double PmfWindowSummer::prob(double x, double delta) const {
  double p = mass_below(x + delta) - mass_below(x);
  for (const auto& a : pmf_.atoms) {
    if (a.location >= x && a.location < x + delta) p += a.mass;
  }
  return std::max(0.0, p);
}

double default_grid_h(double delta, int n_max) {
  const double h = 0.05 * delta / static_cast<double>(std::max(1, n_max));
  return std::clamp(h, 7e-6, 1e-4);
}

std::size_t fft_budget_cells() { return kBudgetCells; }

}  // namespace intloc
