#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "hiercache/bounds.hpp"
#include "hiercache/model.hpp"
#include "hiercache/params.hpp"

namespace hiercache {

// Constant-gap inequalities checked at (alpha*, beta*):
//   R1_lb >= R1/60 - 4,   R2_lb >= R2/36 - 16.
inline constexpr double kR1Factor = 1.0 / 60.0;
inline constexpr double kR1Offset = 4.0;
inline constexpr double kR2Factor = 1.0 / 36.0;
inline constexpr double kR2Offset = 16.0;
inline constexpr double kSlackTolerance = 1e-9;

// The twelve (M1, M2) cells used by the case analysis of the R1 gap.
enum class AnalysisCell { IA, IB, IC, IIA, IIB, IIC, IID, IIE, IIF, IIG, IIIA, IIIB };

inline constexpr std::array<AnalysisCell, 12> kAllCells = {
    AnalysisCell::IA,  AnalysisCell::IB,  AnalysisCell::IC,  AnalysisCell::IIA,
    AnalysisCell::IIB, AnalysisCell::IIC, AnalysisCell::IID, AnalysisCell::IIE,
    AnalysisCell::IIF, AnalysisCell::IIG, AnalysisCell::IIIA, AnalysisCell::IIIB};

inline std::string_view to_string(AnalysisCell c) {
  constexpr std::array<std::string_view, 12> names = {
      "I.A", "I.B", "I.C", "II.A", "II.B", "II.C", "II.D", "II.E", "II.F", "II.G", "III.A", "III.B"};
  return names[static_cast<std::size_t>(c)];
}

// Cell boundaries exactly as the case analysis states them. The top-level
// split there puts M1 = N/4 into the III cells (M1 < N/4 for I); the split
// parameters coincide on that line, so this disagrees with classify_regime
// only in naming. Requires K1, K2 >= 4 to be exhaustive.
inline std::optional<AnalysisCell> classify_cell(const SystemConfig& cfg) {
  const double n = cfg.n();
  const double k1 = static_cast<double>(cfg.num_mirrors);
  const double k2 = static_cast<double>(cfg.users_per_mirror);
  const double m1 = cfg.mirror_mem;
  const double m2 = cfg.user_mem;
  using C = AnalysisCell;

  if (m1 + m2 * k2 < n) {
    if (m1 < n / k1) {
      if (m2 < n / (k1 * k2)) return C::IIA;
      if (m2 < n / (3.0 * k2)) return C::IIB;
      if (m2 < n / 4.0) return C::IIC;
      return std::nullopt;
    }
    if (m1 < n / 4.0) {
      if (m2 < n / (4.0 * k2)) return C::IID;
      if (m2 < n / 4.0) return C::IIE;
      return std::nullopt;
    }
    if (m1 <= n) {
      if (m2 < (n - m1) / (2.0 * k2)) return C::IIF;
      if (m2 < (n - m1) / k2) return C::IIG;
    }
    return std::nullopt;
  }
  if (m1 < n / 4.0) {
    if (m2 >= n / 4.0 && m2 <= n) return C::IC;
    if (m2 >= 3.0 * n / (4.0 * k2)) return m1 < n / (2.0 * k1) ? C::IA : C::IB;
    return std::nullopt;
  }
  if (m1 <= n) {
    if (m2 >= (n - m1) / 2.0 && m2 <= n) return C::IIIB;
    if (m2 >= (n - m1) / k2) return C::IIIA;
  }
  return std::nullopt;
}

inline bool gap_in_scope(const SystemConfig& cfg) {
  return cfg.num_mirrors >= 4 && cfg.users_per_mirror >= 4 &&
         cfg.num_files >= cfg.num_users();
}

struct GapReport {
  SystemConfig config;
  bool in_scope = false;
  Regime regime = Regime::I;
  std::optional<AnalysisCell> cell;
  SplitParameters split{};
  double r1_ach = 0.0;
  double r2_ach = 0.0;
  BoundWitness r1_lb;
  BoundWitness r2_lb;
  double slack1 = 0.0;  // R1_lb - (R1/60 - 4)
  double slack2 = 0.0;  // R2_lb - (R2/36 - 16)
  bool pass1 = false;
  bool pass2 = false;

  // Both inequalities at the one parameter pair.
  bool no_tension() const { return pass1 && pass2; }
};

inline GapReport verify_gap(const SystemConfig& cfg) {
  GapReport r;
  r.config = cfg;
  r.in_scope = gap_in_scope(cfg);
  r.regime = classify_regime(cfg);
  r.cell = classify_cell(cfg);
  r.split = optimal_parameters(cfg);
  const auto ach = generalized_rates(cfg, r.split.alpha, r.split.beta);
  r.r1_ach = ach.r1;
  r.r2_ach = ach.r2;
  r.r1_lb = lower_bound_r1(cfg);
  r.r2_lb = lower_bound_r2(cfg);
  r.slack1 = r.r1_lb.value - (r.r1_ach * kR1Factor - kR1Offset);
  r.slack2 = r.r2_lb.value - (r.r2_ach * kR2Factor - kR2Offset);
  r.pass1 = r.slack1 >= -kSlackTolerance;
  r.pass2 = r.slack2 >= -kSlackTolerance;
  return r;
}

// Sweep description: (N, K1, K2) lists and memory grids as fractions of N.
// With cell_boundaries set, the boundary values of every analysis cell are
// added to the memory grids where they fall inside [0, N].
struct ScanSpec {
  std::vector<std::size_t> files;
  std::vector<std::size_t> mirrors;
  std::vector<std::size_t> users_per_mirror;
  std::vector<double> m1_fractions;
  std::vector<double> m2_fractions;
  bool cell_boundaries = true;
};

inline ScanSpec default_scan_spec() {
  ScanSpec s;
  s.files = {16, 32, 64};
  s.mirrors = {4, 8};
  s.users_per_mirror = {4, 8};
  for (int i = 0; i <= 8; ++i) {
    s.m1_fractions.push_back(i / 8.0);
    s.m2_fractions.push_back(i / 8.0);
  }
  return s;
}

namespace detail {
inline void push_in_range(std::vector<double>& v, double x, double n) {
  if (x >= 0.0 && x <= n) v.push_back(x);
}
inline void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}
}  // namespace detail

// (M1, M2) pairs for one (N, K1, K2), in ascending M1 then M2 order.
inline std::vector<std::pair<double, double>> memory_grid(const ScanSpec& spec, std::size_t n_files,
                                                          std::size_t k1_count,
                                                          std::size_t k2_count) {
  const double n = static_cast<double>(n_files);
  const double k1 = static_cast<double>(k1_count);
  const double k2 = static_cast<double>(k2_count);
  std::vector<double> m1s;
  for (double f : spec.m1_fractions) detail::push_in_range(m1s, f * n, n);
  if (spec.cell_boundaries && !m1s.empty()) {
    detail::push_in_range(m1s, n / 4.0, n);
    detail::push_in_range(m1s, n / (2.0 * k1), n);
    detail::push_in_range(m1s, n / k1, n);
  }
  detail::sort_unique(m1s);

  std::vector<std::pair<double, double>> out;
  for (double m1 : m1s) {
    std::vector<double> m2s;
    for (double f : spec.m2_fractions) detail::push_in_range(m2s, f * n, n);
    if (spec.cell_boundaries && !m2s.empty()) {
      for (double x : {n / 4.0, 3.0 * n / (4.0 * k2), (n - m1) / k2, (n - m1) / 2.0,
                       n / (k1 * k2), n / (3.0 * k2), n / (4.0 * k2), (n - m1) / (2.0 * k2)})
        detail::push_in_range(m2s, x, n);
    }
    detail::sort_unique(m2s);
    for (double m2 : m2s) out.emplace_back(m1, m2);
  }
  return out;
}

struct GapSummary {
  std::size_t points = 0;
  std::size_t skipped_configs = 0;  // (N, K1, K2) outside the K >= 4, N >= K1 K2 scope
  std::size_t pass1 = 0;
  std::size_t pass2 = 0;
  std::size_t both = 0;
  double worst_ratio1 = 0.0;    // max R1(a*,b*) / max(R1_lb, floor)
  double worst_ratio2 = 0.0;
  double worst_excess1 = 0.0;   // max R1(a*,b*) - R1_lb
  double worst_excess2 = 0.0;
  std::array<std::size_t, 12> cell_hits{};

  // Ratios use max(lower bound, ratio_floor) as denominator; below one
  // file of load the additive constant dominates anyway.
  void add(const GapReport& r, double ratio_floor = 1.0) {
    ++points;
    pass1 += r.pass1;
    pass2 += r.pass2;
    both += r.no_tension();
    if (r.cell) ++cell_hits[static_cast<std::size_t>(*r.cell)];
    worst_ratio1 = std::max(worst_ratio1, r.r1_ach / std::max(r.r1_lb.value, ratio_floor));
    worst_ratio2 = std::max(worst_ratio2, r.r2_ach / std::max(r.r2_lb.value, ratio_floor));
    worst_excess1 = std::max(worst_excess1, r.r1_ach - r.r1_lb.value);
    worst_excess2 = std::max(worst_excess2, r.r2_ach - r.r2_lb.value);
  }

  bool all_pass() const { return both == points; }
  bool all_cells_hit() const {
    return std::all_of(cell_hits.begin(), cell_hits.end(), [](auto c) { return c > 0; });
  }
};

struct GapScan {
  std::vector<GapReport> reports;
  GapSummary summary;
};

// One report per in-scope (N, K1, K2) and memory pair, in grid order.
inline GapScan gap_scan(const ScanSpec& spec, double ratio_floor = 1.0) {
  GapScan scan;
  auto& s = scan.summary;
  for (auto n : spec.files)
    for (auto k1 : spec.mirrors)
      for (auto k2 : spec.users_per_mirror) {
        if (n < k1 * k2 || k1 < 4 || k2 < 4) {
          ++s.skipped_configs;
          continue;
        }
        for (auto [m1, m2] : memory_grid(spec, n, k1, k2)) {
          const auto cfg = SystemConfig::make(n, k1, k2, m1, m2, 1, 0, nullptr);
          scan.reports.push_back(verify_gap(cfg));
          s.add(scan.reports.back(), ratio_floor);
        }
      }
  return scan;
}

}  // namespace hiercache
