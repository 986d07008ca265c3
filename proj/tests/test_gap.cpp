#include <gtest/gtest.h>

#include "hiercache/gap.hpp"

using namespace hiercache;

namespace {

SystemConfig cfg(std::size_t n, std::size_t k1, std::size_t k2, double m1, double m2) {
  return SystemConfig::make(n, k1, k2, m1, m2, 1, 0, nullptr);
}

}  // namespace

TEST(VerifyGap, Examples) {
  auto r = verify_gap(cfg(16, 4, 4, 2, 1));
  EXPECT_TRUE(r.in_scope);
  EXPECT_EQ(r.regime, Regime::II);
  EXPECT_TRUE(r.pass1);
  EXPECT_TRUE(r.pass2);
  EXPECT_TRUE(r.no_tension());
  EXPECT_DOUBLE_EQ(r.slack1, r.r1_lb.value - (r.r1_ach / 60.0 - 4.0));
  EXPECT_DOUBLE_EQ(r.slack2, r.r2_lb.value - (r.r2_ach / 36.0 - 16.0));

  // regime III keeps beta* = 1/4, so only the server link goes quiet
  r = verify_gap(cfg(16, 4, 4, 16, 16));
  EXPECT_EQ(r.r1_ach, 0.0);
  EXPECT_EQ(r.r2_ach, rate_r(0.25, 4));
  EXPECT_EQ(r.r1_lb.value, 0.0);
  EXPECT_EQ(r.r2_lb.value, 0.0);
  EXPECT_TRUE(r.no_tension());

  r = verify_gap(cfg(16, 4, 4, 0, 0));
  EXPECT_EQ(r.r1_ach, 16.0);
  EXPECT_GE(r.r1_lb.value, 8.0);
  EXPECT_TRUE(r.pass1);
}

TEST(VerifyGap, ScopeFlag) {
  EXPECT_FALSE(verify_gap(cfg(16, 2, 4, 1, 1)).in_scope);
  EXPECT_FALSE(verify_gap(cfg(16, 4, 3, 1, 1)).in_scope);
  EXPECT_TRUE(verify_gap(cfg(16, 4, 4, 1, 1)).in_scope);
}

TEST(ClassifyCell, RepresentativePoints) {
  // N = 64, K1 = K2 = 4
  const auto at = [](double m1, double m2) { return classify_cell(cfg(64, 4, 4, m1, m2)); };
  EXPECT_EQ(at(0, 2), AnalysisCell::IIA);    // M2 < N/(K1K2) = 4
  EXPECT_EQ(at(0, 5), AnalysisCell::IIB);    // < N/(3K2)
  EXPECT_EQ(at(0, 10), AnalysisCell::IIC);   // < N/4 (and M2 K2 < N)
  EXPECT_EQ(at(16, 2), AnalysisCell::IIF);   // M1 >= N/4, M2 < (N-M1)/(2K2) = 6
  EXPECT_EQ(at(16, 8), AnalysisCell::IIG);   // < (N-M1)/K2 = 12
  EXPECT_EQ(at(7, 15), AnalysisCell::IA);    // M1 < N/(2K1) = 8, 3N/(4K2) <= M2 < N/4
  EXPECT_EQ(at(12, 14), AnalysisCell::IB);
  EXPECT_EQ(at(4, 16), AnalysisCell::IC);
  EXPECT_EQ(at(32, 8), AnalysisCell::IIIA);
  EXPECT_EQ(at(32, 16), AnalysisCell::IIIB);
  EXPECT_EQ(to_string(AnalysisCell::IIIB), "III.B");
}

TEST(ClassifyCell, DefaultGridCoversAllCells) {
  const auto scan = gap_scan(default_scan_spec());
  for (auto c : kAllCells)
    EXPECT_GT(scan.summary.cell_hits[static_cast<std::size_t>(c)], 0u) << to_string(c);
  EXPECT_TRUE(scan.summary.all_cells_hit());
}

TEST(GapScan, DefaultGridAllPass) {
  const auto scan = gap_scan(default_scan_spec());
  const auto& s = scan.summary;
  EXPECT_GT(s.points, 0u);
  EXPECT_EQ(s.points, scan.reports.size());
  EXPECT_EQ(s.pass1, s.points);
  EXPECT_EQ(s.pass2, s.points);
  EXPECT_TRUE(s.all_pass());
  for (const auto& r : scan.reports) {
    EXPECT_TRUE(r.in_scope);
    EXPECT_EQ(r.pass1, r.slack1 >= -kSlackTolerance);
    EXPECT_EQ(r.pass2, r.slack2 >= -kSlackTolerance);
    EXPECT_EQ(r.no_tension(), r.pass1 && r.pass2);
    EXPECT_TRUE(r.cell.has_value()) << r.config.mirror_mem << ' ' << r.config.user_mem;
  }
  EXPECT_GE(s.worst_ratio1, 1.0);
}

TEST(GapScan, RegimeTwoHitsAllSevenCells) {
  const auto scan = gap_scan(default_scan_spec());
  std::array<std::size_t, 12> hits{};
  for (const auto& r : scan.reports)
    if (r.regime == Regime::II && r.cell) ++hits[static_cast<std::size_t>(*r.cell)];
  for (auto c : {AnalysisCell::IIA, AnalysisCell::IIB, AnalysisCell::IIC, AnalysisCell::IID,
                 AnalysisCell::IIE, AnalysisCell::IIF, AnalysisCell::IIG})
    EXPECT_GT(hits[static_cast<std::size_t>(c)], 0u) << to_string(c);
}

TEST(GapScan, EmptyGridsGiveNoReports) {
  auto spec = default_scan_spec();
  spec.m1_fractions.clear();
  EXPECT_TRUE(gap_scan(spec).reports.empty());
  spec = default_scan_spec();
  spec.files.clear();
  EXPECT_TRUE(gap_scan(spec).reports.empty());
}

TEST(GapScan, SkipsOutOfScopeShapes) {
  ScanSpec spec;
  spec.files = {16};
  spec.mirrors = {2, 4};
  spec.users_per_mirror = {4, 8};
  spec.m1_fractions = {0.5};
  spec.m2_fractions = {0.5};
  spec.cell_boundaries = false;
  const auto scan = gap_scan(spec);
  EXPECT_EQ(scan.summary.skipped_configs, 3u);  // (2,4), (2,8), (4,8)
  ASSERT_EQ(scan.reports.size(), 1u);
  EXPECT_EQ(scan.reports[0].config.mirror_mem, 8.0);
}

TEST(MemoryGrid, AscendingAndBoundaryValuesIncluded) {
  const auto g = memory_grid(default_scan_spec(), 32, 4, 8);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  EXPECT_EQ(std::adjacent_find(g.begin(), g.end()), g.end());
  const auto has = [&](double m1, double m2) {
    return std::find(g.begin(), g.end(), std::pair{m1, m2}) != g.end();
  };
  EXPECT_TRUE(has(4.0, 3.0));    // N/(2K1), 3N/(4K2)
  EXPECT_TRUE(has(8.0, 3.0));    // M1 = N/4 and (N-M1)/K2
  EXPECT_TRUE(has(0.0, 16.0));   // (N-M1)/2
}
