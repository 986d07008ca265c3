#pragma once

#include <algorithm>
#include <limits>
#include <string_view>

#include "hiercache/hierarchy.hpp"
#include "hiercache/model.hpp"

namespace hiercache {

// Partition of the (M1, M2) square that selects the split parameters.
//   I:   M1 + M2 K2 >= N and M1 <= N/4
//   II:  M1 + M2 K2 <  N
//   III: M1 + M2 K2 >= N and M1 >  N/4
enum class Regime { I, II, III };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::I: return "I";
    case Regime::II: return "II";
    case Regime::III: return "III";
  }
  return "?";
}

inline Regime classify_regime(const SystemConfig& cfg) {
  const double n = cfg.n();
  const double k2 = static_cast<double>(cfg.users_per_mirror);
  if (cfg.mirror_mem + cfg.user_mem * k2 < n) return Regime::II;
  return cfg.mirror_mem <= n / 4.0 ? Regime::I : Regime::III;
}

struct SplitParameters {
  double alpha;
  double beta;
};

// (M1/N, M1/N) in I, (M1/(M1 + M2 K2), 0) in II, (M1/N, 1/4) in III.
// With M2 = 0 in regime II the whole file goes through scheme A.
inline SplitParameters optimal_parameters(const SystemConfig& cfg) {
  const double n = cfg.n();
  const double k2 = static_cast<double>(cfg.users_per_mirror);
  switch (classify_regime(cfg)) {
    case Regime::I: return {cfg.mirror_mem / n, cfg.mirror_mem / n};
    case Regime::II:
      if (cfg.user_mem == 0.0) return {1.0, 0.0};
      return {cfg.mirror_mem / (cfg.mirror_mem + cfg.user_mem * k2), 0.0};
    case Regime::III: return {cfg.mirror_mem / n, 0.25};
  }
  return {1.0, 1.0};
}

inline RatePoint rates_at_optimum(const SystemConfig& cfg) {
  const auto p = optimal_parameters(cfg);
  return generalized_rates(cfg, p.alpha, p.beta);
}

// Closed-form upper bounds on the rates at (alpha*, beta*).
struct RateUpperBounds {
  Regime regime;
  double r1;         // per-regime bound on R1
  double r2;         // 4 min{K2, N/M2}, valid in every regime
  double r2_regime;  // min{K2, N/M2} in I, K2 in II, r2 in III

  RatePoint as_rate_point() const { return {r1, r2, LowerBoundProvenance{}}; }
};

inline RateUpperBounds rate_upper_bounds(const SystemConfig& cfg) {
  const double n = cfg.n();
  const double m1 = cfg.mirror_mem;
  const double m2 = cfg.user_mem;
  const double k2 = static_cast<double>(cfg.users_per_mirror);
  const double k1k2 = static_cast<double>(cfg.num_users());
  const double inf = std::numeric_limits<double>::infinity();

  RateUpperBounds b{classify_regime(cfg), 0.0, 0.0, 0.0};
  const double r2_base = std::min(k2, files_over(n, m2));
  b.r2 = 4.0 * r2_base;
  switch (b.regime) {
    case Regime::I:
      b.r1 = std::min(k1k2, files_over(n, m2));
      b.r2_regime = r2_base;
      break;
    case Regime::II: {
      const double total = m1 + m2 * k2;
      double mix = inf;
      if (total > 0.0)
        mix = m1 / total * ((n - m1) * k2 / total) + m2 * k2 / total * ((n * k2 - m1) / total);
      b.r1 = std::min(k1k2, mix);
      b.r2_regime = k2;
      break;
    }
    case Regime::III:
      // M2 = 0 here forces M1 = N, where the bound is 0
      b.r1 = m1 >= n ? 0.0 : 4.0 * (n - m1) * (n - m1) / (3.0 * n * m2);
      b.r2_regime = b.r2;
      break;
  }
  return b;
}

}  // namespace hiercache
