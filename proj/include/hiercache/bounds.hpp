#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string_view>

#include "hiercache/model.hpp"

namespace hiercache {

// Which cut-set expression produced a lower bound on R1.
enum class CutBranch {
  FloorBatches,  // s1 s2 (1 - (s1 M1 + s1 s2 M2) / (N - s1 s2))
  CeilBatches,   // s1 s2 (N - s1 M1 - s1 s2 M2) / (N + s1 s2)
  MirrorLink,    // t (N - t M2) / (N + t), for R2
};

inline std::string_view to_string(CutBranch b) {
  switch (b) {
    case CutBranch::FloorBatches: return "floor";
    case CutBranch::CeilBatches: return "ceil";
    case CutBranch::MirrorLink: return "mirror";
  }
  return "?";
}

// Maximizer of a cut-set family. `raw_value` is the best candidate and may
// be negative; `value` is that floored at zero.
struct BoundWitness {
  double value = 0.0;
  double raw_value = 0.0;
  std::size_t s1 = 0;  // for R2 bounds: unused (0)
  std::size_t s2 = 0;  // for R2 bounds: t
  CutBranch branch = CutBranch::CeilBatches;
};

// Returns NaN when the floor-batch expression is undefined (s1 s2 >= N).
inline double r1_cut_value(const SystemConfig& cfg, std::size_t s1, std::size_t s2,
                           CutBranch branch) {
  const double n = cfg.n();
  const double a = static_cast<double>(s1);
  const double s = static_cast<double>(s1 * s2);
  const double used = a * cfg.mirror_mem + s * cfg.user_mem;
  if (branch == CutBranch::FloorBatches) {
    if (s >= n) return std::numeric_limits<double>::quiet_NaN();
    return s * (1.0 - used / (n - s));
  }
  return s * (n - used) / (n + s);
}

inline double r2_cut_value(const SystemConfig& cfg, std::size_t t) {
  const double n = cfg.n();
  const double td = static_cast<double>(t);
  return td * (n - td * cfg.user_mem) / (n + td);
}

// max over s1 <= K1, s2 <= K2 of both cut-set expressions, floored at 0.
// Ties keep the first candidate in (s1, s2, branch) order.
inline BoundWitness lower_bound_r1(const SystemConfig& cfg) {
  BoundWitness w;
  w.raw_value = -std::numeric_limits<double>::infinity();
  for (std::size_t s1 = 1; s1 <= cfg.num_mirrors; ++s1)
    for (std::size_t s2 = 1; s2 <= cfg.users_per_mirror; ++s2)
      for (auto branch : {CutBranch::FloorBatches, CutBranch::CeilBatches}) {
        const double v = r1_cut_value(cfg, s1, s2, branch);
        if (v > w.raw_value) w = {0.0, v, s1, s2, branch};
      }
  w.value = std::max(0.0, w.raw_value);
  return w;
}

// max over t <= K2 of t (N - t M2) / (N + t), floored at 0. Depends on M2
// only.
inline BoundWitness lower_bound_r2(const SystemConfig& cfg) {
  BoundWitness w;
  w.raw_value = -std::numeric_limits<double>::infinity();
  w.branch = CutBranch::MirrorLink;
  for (std::size_t t = 1; t <= cfg.users_per_mirror; ++t) {
    const double v = r2_cut_value(cfg, t);
    if (v > w.raw_value) {
      w.raw_value = v;
      w.s2 = t;
    }
  }
  w.value = std::max(0.0, w.raw_value);
  return w;
}

inline RatePoint lower_bounds(const SystemConfig& cfg) {
  return {lower_bound_r1(cfg).value, lower_bound_r2(cfg).value, LowerBoundProvenance{}};
}

}  // namespace hiercache
