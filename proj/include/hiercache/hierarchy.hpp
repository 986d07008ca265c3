#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hiercache/bit_vector.hpp"
#include "hiercache/model.hpp"
#include "hiercache/single_layer.hpp"

namespace hiercache {

// The N files of the server, drawn from the config seed.
inline std::vector<BitVector> make_library(const SystemConfig& cfg) {
  auto rng = stream_engine(cfg.seed, stream::kLibrary);
  std::vector<BitVector> lib;
  lib.reserve(cfg.num_files);
  for (std::size_t n = 0; n < cfg.num_files; ++n)
    lib.push_back(BitVector::random(cfg.file_size_bits, rng));
  return lib;
}

// Placement of the generalized scheme. Bits [0, split) of each file form
// subsystem 1 (scheme A: the whole mirror memory plus a beta share of each
// user cache); bits [split, F) form subsystem 2 (scheme B over all K1*K2
// users with the remaining 1-beta share).
struct HierarchicalPlacement {
  double alpha = 1.0;
  double beta = 1.0;
  std::uint32_t split = 0;
  std::uint32_t file_size = 0;
  PlacementState mirror_state;               // K1 mirrors, subsystem 1
  std::vector<PlacementState> user_state;    // per mirror, its K2 users, subsystem 1
  PlacementState global_user_state;          // all K1*K2 users, subsystem 2

  bool has_subsystem1() const { return split > 0; }
  bool has_subsystem2() const { return split < file_size; }
};

inline HierarchicalPlacement hierarchical_placement(const SystemConfig& cfg, double alpha,
                                                    double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("alpha and beta must lie in [0, 1]");
  if (cfg.num_users() > kMaxCodecCaches)
    throw std::invalid_argument("bit-level simulation supports at most 24 users in total");
  const auto f = static_cast<std::uint32_t>(cfg.file_size_bits);
  const double n = cfg.n();
  auto bits_of = [&](double mem) {
    return static_cast<std::uint32_t>(std::floor(mem * static_cast<double>(f) / n));
  };

  HierarchicalPlacement hp;
  hp.alpha = alpha;
  hp.beta = beta;
  hp.file_size = f;
  hp.split = static_cast<std::uint32_t>(std::floor(alpha * f));
  const std::uint32_t f1 = hp.split;
  const std::uint32_t f2 = f - f1;

  const std::uint32_t user_total = bits_of(cfg.user_mem);
  const std::uint32_t mirror_bits = std::min(f1, bits_of(cfg.mirror_mem));
  const std::uint32_t user1_bits = std::min({f1, bits_of(beta * cfg.user_mem), user_total});
  const std::uint32_t user2_bits =
      std::min({f2, bits_of((1.0 - beta) * cfg.user_mem), user_total - user1_bits});

  if (f1 > 0) {
    auto rng = stream_engine(cfg.seed, stream::kMirrors);
    hp.mirror_state = place_subsets(cfg.num_files, cfg.num_mirrors, mirror_bits, f1, rng);
    for (std::size_t i = 0; i < cfg.num_mirrors; ++i) {
      auto urng = stream_engine(cfg.seed, stream::kMirrorUsers, static_cast<std::uint32_t>(i));
      hp.user_state.push_back(
          place_subsets(cfg.num_files, cfg.users_per_mirror, user1_bits, f1, urng));
    }
  }
  if (f2 > 0) {
    auto rng = stream_engine(cfg.seed, stream::kAllUsers);
    hp.global_user_state = place_subsets(cfg.num_files, cfg.num_users(), user2_bits, f2, rng);
  }
  return hp;
}

struct LinkLog {
  std::vector<MulticastMessage> messages;
  std::uint64_t bits() const { return total_bits(messages); }
};

// Messages on the server link and on each mirror link. R1 is the server
// load; R2 the largest mirror load, both normalized by the full file size.
struct TransmissionLog {
  std::uint64_t file_size = 1;
  LinkLog server;
  std::vector<LinkLog> mirrors;

  std::uint64_t server_bits() const { return server.bits(); }
  std::uint64_t mirror_bits(std::size_t i) const { return mirrors.at(i).bits(); }

  double r1() const { return static_cast<double>(server_bits()) / static_cast<double>(file_size); }
  double r2() const {
    std::uint64_t worst = 0;
    for (const auto& m : mirrors) worst = std::max(worst, m.bits());
    return static_cast<double>(worst) / static_cast<double>(file_size);
  }

  void append(TransmissionLog&& other) {
    for (auto& m : other.server.messages) server.messages.push_back(std::move(m));
    if (mirrors.size() < other.mirrors.size()) mirrors.resize(other.mirrors.size());
    for (std::size_t i = 0; i < other.mirrors.size(); ++i)
      for (auto& m : other.mirrors[i].messages) mirrors[i].messages.push_back(std::move(m));
  }

  std::string transcript() const {
    std::string out = hiercache::transcript(server.messages, "link=server ");
    for (std::size_t i = 0; i < mirrors.size(); ++i)
      out += hiercache::transcript(mirrors[i].messages,
                                   "link=mirror" + std::to_string(i + 1) + " ");
    return out;
  }
};

struct HierarchicalRun {
  TransmissionLog log;
  // Reconstruction of user (i,j) at index i*K2 + j.
  std::vector<BitVector> recovered;
  std::vector<std::uint64_t> mirror_stored_bits;
  std::vector<std::uint64_t> user_stored_bits;
  // Every message a user needs was forwarded by its mirror.
  bool forwarding_sound = true;

  RatePoint measured(const std::string& scheme, std::uint64_t seed) const {
    return {log.r1(), log.r2(), MeasuredProvenance{scheme, seed}};
  }

  // Count of users whose reconstruction differs from the requested file.
  std::size_t mismatches(std::span<const BitVector> library, const RequestMatrix& d) const {
    std::size_t bad = 0;
    for (std::size_t u = 0; u < d.flat().size(); ++u)
      if (u >= recovered.size() || !(recovered[u] == library[d.flat()[u]])) ++bad;
    return bad;
  }
};

namespace detail {

inline std::vector<BitVector> slice_library(std::span<const BitVector> lib, std::uint32_t begin,
                                            std::uint32_t len) {
  std::vector<BitVector> out;
  out.reserve(lib.size());
  for (const auto& f : lib) out.push_back(f.slice(begin, len));
  return out;
}

inline std::vector<BitVector> pick(std::span<const BitVector> lib,
                                   std::span<const std::size_t> ids) {
  std::vector<BitVector> out;
  out.reserve(ids.size());
  for (auto d : ids) out.push_back(lib[d]);
  return out;
}

// Scheme A on one (sub)library: the server runs the single-layer code over
// the K1 mirrors in K2 stages (stage j serves users (.,j)); each mirror
// decodes its users' files and re-encodes them over its own K2 users.
inline HierarchicalRun run_scheme_a(const SystemConfig& cfg, const HierarchicalPlacement& hp,
                                    std::span<const BitVector> sublib, const RequestMatrix& d) {
  const std::size_t k1 = cfg.num_mirrors;
  const std::size_t k2 = cfg.users_per_mirror;
  HierarchicalRun run;
  run.log.file_size = cfg.file_size_bits;
  run.log.mirrors.resize(k1);
  run.recovered.resize(k1 * k2);

  std::vector<CacheContents> mirror_cache;
  for (std::size_t i = 0; i < k1; ++i) {
    mirror_cache.push_back(CacheContents::fill(hp.mirror_state, i, sublib));
    run.mirror_stored_bits.push_back(mirror_cache.back().stored_bits());
  }
  const PartitionIndex mirror_parts(hp.mirror_state, d.flat());

  std::vector<std::vector<BitVector>> at_mirror(k1, std::vector<BitVector>(k2));
  for (std::size_t j = 0; j < k2; ++j) {
    const auto stage = d.column(j);
    auto msgs = base_delivery(hp.mirror_state, mirror_parts, stage, pick(sublib, stage));
    for (std::size_t i = 0; i < k1; ++i)
      at_mirror[i][j] =
          base_decode(hp.mirror_state, mirror_parts, i, mirror_cache[i], msgs, stage[i]);
    for (auto& m : msgs) run.log.server.messages.push_back(std::move(m));
  }

  run.user_stored_bits.assign(k1 * k2, 0);
  for (std::size_t i = 0; i < k1; ++i) {
    const auto& users = hp.user_state[i];
    const auto row = d.row(i);
    const PartitionIndex parts(users, row);
    auto msgs = base_delivery(users, parts, row, at_mirror[i]);
    for (std::size_t j = 0; j < k2; ++j) {
      const auto cache = CacheContents::fill(users, j, sublib);
      run.user_stored_bits[i * k2 + j] = cache.stored_bits();
      run.recovered[i * k2 + j] = base_decode(users, parts, j, cache, msgs, row[j]);
    }
    run.log.mirrors[i].messages = std::move(msgs);
  }
  return run;
}

// Scheme B on one (sub)library: single-layer code from the server straight
// to all K1*K2 user caches. Mirror i forwards a sum iff it has a nonempty
// term V_{u,.} for some user u attached to it.
inline HierarchicalRun run_scheme_b(const SystemConfig& cfg, const HierarchicalPlacement& hp,
                                    std::span<const BitVector> sublib, const RequestMatrix& d) {
  const std::size_t k1 = cfg.num_mirrors;
  const std::size_t k2 = cfg.users_per_mirror;
  const auto& users = hp.global_user_state;
  HierarchicalRun run;
  run.log.file_size = cfg.file_size_bits;
  run.log.mirrors.resize(k1);
  run.recovered.resize(k1 * k2);
  run.mirror_stored_bits.assign(k1, 0);
  run.user_stored_bits.assign(k1 * k2, 0);

  const PartitionIndex parts(users, d.flat());
  run.log.server.messages = base_delivery(users, parts, d.flat(), pick(sublib, d.flat()));

  for (std::size_t i = 0; i < k1; ++i) {
    auto& fwd = run.log.mirrors[i].messages;
    for (const auto& m : run.log.server.messages) {
      const bool relevant = std::any_of(m.terms.begin(), m.terms.end(), [&](const auto& t) {
        return t.cache / k2 == i && t.length > 0;
      });
      if (relevant) fwd.push_back(m);
    }
    for (std::size_t j = 0; j < k2; ++j) {
      const std::size_t u = i * k2 + j;
      // every server message carrying a nonempty term for u must be forwarded
      for (const auto& m : run.log.server.messages) {
        const auto* t = m.term_for(u);
        if (!t || t->length == 0) continue;
        const bool found = std::any_of(fwd.begin(), fwd.end(), [&](const auto& f) {
          return f.subset == m.subset;
        });
        run.forwarding_sound = run.forwarding_sound && found;
      }
      const auto cache = CacheContents::fill(users, u, sublib);
      run.user_stored_bits[u] = cache.stored_bits();
      run.recovered[u] = base_decode(users, parts, u, cache, fwd, d.flat()[u]);
    }
  }
  return run;
}

}  // namespace detail

// Generalized scheme: scheme A on the first floor(alpha F) bits of every
// file, scheme B on the rest. Link loads add; users concatenate the two
// recovered parts. A vacuous subsystem (alpha = 0 or 1) is skipped.
inline HierarchicalRun generalized_run(const SystemConfig& cfg, double alpha, double beta,
                                       const RequestMatrix& demands,
                                       std::span<const BitVector> library) {
  demands.validate(cfg.num_files);
  if (demands.num_mirrors() != cfg.num_mirrors ||
      demands.users_per_mirror() != cfg.users_per_mirror)
    throw std::invalid_argument("demand matrix shape does not match the config");
  const auto hp = hierarchical_placement(cfg, alpha, beta);
  const std::size_t users = cfg.num_users();

  HierarchicalRun run;
  run.log.file_size = cfg.file_size_bits;
  run.log.mirrors.resize(cfg.num_mirrors);
  run.recovered.assign(users, BitVector());
  run.mirror_stored_bits.assign(cfg.num_mirrors, 0);
  run.user_stored_bits.assign(users, 0);

  auto absorb = [&](HierarchicalRun&& part) {
    run.log.append(std::move(part.log));
    for (std::size_t u = 0; u < users; ++u) {
      run.recovered[u].append(part.recovered[u]);
      run.user_stored_bits[u] += part.user_stored_bits[u];
    }
    for (std::size_t i = 0; i < cfg.num_mirrors; ++i)
      run.mirror_stored_bits[i] += part.mirror_stored_bits[i];
    run.forwarding_sound = run.forwarding_sound && part.forwarding_sound;
  };

  if (hp.has_subsystem1()) {
    const auto sub = detail::slice_library(library, 0, hp.split);
    absorb(detail::run_scheme_a(cfg, hp, sub, demands));
  }
  if (hp.has_subsystem2()) {
    const auto sub = detail::slice_library(library, hp.split, hp.file_size - hp.split);
    absorb(detail::run_scheme_b(cfg, hp, sub, demands));
  }
  return run;
}

inline HierarchicalRun generalized_run(const SystemConfig& cfg, double alpha, double beta,
                                       const RequestMatrix& demands) {
  const auto lib = make_library(cfg);
  return generalized_run(cfg, alpha, beta, demands, lib);
}

// Decode-and-forward: independent placement in both layers, whole files
// delivered through scheme A.
inline HierarchicalRun scheme_a_run(const SystemConfig& cfg, const RequestMatrix& demands) {
  demands.validate(cfg.num_files);
  const auto f = static_cast<std::uint32_t>(cfg.file_size_bits);
  const auto lib = make_library(cfg);
  HierarchicalPlacement hp;
  hp.split = hp.file_size = f;
  auto rng = stream_engine(cfg.seed, stream::kMirrors);
  hp.mirror_state = place_subsets(
      cfg.num_files, cfg.num_mirrors,
      static_cast<std::uint32_t>(std::floor(cfg.mirror_mem * f / cfg.n())), f, rng);
  for (std::size_t i = 0; i < cfg.num_mirrors; ++i) {
    auto urng = stream_engine(cfg.seed, stream::kMirrorUsers, static_cast<std::uint32_t>(i));
    hp.user_state.push_back(place_subsets(
        cfg.num_files, cfg.users_per_mirror,
        static_cast<std::uint32_t>(std::floor(cfg.user_mem * f / cfg.n())), f, urng));
  }
  return detail::run_scheme_a(cfg, hp, lib, demands);
}

// Direct coding from the server to all K1*K2 users; mirrors cache nothing
// and only forward.
inline HierarchicalRun scheme_b_run(const SystemConfig& cfg, const RequestMatrix& demands) {
  demands.validate(cfg.num_files);
  if (cfg.num_users() > kMaxCodecCaches)
    throw std::invalid_argument("bit-level simulation supports at most 24 users in total");
  const auto f = static_cast<std::uint32_t>(cfg.file_size_bits);
  const auto lib = make_library(cfg);
  HierarchicalPlacement hp;
  hp.alpha = hp.beta = 0.0;
  hp.split = 0;
  hp.file_size = f;
  auto rng = stream_engine(cfg.seed, stream::kAllUsers);
  hp.global_user_state = place_subsets(
      cfg.num_files, cfg.num_users(),
      static_cast<std::uint32_t>(std::floor(cfg.user_mem * f / cfg.n())), f, rng);
  return detail::run_scheme_b(cfg, hp, lib, demands);
}

inline RatePoint scheme_a_rates(const SystemConfig& cfg) {
  const double n = cfg.n();
  return {static_cast<double>(cfg.users_per_mirror) * rate_r(cfg.mirror_mem / n, cfg.num_mirrors),
          rate_r(cfg.user_mem / n, cfg.users_per_mirror), AnalyticProvenance{1.0, 1.0}};
}

inline RatePoint scheme_b_rates(const SystemConfig& cfg) {
  const double n = cfg.n();
  return {rate_r(cfg.user_mem / n, cfg.num_users()),
          rate_r(cfg.user_mem / n, cfg.users_per_mirror), AnalyticProvenance{0.0, 0.0}};
}

// R1(a,b) = a K2 r(M1/(aN), K1) + (1-a) r((1-b)M2/((1-a)N), K1K2)
// R2(a,b) = a r(b M2/(aN), K2)  + (1-a) r((1-b)M2/((1-a)N), K2)
// A term whose weight is zero contributes zero.
inline RatePoint generalized_rates(const SystemConfig& cfg, double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("alpha and beta must lie in [0, 1]");
  const double p1 = cfg.mirror_mem / cfg.n();
  const double p2 = cfg.user_mem / cfg.n();
  const double k2 = static_cast<double>(cfg.users_per_mirror);
  const AnalyticProvenance tag{alpha, beta};

  if (alpha == 0.0)
    return {rate_r((1.0 - beta) * p2, cfg.num_users()),
            rate_r((1.0 - beta) * p2, cfg.users_per_mirror), tag};
  if (alpha == 1.0)
    return {k2 * rate_r(p1, cfg.num_mirrors), rate_r(beta * p2, cfg.users_per_mirror), tag};

  // ratios first, so that alpha == beta gives exactly M2/N in both R2 terms
  const double a_user = (beta / alpha) * p2;
  const double b_user = ((1.0 - beta) / (1.0 - alpha)) * p2;
  const double r1 = alpha * k2 * rate_r(p1 / alpha, cfg.num_mirrors) +
                    (1.0 - alpha) * rate_r(b_user, cfg.num_users());
  const double ra = rate_r(a_user, cfg.users_per_mirror);
  const double rb = rate_r(b_user, cfg.users_per_mirror);
  return {r1, rb + alpha * (ra - rb), tag};
}

struct RegionPoint {
  RatePoint rates;
  bool pareto = false;
  double alpha() const { return std::get<AnalyticProvenance>(rates.provenance).alpha; }
  double beta() const { return std::get<AnalyticProvenance>(rates.provenance).beta; }
};

// Flags points not strictly dominated by another point. Identical points
// share their flag.
inline void mark_pareto(std::vector<RegionPoint>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = pts[a].rates;
    const auto& y = pts[b].rates;
    return x.r1 != y.r1 ? x.r1 < y.r1 : x.r2 < y.r2;
  });
  double best_r2 = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < order.size();) {
    std::size_t end = g;
    const double r1 = pts[order[g]].rates.r1;
    while (end < order.size() && pts[order[end]].rates.r1 == r1) ++end;
    const double group_min = pts[order[g]].rates.r2;
    for (std::size_t k = g; k < end; ++k)
      pts[order[k]].pareto = group_min < best_r2 && pts[order[k]].rates.r2 == group_min;
    best_r2 = std::min(best_r2, group_min);
    g = end;
  }
}

// generalized_rates on a uniform grid over [0,1]^2 with `resolution` points
// per axis (alpha-major), Pareto frontier flagged.
inline std::vector<RegionPoint> achievable_region_sample(const SystemConfig& cfg,
                                                         std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
  std::vector<RegionPoint> pts;
  pts.reserve(resolution * resolution);
  const double step = 1.0 / static_cast<double>(resolution - 1);
  for (std::size_t a = 0; a < resolution; ++a)
    for (std::size_t b = 0; b < resolution; ++b) {
      const double alpha = a + 1 == resolution ? 1.0 : static_cast<double>(a) * step;
      const double beta = b + 1 == resolution ? 1.0 : static_cast<double>(b) * step;
      pts.push_back({generalized_rates(cfg, alpha, beta), false});
    }
  mark_pareto(pts);
  return pts;
}

}  // namespace hiercache
