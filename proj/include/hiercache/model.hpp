#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hiercache {

// Problem instance of the two-layer network: one server with N files,
// K1 mirrors of M1 files each, K2 users per mirror with M2 files each.
// Memory sizes are in units of whole files; F is the file size in bits.
struct SystemConfig {
  std::size_t num_files = 0;
  std::size_t num_mirrors = 0;
  std::size_t users_per_mirror = 0;
  double mirror_mem = 0.0;
  double user_mem = 0.0;
  std::uint64_t file_size_bits = 1;
  std::uint64_t seed = 0;

  std::size_t num_users() const { return num_mirrors * users_per_mirror; }
  double n() const { return static_cast<double>(num_files); }

  // Validates the instance. Memory above N carries no extra benefit and is
  // clamped to N with a warning on `warn` (pass nullptr to silence).
  static SystemConfig make(std::size_t num_files, std::size_t num_mirrors,
                           std::size_t users_per_mirror, double mirror_mem,
                           double user_mem, std::uint64_t file_size_bits = 1u << 16,
                           std::uint64_t seed = 0, std::ostream* warn = &std::clog) {
    if (num_files == 0 || num_mirrors == 0 || users_per_mirror == 0)
      throw std::invalid_argument("N, K1 and K2 must be positive");
    if (num_files < num_mirrors * users_per_mirror)
      throw std::invalid_argument("N must be at least K1*K2");
    if (file_size_bits == 0 || file_size_bits > std::numeric_limits<std::uint32_t>::max())
      throw std::invalid_argument("file size must be in [1, 2^32)");
    if (!(mirror_mem >= 0.0) || !(user_mem >= 0.0) || !std::isfinite(mirror_mem) ||
        !std::isfinite(user_mem))
      throw std::invalid_argument("memory sizes must be finite and nonnegative");
    const double cap = static_cast<double>(num_files);
    auto clamp = [&](double m, const char* name) {
      if (m > cap) {
        if (warn)
          *warn << "warning: " << name << "=" << m << " exceeds N=" << num_files
                << ", clamping to N\n";
        return cap;
      }
      return m;
    };
    SystemConfig c;
    c.num_files = num_files;
    c.num_mirrors = num_mirrors;
    c.users_per_mirror = users_per_mirror;
    c.mirror_mem = clamp(mirror_mem, "M1");
    c.user_mem = clamp(user_mem, "M2");
    c.file_size_bits = file_size_bits;
    c.seed = seed;
    return c;
  }

  SystemConfig with_memory(double m1, double m2) const {
    return make(num_files, num_mirrors, users_per_mirror, m1, m2, file_size_bits, seed, nullptr);
  }
};

// Demands d(i,j) of user j behind mirror i. File ids are zero-based here;
// transcripts and CLI output print them one-based.
class RequestMatrix {
 public:
  RequestMatrix() = default;
  RequestMatrix(std::size_t num_mirrors, std::size_t users_per_mirror,
                std::vector<std::size_t> demands)
      : mirrors_(num_mirrors), users_(users_per_mirror), demands_(std::move(demands)) {
    if (demands_.size() != mirrors_ * users_)
      throw std::invalid_argument("demand matrix has the wrong number of entries");
  }

  // User (i,j) requests file i*K2 + j.
  static RequestMatrix distinct(const SystemConfig& cfg) {
    std::vector<std::size_t> d(cfg.num_users());
    for (std::size_t u = 0; u < d.size(); ++u) d[u] = u;
    return RequestMatrix(cfg.num_mirrors, cfg.users_per_mirror, std::move(d));
  }

  // Uniform i.i.d. demands; duplicates happen.
  template <class Engine>
  static RequestMatrix random(const SystemConfig& cfg, Engine& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, cfg.num_files - 1);
    std::vector<std::size_t> d(cfg.num_users());
    for (auto& x : d) x = pick(rng);
    return RequestMatrix(cfg.num_mirrors, cfg.users_per_mirror, std::move(d));
  }

  void validate(std::size_t num_files) const {
    for (auto f : demands_)
      if (f >= num_files) throw std::invalid_argument("demanded file id out of range");
  }

  std::size_t num_mirrors() const { return mirrors_; }
  std::size_t users_per_mirror() const { return users_; }
  std::size_t at(std::size_t mirror, std::size_t user) const {
    return demands_.at(mirror * users_ + user);
  }
  const std::vector<std::size_t>& flat() const { return demands_; }

  std::vector<std::size_t> row(std::size_t mirror) const {
    return {demands_.begin() + static_cast<std::ptrdiff_t>(mirror * users_),
            demands_.begin() + static_cast<std::ptrdiff_t>((mirror + 1) * users_)};
  }
  std::vector<std::size_t> column(std::size_t user) const {
    std::vector<std::size_t> c(mirrors_);
    for (std::size_t i = 0; i < mirrors_; ++i) c[i] = at(i, user);
    return c;
  }

 private:
  std::size_t mirrors_ = 0;
  std::size_t users_ = 0;
  std::vector<std::size_t> demands_;
};

struct AnalyticProvenance {
  double alpha;
  double beta;
};
struct MeasuredProvenance {
  std::string scheme;
  std::uint64_t seed;
};
struct LowerBoundProvenance {};

using Provenance = std::variant<AnalyticProvenance, MeasuredProvenance, LowerBoundProvenance>;

// Link loads normalized by the file size.
struct RatePoint {
  double r1 = 0.0;
  double r2 = 0.0;
  Provenance provenance = LowerBoundProvenance{};

  bool dominates(const RatePoint& o) const { return r1 >= o.r1 && r2 >= o.r2; }
};

// Server load of the single-layer coded caching scheme with K caches each
// holding a fraction p of every file:
//   r(p, K) = K (1-p) / (K p) * (1 - (1-p)^K),
// i.e. no-caching rate times local gain times global gain. r(0, K) = K by
// continuity and r(p, K) = 0 once p >= 1.
inline double rate_r(double mem_fraction, std::size_t num_caches) {
  if (num_caches == 0) throw std::invalid_argument("rate_r: num_caches must be >= 1");
  if (!(mem_fraction >= 0.0)) throw std::invalid_argument("rate_r: mem_fraction must be >= 0");
  const double k = static_cast<double>(num_caches);
  if (mem_fraction == 0.0) return k;
  if (mem_fraction >= 1.0) return 0.0;
  const double p = mem_fraction;
  // 1 - (1-p)^K without cancellation for small p
  const double coded_gain = -std::expm1(k * std::log1p(-p));
  return std::max(0.0, (1.0 - p) / p * coded_gain);
}

// min{K, 1/p - 1} for p <= 1, else 0. Pointwise upper bound on rate_r.
inline double rate_r_upper(double mem_fraction, std::size_t num_caches) {
  if (num_caches == 0) throw std::invalid_argument("rate_r_upper: num_caches must be >= 1");
  if (!(mem_fraction >= 0.0))
    throw std::invalid_argument("rate_r_upper: mem_fraction must be >= 0");
  const double k = static_cast<double>(num_caches);
  if (mem_fraction == 0.0) return k;
  if (mem_fraction > 1.0) return 0.0;
  return std::min(k, 1.0 / mem_fraction - 1.0);
}

// N / M with N / 0 = +inf.
inline double files_over(double n, double m) {
  return m > 0.0 ? n / m : std::numeric_limits<double>::infinity();
}

}  // namespace hiercache
