#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "hiercache/bounds.hpp"
#include "hiercache/gap.hpp"
#include "hiercache/hierarchy.hpp"
#include "hiercache/params.hpp"

namespace hiercache::io {

// Shortest representation that parses back to the same double.
inline std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf.data(), end);
}

inline double parse_number(std::string_view s) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return x;
}

inline std::size_t parse_count(std::string_view s) {
  std::size_t x = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw std::invalid_argument("not a count: '" + std::string(s) + "'");
  return x;
}

inline bool parse_flag(std::string_view s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::invalid_argument("not a 0/1 flag: '" + std::string(s) + "'");
}

inline std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Memory size in files. Accepts "2", "0.5", "3/2" (absolute) and
// "N", "N/4", "3N/8", "0.25N" (relative to the library size).
inline double parse_memory(std::string_view s, std::size_t num_files) {
  if (s.empty()) throw std::invalid_argument("empty memory size");
  const auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  double denom = 1.0;
  if (slash != std::string_view::npos) {
    denom = parse_number(s.substr(slash + 1));
    if (!(denom > 0.0)) throw std::invalid_argument("memory size: bad denominator");
  }
  const bool relative = !num.empty() && num.back() == 'N';
  if (relative) num.remove_suffix(1);
  const double value = relative && num.empty() ? 1.0 : parse_number(num);
  const double m = value * (relative ? static_cast<double>(num_files) : 1.0) / denom;
  if (!std::isfinite(m) || m < 0.0)
    throw std::invalid_argument("memory size must be finite and >= 0: '" + std::string(s) + "'");
  return m;
}

// gap-scan rows: N,K1,K2,M1,M2,regime,R1_ach,R2_ach,R1_lb,R2_lb,slack1,slack2,pass1,pass2
struct GapRow {
  static constexpr std::array<std::string_view, 14> kHeader = {
      "N",     "K1",    "K2",    "M1",     "M2",     "regime", "R1_ach",
      "R2_ach", "R1_lb", "R2_lb", "slack1", "slack2", "pass1",  "pass2"};

  std::size_t n = 0, k1 = 0, k2 = 0;
  double m1 = 0, m2 = 0;
  std::string regime;
  double r1_ach = 0, r2_ach = 0, r1_lb = 0, r2_lb = 0, slack1 = 0, slack2 = 0;
  bool pass1 = false, pass2 = false;

  static GapRow from(const GapReport& r) {
    const auto& c = r.config;
    return {c.num_files, c.num_mirrors, c.users_per_mirror, c.mirror_mem, c.user_mem,
            std::string(to_string(r.regime)), r.r1_ach, r.r2_ach, r.r1_lb.value, r.r2_lb.value,
            r.slack1, r.slack2, r.pass1, r.pass2};
  }

  std::vector<std::string> fields() const {
    return {std::to_string(n),      std::to_string(k1),     std::to_string(k2),
            format_number(m1),      format_number(m2),      regime,
            format_number(r1_ach),  format_number(r2_ach),  format_number(r1_lb),
            format_number(r2_lb),   format_number(slack1),  format_number(slack2),
            pass1 ? "1" : "0",      pass2 ? "1" : "0"};
  }

  static GapRow parse(const std::vector<std::string>& f) {
    if (f.size() != kHeader.size()) throw std::invalid_argument("gap row: wrong field count");
    if (f[5] != "I" && f[5] != "II" && f[5] != "III")
      throw std::invalid_argument("gap row: bad regime");
    return {parse_count(f[0]),   parse_count(f[1]),   parse_count(f[2]),
            parse_number(f[3]),  parse_number(f[4]),  f[5],
            parse_number(f[6]),  parse_number(f[7]),  parse_number(f[8]),
            parse_number(f[9]),  parse_number(f[10]), parse_number(f[11]),
            parse_flag(f[12]),   parse_flag(f[13])};
  }

  nlohmann::ordered_json to_json() const {
    return {{"N", n},           {"K1", k1},           {"K2", k2},         {"M1", m1},
            {"M2", m2},         {"regime", regime},   {"R1_ach", r1_ach}, {"R2_ach", r2_ach},
            {"R1_lb", r1_lb},   {"R2_lb", r2_lb},     {"slack1", slack1}, {"slack2", slack2},
            {"pass1", pass1},   {"pass2", pass2}};
  }
};

// region rows: kind,alpha,beta,R1,R2,pareto. kind is "grid" for sampled
// (alpha, beta), "achievable" for the (alpha*, beta*) corner and
// "lower_bound" for the cut-set corner (alpha and beta left empty).
struct RegionRow {
  static constexpr std::array<std::string_view, 6> kHeader = {"kind", "alpha", "beta",
                                                              "R1",   "R2",    "pareto"};

  std::string kind;
  std::optional<double> alpha, beta;
  double r1 = 0, r2 = 0;
  bool pareto = false;

  std::vector<std::string> fields() const {
    return {kind, alpha ? format_number(*alpha) : "", beta ? format_number(*beta) : "",
            format_number(r1), format_number(r2), pareto ? "1" : "0"};
  }

  static RegionRow parse(const std::vector<std::string>& f) {
    if (f.size() != kHeader.size()) throw std::invalid_argument("region row: wrong field count");
    if (f[0] != "grid" && f[0] != "achievable" && f[0] != "lower_bound")
      throw std::invalid_argument("region row: bad kind");
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return parse_number(s);
    };
    return {f[0], opt(f[1]), opt(f[2]), parse_number(f[3]), parse_number(f[4]), parse_flag(f[5])};
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["alpha"] = alpha ? nlohmann::ordered_json(*alpha) : nlohmann::ordered_json(nullptr);
    j["beta"] = beta ? nlohmann::ordered_json(*beta) : nlohmann::ordered_json(nullptr);
    j["R1"] = r1;
    j["R2"] = r2;
    j["pareto"] = pareto;
    return j;
  }
};

// bounds rows: N,K1,K2,M1,M2,R1_lb,R1_s1,R1_s2,R1_branch,R2_lb,R2_t
struct BoundsRow {
  static constexpr std::array<std::string_view, 11> kHeader = {
      "N", "K1", "K2", "M1", "M2", "R1_lb", "R1_s1", "R1_s2", "R1_branch", "R2_lb", "R2_t"};

  std::size_t n = 0, k1 = 0, k2 = 0;
  double m1 = 0, m2 = 0, r1_lb = 0;
  std::size_t s1 = 0, s2 = 0;
  std::string branch;
  double r2_lb = 0;
  std::size_t t = 0;

  static BoundsRow from(const SystemConfig& c) {
    const auto b1 = lower_bound_r1(c);
    const auto b2 = lower_bound_r2(c);
    return {c.num_files, c.num_mirrors, c.users_per_mirror, c.mirror_mem, c.user_mem,
            b1.value,    b1.s1,         b1.s2,              std::string(to_string(b1.branch)),
            b2.value,    b2.s2};
  }

  std::vector<std::string> fields() const {
    return {std::to_string(n),     std::to_string(k1), std::to_string(k2), format_number(m1),
            format_number(m2),     format_number(r1_lb), std::to_string(s1), std::to_string(s2),
            branch,                format_number(r2_lb), std::to_string(t)};
  }

  static BoundsRow parse(const std::vector<std::string>& f) {
    if (f.size() != kHeader.size()) throw std::invalid_argument("bounds row: wrong field count");
    if (f[8] != "floor" && f[8] != "ceil") throw std::invalid_argument("bounds row: bad branch");
    return {parse_count(f[0]), parse_count(f[1]),  parse_count(f[2]), parse_number(f[3]),
            parse_number(f[4]), parse_number(f[5]), parse_count(f[6]), parse_count(f[7]),
            f[8],              parse_number(f[9]), parse_count(f[10])};
  }

  nlohmann::ordered_json to_json() const {
    return {{"N", n},         {"K1", k1},         {"K2", k2},        {"M1", m1},
            {"M2", m2},       {"R1_lb", r1_lb},   {"R1_s1", s1},     {"R1_s2", s2},
            {"R1_branch", branch}, {"R2_lb", r2_lb}, {"R2_t", t}};
  }
};

// rates rows: the split actually evaluated (alpha, beta) next to the
// closed-form choice, and the upper bounds at that choice.
struct RatesRow {
  static constexpr std::array<std::string_view, 15> kHeader = {
      "N",     "K1",   "K2", "M1", "M2",    "regime", "alpha_star",  "beta_star",
      "alpha", "beta", "R1", "R2", "R1_ub", "R2_ub",  "R2_ub_regime"};

  std::size_t n = 0, k1 = 0, k2 = 0;
  double m1 = 0, m2 = 0;
  std::string regime;
  double alpha_star = 0, beta_star = 0, alpha = 0, beta = 0;
  double r1 = 0, r2 = 0, r1_ub = 0, r2_ub = 0, r2_ub_regime = 0;

  static RatesRow from(const SystemConfig& c, double alpha, double beta) {
    const auto p = optimal_parameters(c);
    const auto r = generalized_rates(c, alpha, beta);
    const auto ub = rate_upper_bounds(c);
    return {c.num_files, c.num_mirrors, c.users_per_mirror, c.mirror_mem, c.user_mem,
            std::string(to_string(ub.regime)), p.alpha, p.beta, alpha, beta,
            r.r1, r.r2, ub.r1, ub.r2, ub.r2_regime};
  }

  std::vector<std::string> fields() const {
    return {std::to_string(n),         std::to_string(k1),     std::to_string(k2),
            format_number(m1),         format_number(m2),      regime,
            format_number(alpha_star), format_number(beta_star), format_number(alpha),
            format_number(beta),       format_number(r1),      format_number(r2),
            format_number(r1_ub),      format_number(r2_ub),   format_number(r2_ub_regime)};
  }

  static RatesRow parse(const std::vector<std::string>& f) {
    if (f.size() != kHeader.size()) throw std::invalid_argument("rates row: wrong field count");
    if (f[5] != "I" && f[5] != "II" && f[5] != "III")
      throw std::invalid_argument("rates row: bad regime");
    return {parse_count(f[0]),   parse_count(f[1]),   parse_count(f[2]),   parse_number(f[3]),
            parse_number(f[4]),  f[5],                parse_number(f[6]),  parse_number(f[7]),
            parse_number(f[8]),  parse_number(f[9]),  parse_number(f[10]), parse_number(f[11]),
            parse_number(f[12]), parse_number(f[13]), parse_number(f[14])};
  }

  nlohmann::ordered_json to_json() const {
    return {{"N", n},           {"K1", k1},         {"K2", k2},
            {"M1", m1},         {"M2", m2},         {"regime", regime},
            {"alpha_star", alpha_star}, {"beta_star", beta_star}, {"alpha", alpha},
            {"beta", beta},     {"R1", r1},         {"R2", r2},
            {"R1_ub", r1_ub},   {"R2_ub", r2_ub},   {"R2_ub_regime", r2_ub_regime}};
  }
};

// |measured - analytic| / analytic, or the plain difference when analytic is 0.
inline double relative_error(double measured, double analytic) {
  const double d = std::abs(measured - analytic);
  return analytic == 0.0 ? d : d / analytic;
}

// simulate rows: one per run.
struct SimulateRow {
  static constexpr std::array<std::string_view, 17> kHeader = {
      "N",           "K1",          "K2",         "M1",         "M2",          "F",
      "seed",        "alpha",       "beta",       "R1_measured", "R2_measured", "R1_analytic",
      "R2_analytic", "R1_rel_err",  "R2_rel_err", "decoded",    "users"};

  std::size_t n = 0, k1 = 0, k2 = 0;
  double m1 = 0, m2 = 0;
  std::size_t f = 0, seed = 0;
  double alpha = 0, beta = 0;
  double r1_measured = 0, r2_measured = 0, r1_analytic = 0, r2_analytic = 0;
  double r1_rel_err = 0, r2_rel_err = 0;
  std::size_t decoded = 0, users = 0;

  static SimulateRow from(const SystemConfig& c, double alpha, double beta,
                          const HierarchicalRun& run, std::size_t decoded) {
    const auto an = generalized_rates(c, alpha, beta);
    return {c.num_files, c.num_mirrors, c.users_per_mirror, c.mirror_mem, c.user_mem,
            c.file_size_bits, c.seed, alpha, beta, run.log.r1(), run.log.r2(), an.r1, an.r2,
            relative_error(run.log.r1(), an.r1), relative_error(run.log.r2(), an.r2), decoded,
            c.num_users()};
  }

  std::vector<std::string> fields() const {
    return {std::to_string(n),          std::to_string(k1),         std::to_string(k2),
            format_number(m1),          format_number(m2),          std::to_string(f),
            std::to_string(seed),       format_number(alpha),       format_number(beta),
            format_number(r1_measured), format_number(r2_measured), format_number(r1_analytic),
            format_number(r2_analytic), format_number(r1_rel_err),  format_number(r2_rel_err),
            std::to_string(decoded),    std::to_string(users)};
  }

  static SimulateRow parse(const std::vector<std::string>& x) {
    if (x.size() != kHeader.size()) throw std::invalid_argument("simulate row: wrong field count");
    return {parse_count(x[0]),   parse_count(x[1]),   parse_count(x[2]),   parse_number(x[3]),
            parse_number(x[4]),  parse_count(x[5]),   parse_count(x[6]),   parse_number(x[7]),
            parse_number(x[8]),  parse_number(x[9]),  parse_number(x[10]), parse_number(x[11]),
            parse_number(x[12]), parse_number(x[13]), parse_number(x[14]), parse_count(x[15]),
            parse_count(x[16])};
  }

  nlohmann::ordered_json to_json() const {
    return {{"N", n},
            {"K1", k1},
            {"K2", k2},
            {"M1", m1},
            {"M2", m2},
            {"F", f},
            {"seed", seed},
            {"alpha", alpha},
            {"beta", beta},
            {"R1_measured", r1_measured},
            {"R2_measured", r2_measured},
            {"R1_analytic", r1_analytic},
            {"R2_analytic", r2_analytic},
            {"R1_rel_err", r1_rel_err},
            {"R2_rel_err", r2_rel_err},
            {"decoded", decoded},
            {"users", users}};
  }
};

template <class Row>
void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  for (std::size_t i = 0; i < Row::kHeader.size(); ++i)
    os << (i ? "," : "") << Row::kHeader[i];
  os << '\n';
  for (const auto& r : rows) {
    const auto f = r.fields();
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << '\n';
  }
}

template <class Row>
std::vector<Row> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("csv: missing header");
  const auto header = split_fields(line);
  if (header.size() != Row::kHeader.size() ||
      !std::equal(header.begin(), header.end(), Row::kHeader.begin()))
    throw std::invalid_argument("csv: header does not match schema");
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    rows.push_back(Row::parse(split_fields(line)));
  }
  return rows;
}

template <class Row>
nlohmann::ordered_json to_json(const std::vector<Row>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(r.to_json());
  return arr;
}

// Scan spec file:
//   {"N": [...], "K1": [...], "K2": [...],
//    "m1_fractions": [...], "m2_fractions": [...], "cell_boundaries": true}
// Missing keys fall back to the default sweep.
inline ScanSpec parse_scan_spec(const nlohmann::json& j) {
  ScanSpec s = default_scan_spec();
  if (j.contains("N")) s.files = j.at("N").get<std::vector<std::size_t>>();
  if (j.contains("K1")) s.mirrors = j.at("K1").get<std::vector<std::size_t>>();
  if (j.contains("K2")) s.users_per_mirror = j.at("K2").get<std::vector<std::size_t>>();
  if (j.contains("m1_fractions")) s.m1_fractions = j.at("m1_fractions").get<std::vector<double>>();
  if (j.contains("m2_fractions")) s.m2_fractions = j.at("m2_fractions").get<std::vector<double>>();
  if (j.contains("cell_boundaries")) s.cell_boundaries = j.at("cell_boundaries").get<bool>();
  return s;
}

}  // namespace hiercache::io
