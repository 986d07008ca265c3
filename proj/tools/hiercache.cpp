// hiercache: rates, bounds, simulations and sweeps for two-layer coded caching.
//
// Exit codes: 0 ok, 1 bad input, 2 decode failure or gap violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hiercache/hiercache.hpp"
#include "hiercache/io.hpp"

using namespace hiercache;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitAssert = 2;

struct Options {
  std::size_t files = 0;
  std::size_t mirrors = 0;
  std::size_t users_per_mirror = 0;
  std::string m1 = "0";
  std::string m2 = "0";
  std::uint64_t file_size = 1 << 16;
  std::uint64_t seed = 0;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::size_t grid = 11;
  std::string out;
  std::string format = "csv";
  std::string demands;
  std::string transcript;
  std::string scan_spec;
};

void add_config(CLI::App* cmd, Options& o, bool required) {
  auto* n = cmd->add_option("--files", o.files, "library size N")->check(CLI::PositiveNumber);
  auto* k1 = cmd->add_option("--mirrors", o.mirrors, "number of mirrors K1")
                 ->check(CLI::PositiveNumber);
  auto* k2 = cmd->add_option("--users-per-mirror", o.users_per_mirror, "users per mirror K2")
                 ->check(CLI::PositiveNumber);
  cmd->add_option("--m1", o.m1, "mirror memory: 2, 3/2, N/4, 0.25N")->capture_default_str();
  cmd->add_option("--m2", o.m2, "user memory, same syntax")->capture_default_str();
  if (required) {
    n->required();
    k1->required();
    k2->required();
  }
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "write to this file instead of stdout");
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_split(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.alpha, "file split (default: alpha*)")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--beta", o.beta, "user memory split (default: beta*)")
      ->check(CLI::Range(0.0, 1.0));
}

SystemConfig make_config(const Options& o, std::uint64_t file_size = 1) {
  return SystemConfig::make(o.files, o.mirrors, o.users_per_mirror,
                            io::parse_memory(o.m1, o.files), io::parse_memory(o.m2, o.files),
                            file_size, o.seed, &std::cerr);
}

SplitParameters resolve_split(const Options& o, const SystemConfig& c) {
  if (o.alpha.has_value() != o.beta.has_value())
    throw std::invalid_argument("--alpha and --beta go together");
  if (o.alpha) return {*o.alpha, *o.beta};
  return optimal_parameters(c);
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file " + o.out);
  f << text;
}

template <class Row>
void emit_rows(const Options& o, const std::vector<Row>& rows) {
  std::ostringstream os;
  if (o.format == "json")
    os << io::to_json(rows).dump(2) << '\n';
  else
    io::write_csv(os, rows);
  emit(o, os.str());
}

// "1,2,3,4": one-based file ids, mirror-major.
RequestMatrix parse_demands(const std::string& s, const SystemConfig& c) {
  std::vector<std::size_t> d;
  for (const auto& f : io::split_fields(s)) {
    const auto id = io::parse_count(f);
    if (id == 0 || id > c.num_files) throw std::invalid_argument("demand out of range: " + f);
    d.push_back(id - 1);
  }
  if (d.size() != c.num_users())
    throw std::invalid_argument("--demands needs K1*K2 = " + std::to_string(c.num_users()) +
                                " entries");
  return RequestMatrix(c.num_mirrors, c.users_per_mirror, std::move(d));
}

int cmd_rates(const Options& o) {
  const auto c = make_config(o);
  const auto p = resolve_split(o, c);
  emit_rows(o, std::vector{io::RatesRow::from(c, p.alpha, p.beta)});
  return kExitOk;
}

int cmd_bounds(const Options& o) {
  emit_rows(o, std::vector{io::BoundsRow::from(make_config(o))});
  return kExitOk;
}

int cmd_region(const Options& o) {
  if (o.grid < 2) throw std::invalid_argument("--grid must be at least 2");
  const auto c = make_config(o);
  std::vector<io::RegionRow> rows;
  for (const auto& p : achievable_region_sample(c, o.grid))
    rows.push_back({"grid", p.alpha(), p.beta(), p.rates.r1, p.rates.r2, p.pareto});
  const auto star = optimal_parameters(c);
  const auto ach = generalized_rates(c, star.alpha, star.beta);
  rows.push_back({"achievable", star.alpha, star.beta, ach.r1, ach.r2, false});
  const auto lb = lower_bounds(c);
  rows.push_back({"lower_bound", std::nullopt, std::nullopt, lb.r1, lb.r2, false});
  emit_rows(o, rows);
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  const auto c = make_config(o, o.file_size);
  const auto p = resolve_split(o, c);
  RequestMatrix d;
  if (o.demands.empty()) {
    auto rng = stream_engine(c.seed, stream::kDemands);
    d = RequestMatrix::random(c, rng);
  } else {
    d = parse_demands(o.demands, c);
  }
  const auto lib = make_library(c);
  HierarchicalRun run;
  try {
    run = generalized_run(c, p.alpha, p.beta, d, lib);
  } catch (const undecodable_error& e) {
    std::cerr << "decode failure: " << e.what() << '\n';
    return kExitAssert;
  }
  const std::size_t bad = run.mismatches(lib, d);
  if (!o.transcript.empty()) {
    std::ofstream t(o.transcript, std::ios::binary);
    if (!t) throw std::invalid_argument("cannot open transcript file " + o.transcript);
    t << run.log.transcript();
  }
  emit_rows(o, std::vector{io::SimulateRow::from(c, p.alpha, p.beta, run, c.num_users() - bad)});
  if (bad > 0 || !run.forwarding_sound) {
    std::cerr << bad << " of " << c.num_users() << " users failed to decode"
              << (run.forwarding_sound ? "" : "; a needed message was not forwarded") << '\n';
    return kExitAssert;
  }
  return kExitOk;
}

int cmd_gap_scan(const Options& o) {
  GapScan scan;
  if (o.files > 0 || o.mirrors > 0 || o.users_per_mirror > 0) {
    if (o.files == 0 || o.mirrors == 0 || o.users_per_mirror == 0)
      throw std::invalid_argument(
          "a single-config scan needs --files, --mirrors and --users-per-mirror");
    const auto c = make_config(o);
    scan.reports.push_back(verify_gap(c));
    scan.summary.add(scan.reports[0]);
    if (!scan.reports[0].in_scope)
      std::cerr << "note: K1, K2 >= 4 and N >= K1*K2 do not all hold; reported anyway\n";
  } else {
    ScanSpec spec = default_scan_spec();
    if (!o.scan_spec.empty()) {
      std::ifstream f(o.scan_spec);
      if (!f) throw std::invalid_argument("cannot open scan spec " + o.scan_spec);
      try {
        spec = io::parse_scan_spec(nlohmann::json::parse(f));
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("scan spec: ") + e.what());
      }
    }
    scan = gap_scan(spec);
  }
  std::vector<io::GapRow> rows;
  for (const auto& r : scan.reports) rows.push_back(io::GapRow::from(r));
  emit_rows(o, rows);

  const auto& s = scan.summary;
  std::cerr << "points=" << s.points << " pass=" << s.both
            << " worst_ratio1=" << io::format_number(s.worst_ratio1)
            << " worst_ratio2=" << io::format_number(s.worst_ratio2) << '\n';
  return s.both == s.points ? kExitOk : kExitAssert;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer coded caching: rates, bounds, simulation"};
  app.require_subcommand(1);
  Options o;

  auto* rates = app.add_subcommand("rates", "regime, (alpha*, beta*), rates and upper bounds");
  add_config(rates, o, true);
  add_split(rates, o);
  add_output(rates, o);

  auto* sim = app.add_subcommand("simulate", "bit-level run of the generalized scheme");
  add_config(sim, o, true);
  add_split(sim, o);
  add_output(sim, o);
  sim->add_option("--file-size", o.file_size, "bits per file F")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 31))
      ->capture_default_str();
  sim->add_option("--seed", o.seed, "placement, library and demand seed")->capture_default_str();
  sim->add_option("--demands", o.demands, "one-based file ids, mirror-major (default: random)");
  sim->add_option("--transcript", o.transcript, "dump per-link messages to this file");

  auto* bounds = app.add_subcommand("bounds", "cut-set lower bounds with their maximizers");
  add_config(bounds, o, true);
  add_output(bounds, o);

  auto* region = app.add_subcommand("region", "rate region sample with Pareto flags");
  add_config(region, o, true);
  add_output(region, o);
  region->add_option("--grid", o.grid, "points per axis, >= 2")->capture_default_str();

  auto* gap = app.add_subcommand("gap-scan", "constant-gap check over a sweep or one config");
  add_config(gap, o, false);
  add_output(gap, o);
  gap->add_option("--scan-spec", o.scan_spec, "JSON sweep description");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (rates->parsed()) return cmd_rates(o);
    if (sim->parsed()) return cmd_simulate(o);
    if (bounds->parsed()) return cmd_bounds(o);
    if (region->parsed()) return cmd_region(o);
    if (gap->parsed()) return cmd_gap_scan(o);
  } catch (const undecodable_error& e) {
    std::cerr << "decode failure: " << e.what() << '\n';
    return kExitAssert;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
