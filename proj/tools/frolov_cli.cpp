// frolov: count, list and integrate over Chebyshev-Frolov lattice points.
//
// Exit codes: 0 success, 1 a verification check failed, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "frolov/frolov.hpp"

namespace {

using json = nlohmann::ordered_json;
using frolov::Level;
using frolov::max_level_from_env;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::size_t> dim;
  std::optional<int> level;
  std::optional<double> scale;
  std::optional<int> log2_scale;
  std::vector<double> box;
  std::string format = "csv";
  bool header = false;
  bool nodes = false;
  std::string out_path;
  int precision = 17;
  double boundary_eps = 0.0;
  std::size_t threads = 1;
  bool no_timing = false;
  std::string integrand = "cos-product";
  bool compensated = false;
  std::uint64_t seed = 0;
  std::size_t replicates = 1;
  std::size_t max_dim = 8;
  int max_log2_scale = 10;
  std::string golden_path;
};

struct Integrand {
  std::function<double(std::span<const double>)> f;
  std::function<double(std::size_t)> exact;
};

const std::map<std::string, Integrand>& integrands() {
  static const std::map<std::string, Integrand> table{
      {"one", {[](std::span<const double>) { return 1.0; }, [](std::size_t) { return 1.0; }}},
      {"zero", {[](std::span<const double>) { return 0.0; }, [](std::size_t) { return 0.0; }}},
      {"x1", {[](std::span<const double> x) { return x[0]; }, [](std::size_t) { return 0.0; }}},
      {"cos-product",
       {[](std::span<const double> x) {
          double p = 1.0;
          for (double xi : x) p *= std::cos(std::numbers::pi * xi);
          return p;
        },
        [](std::size_t d) { return std::pow(2.0 / std::numbers::pi, static_cast<double>(d)); }}},
      // prod 6 (1/4 - x_i^2): vanishes on the boundary, integrates to 1.
      {"parabola-product",
       {[](std::span<const double> x) {
          double p = 1.0;
          for (double xi : x) p *= 6.0 * (0.25 - xi * xi);
          return p;
        },
        [](std::size_t) { return 1.0; }}},
  };
  return table;
}

Level resolve_level(const Options& o) {
  const int cap = max_level_from_env();
  if (o.dim && o.level) throw UsageError("give either --dim or --level, not both");
  try {
    if (o.dim) return Level::from_dimension(*o.dim, cap);
    if (o.level) return Level(*o.level, cap);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  throw UsageError("one of --dim or --level is required");
}

std::optional<double> resolve_scale(const Options& o) {
  if (o.scale && o.log2_scale) throw UsageError("give either --scale or --log2-scale, not both");
  if (o.log2_scale) {
    if (*o.log2_scale < -60 || *o.log2_scale > 60) throw UsageError("--log2-scale out of range");
    return std::ldexp(1.0, *o.log2_scale);
  }
  if (o.scale) {
    if (!(*o.scale > 0.0) || !std::isfinite(*o.scale)) throw UsageError("--scale must be positive");
    return *o.scale;
  }
  return std::nullopt;
}

double require_scale(const Options& o) {
  if (!o.box.empty()) throw UsageError("--box is not accepted by this command");
  auto s = resolve_scale(o);
  if (!s) throw UsageError("one of --scale or --log2-scale is required");
  return *s;
}

/// The box for count/points: exactly one of a scale or an explicit box.
frolov::Box resolve_box(const Options& o, Level level, std::optional<double>& scale_out) {
  scale_out = resolve_scale(o);
  const bool has_box = !o.box.empty();
  if (scale_out.has_value() == has_box) {
    throw UsageError("give exactly one of --scale/--log2-scale or --box");
  }
  if (scale_out) return frolov::standard_box(frolov::CubatureSpec(level, *scale_out));
  const std::size_t d = level.dim();
  if (o.box.size() != 2 * d) {
    throw UsageError("--box needs " + std::to_string(2 * d) +
                     " values (lower corner then upper corner)");
  }
  frolov::Box box{std::vector<double>(o.box.begin(), o.box.begin() + static_cast<long>(d)),
                  std::vector<double>(o.box.begin() + static_cast<long>(d), o.box.end())};
  try {
    frolov::validate_box(box, d);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  return box;
}

json scale_json(std::optional<double> scale) {
  if (!scale) return nullptr;
  const double n = *scale;
  if (n == std::floor(n) && n < 9007199254740992.0) return static_cast<std::uint64_t>(n);
  return n;
}

class Timer {
public:
  explicit Timer(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

frolov::EnumOptions enum_options(const Options& o) {
  if (!(o.boundary_eps >= 0.0)) throw UsageError("--boundary-eps must be >= 0");
  return frolov::EnumOptions{o.boundary_eps};
}

int cmd_count(const Options& o, std::ostream& out) {
  const Level level = resolve_level(o);
  std::optional<double> scale;
  const auto box = resolve_box(o, level, scale);
  const auto ladder = frolov::build_diag_ladder<double>(level);
  Timer timer(!o.no_timing);
  const auto count = o.threads > 1
                         ? frolov::count_points_parallel<double>(level, box, ladder, o.threads,
                                                                 enum_options(o))
                         : frolov::count_points<double>(level, box, ladder, enum_options(o));
  json j;
  j["d"] = level.dim();
  j["N"] = scale_json(scale);
  j["count"] = count;
  j["seconds"] = timer.seconds();
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_points(const Options& o, std::ostream& out) {
  const Level level = resolve_level(o);
  std::optional<double> scale;
  const auto box = resolve_box(o, level, scale);
  if (o.nodes && !scale) throw UsageError("--nodes needs --scale or --log2-scale");
  if (o.precision < 1 || o.precision > 17) throw UsageError("--precision must be in [1, 17]");
  const auto format = frolov::parse_point_format(o.format);
  const auto ladder = frolov::build_diag_ladder<double>(level);
  const double shrink = scale ? frolov::CubatureSpec(level, *scale).shrink() : 1.0;

  if (o.header && format == frolov::PointFormat::csv) out << frolov::csv_header(level.dim()) << '\n';
  std::vector<double> node(level.dim());
  std::string line;
  frolov::enumerate_stream<double>(
      level, box, ladder,
      [&](const frolov::PointRef<double>& p) {
        std::span<const double> x = p.x;
        if (o.nodes) {
          for (std::size_t i = 0; i < node.size(); ++i) node[i] = shrink * p.x[i];
          x = node;
        }
        line = frolov::format_point(p.k, x, format, o.precision);
        line += '\n';
        out << line;
      },
      enum_options(o));
  return kExitOk;
}

const Integrand& resolve_integrand(const Options& o) {
  const auto& table = integrands();
  const auto it = table.find(o.integrand);
  if (it == table.end()) throw UsageError("unknown integrand: " + o.integrand);
  return it->second;
}

int cmd_integrate(const Options& o, std::ostream& out) {
  const Level level = resolve_level(o);
  const double scale = require_scale(o);
  const auto& integrand = resolve_integrand(o);
  const frolov::CubatureSpec spec(level, scale);
  const auto ladder = frolov::build_diag_ladder<double>(level);
  frolov::IntegrateOptions opts{o.compensated, o.threads, enum_options(o)};
  Timer timer(!o.no_timing);
  const auto r = frolov::integrate(spec, integrand.f, std::nullopt, ladder, opts);
  json j;
  j["d"] = level.dim();
  j["N"] = scale_json(scale);
  j["value"] = r.value;
  j["nodeCount"] = r.node_count;
  j["exact"] = integrand.exact(level.dim());
  j["seconds"] = timer.seconds();
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_integrate_random(const Options& o, std::ostream& out) {
  const Level level = resolve_level(o);
  const double scale = require_scale(o);
  const auto& integrand = resolve_integrand(o);
  if (o.replicates == 0) throw UsageError("--replicates must be positive");
  const frolov::CubatureSpec spec(level, scale);
  const auto ladder = frolov::build_diag_ladder<double>(level);
  frolov::IntegrateOptions opts{o.compensated, o.threads, enum_options(o)};
  Timer timer(!o.no_timing);
  double sum = 0.0, sum_sq = 0.0;
  std::uint64_t nodes = 0;
  for (std::size_t r = 0; r < o.replicates; ++r) {
    const auto shift = frolov::sample_shift(o.seed + r, level.dim());
    const auto res = frolov::integrate(spec, integrand.f, shift, ladder, opts);
    sum += res.value;
    sum_sq += res.value * res.value;
    nodes += res.node_count;
  }
  const double reps = static_cast<double>(o.replicates);
  const double mean = sum / reps;
  json j;
  j["d"] = level.dim();
  j["N"] = scale_json(scale);
  j["seed"] = o.seed;
  j["replicates"] = o.replicates;
  j["value"] = mean;
  if (o.replicates > 1) {
    const double var = std::max(0.0, (sum_sq - reps * mean * mean) / (reps - 1.0));
    j["stderr"] = std::sqrt(var / reps);
  }
  if (o.replicates == 1) {
    j["nodeCount"] = nodes;
  } else {
    j["meanNodeCount"] = static_cast<double>(nodes) / reps;
  }
  j["exact"] = integrand.exact(level.dim());
  j["seconds"] = timer.seconds();
  out << j.dump() << '\n';
  return kExitOk;
}

std::vector<frolov::CountRecord> selected_rows(const Options& o) {
  int max_level = 0;
  try {
    max_level = Level::from_dimension(o.max_dim, max_level_from_env()).exponent();
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  std::vector<frolov::CountRecord> source;
  if (o.golden_path.empty()) {
    source.assign(frolov::kGoldenCounts.begin(), frolov::kGoldenCounts.end());
  } else {
    source = frolov::load_golden_csv(o.golden_path);
  }
  std::vector<frolov::CountRecord> rows;
  for (const auto& r : source) {
    if (r.d <= (std::size_t{1} << max_level) && r.log2N <= o.max_log2_scale) rows.push_back(r);
  }
  if (rows.empty()) throw UsageError("no golden rows within --max-dim/--max-log2-scale");
  return rows;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto rows = selected_rows(o);
  const int cap = max_level_from_env();
  bool ok = true;
  auto report = [&](bool pass, const std::string& what) {
    out << (pass ? "PASS " : "FAIL ") << what << '\n';
    ok = ok && pass;
  };

  const int max_level = Level::from_dimension(o.max_dim, cap).exponent();
  for (int n = 0; n <= std::min(max_level, frolov::kOracleMaxLevel); ++n) {
    const auto u = frolov::unimodular_check(Level(n, cap));
    char buf[160];
    std::snprintf(buf, sizeof buf, "unimodular n=%d maxIntegerDeviation=%.3g detDeviation=%.3g", n,
                  u.max_integer_deviation, u.det_deviation);
    report(u.pass, buf);
  }
  for (const auto& row : rows) {
    const Level level = Level::from_dimension(row.d, cap);
    const auto db = frolov::double_box_check(level, std::ldexp(1.0, row.log2N));
    report(db.agree, "double-box d=" + std::to_string(row.d) + " log2N=" +
                         std::to_string(row.log2N) + " direct=" + std::to_string(db.count_direct) +
                         " filtered=" + std::to_string(db.count_filtered));
  }
  for (const auto& r : frolov::reproduce_rows(rows, cap)) {
    report(r.match, "table d=" + std::to_string(r.record.d) + " log2N=" +
                        std::to_string(r.record.log2N) + " expected=" +
                        std::to_string(r.record.expected_count) +
                        " observed=" + std::to_string(r.observed));
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_table(const Options& o, std::ostream& out) {
  const auto rows = selected_rows(o);
  bool ok = true;
  out << "d,log2N,expected,observed,match\n";
  for (const auto& r : frolov::reproduce_rows(rows, max_level_from_env())) {
    out << r.record.d << ',' << r.record.log2N << ',' << r.record.expected_count << ','
        << r.observed << ',' << (r.match ? "true" : "false") << '\n';
    ok = ok && r.match;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

void add_level_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--dim,-d", o.dim, "Dimension d (a power of two)");
  cmd->add_option("--level,-n", o.level, "Level n with d = 2^n");
}

void add_scale_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--scale", o.scale, "Scale N (> 0)");
  cmd->add_option("--log2-scale,-m", o.log2_scale, "Scale N = 2^m");
}

void add_common_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--out,-o", o.out_path, "Write output to FILE instead of stdout");
  cmd->add_option("--boundary-eps", o.boundary_eps,
                  "Inflate integer ranges by this amount at both ends");
  cmd->add_flag("--no-timing", o.no_timing, "Report seconds as 0 for reproducible output");
}

void add_row_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--max-dim", o.max_dim, "Largest dimension to check")->capture_default_str();
  cmd->add_option("--max-log2-scale", o.max_log2_scale, "Largest log2 N to check")
      ->capture_default_str();
  cmd->add_option("--golden", o.golden_path, "Golden count CSV (d,log2N,count)");
  cmd->add_option("--out,-o", o.out_path, "Write output to FILE instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev-Frolov lattice point enumeration and cubature"};
  app.require_subcommand(1);
  Options o;

  auto* count = app.add_subcommand("count", "Count lattice points in a box");
  add_level_options(count, o);
  add_scale_options(count, o);
  count->add_option("--box", o.box, "Explicit box: d lower values then d upper values");
  count->add_option("--threads,-t", o.threads, "Worker threads");
  add_common_options(count, o);

  auto* points = app.add_subcommand("points", "List lattice points in a box");
  add_level_options(points, o);
  add_scale_options(points, o);
  points->add_option("--box", o.box, "Explicit box: d lower values then d upper values");
  points->add_option("--format,-f", o.format, "csv or jsonl")->capture_default_str();
  points->add_flag("--header", o.header, "Prefix csv output with x1..xd");
  points->add_flag("--nodes", o.nodes, "Print cubature nodes s(N) x instead of lattice points");
  points->add_option("--precision,-p", o.precision, "Significant digits")->capture_default_str();
  add_common_options(points, o);

  auto* integ = app.add_subcommand("integrate", "Deterministic Frolov cubature");
  auto* rinteg = app.add_subcommand("integrate-random", "Randomized Frolov cubature");
  for (auto* cmd : {integ, rinteg}) {
    add_level_options(cmd, o);
    add_scale_options(cmd, o);
    cmd->add_option("--integrand,-f", o.integrand,
                    "one, zero, x1, cos-product or parabola-product")
        ->capture_default_str();
    cmd->add_flag("--compensated", o.compensated, "Compensated summation");
    cmd->add_option("--threads,-t", o.threads, "Worker threads");
    add_common_options(cmd, o);
  }
  rinteg->add_option("--seed,-s", o.seed, "Seed of the first replicate")->capture_default_str();
  rinteg->add_option("--replicates,-r", o.replicates, "Independent shifts (seeds seed, seed+1, ...)")
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run unimodularity, 2N-box and golden-table checks");
  add_row_options(verify, o);
  auto* table = app.add_subcommand("table", "Reproduce golden node counts as csv");
  add_row_options(table, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    std::ofstream file;
    if (!o.out_path.empty()) {
      file.open(o.out_path);
      if (!file) throw UsageError("cannot open " + o.out_path);
    }
    std::ostream& out = o.out_path.empty() ? std::cout : file;
    if (o.threads == 0) throw UsageError("--threads must be positive");

    int rc = kExitOk;
    if (count->parsed()) rc = cmd_count(o, out);
    else if (points->parsed()) rc = cmd_points(o, out);
    else if (integ->parsed()) rc = cmd_integrate(o, out);
    else if (rinteg->parsed()) rc = cmd_integrate_random(o, out);
    else if (verify->parsed()) rc = cmd_verify(o, out);
    else if (table->parsed()) rc = cmd_table(o, out);
    out.flush();
    return rc;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}
