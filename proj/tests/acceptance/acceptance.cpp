// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "frolov/frolov.hpp"

using namespace frolov;

namespace {

using KSet = std::set<std::vector<std::int64_t>>;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint64_t golden(std::size_t d, int m) {
  for (const auto& r : kGoldenCounts) {
    if (r.d == d && r.log2N == m) return r.expected_count;
  }
  return 0;
}

std::vector<CountRecord> rows_for(std::size_t d, int lo, int hi) {
  std::vector<CountRecord> out;
  for (int m = lo; m <= hi; ++m) out.push_back({d, m, golden(d, m)});
  return out;
}

Outcome check_rows(const std::vector<CountRecord>& rows) {
  Outcome o;
  std::size_t matched = 0;
  for (const auto& r : reproduce_rows(rows)) {
    if (r.match) {
      ++matched;
    } else {
      o.pass = false;
      o.detail += " d=" + std::to_string(r.record.d) + ",m=" + std::to_string(r.record.log2N) +
                  ": expected " + std::to_string(r.record.expected_count) + " got " +
                  std::to_string(r.observed);
    }
  }
  o.detail = std::to_string(matched) + "/" + std::to_string(rows.size()) + " rows match" + o.detail;
  return o;
}

Outcome golden_small() {
  std::vector<CountRecord> rows;
  for (std::size_t d : {2u, 4u, 8u}) {
    const auto r = rows_for(d, 1, 14);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto o = check_rows(rows);
  char buf[64];
  std::snprintf(buf, sizeof buf, " in %.3fs", seconds_since(t0));
  o.detail += buf;
  return o;
}

Outcome golden_medium() {
  std::vector<CountRecord> rows;
  for (const auto& part : {rows_for(2, 1, 20), rows_for(4, 1, 20), rows_for(8, 1, 14),
                           rows_for(16, 1, 10), rows_for(32, 1, 2)}) {
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto o = check_rows(rows);
  char buf[64];
  std::snprintf(buf, sizeof buf, " in %.3fs", seconds_since(t0));
  o.detail += buf;
  return o;
}

Outcome density_ratio() {
  const Level level(2);
  const auto count = count_points(level, standard_box(CubatureSpec::from_log2(level, 20)),
                                  build_diag_ladder(level));
  const double ratio = static_cast<double>(count) / std::ldexp(1.0, 20);
  char buf[128];
  std::snprintf(buf, sizeof buf, "count=%llu ratio=%.9f |ratio-1|=%.3g (tol 5e-5)",
                static_cast<unsigned long long>(count), ratio, std::abs(ratio - 1.0));
  return {count == 1048609u && std::abs(ratio - 1.0) <= 5e-5, buf};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20171101);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::size_t boxes = 0, points = 0;
  for (int n = 0; n <= 3; ++n) {
    const Level level(n);
    const auto ladder = build_diag_ladder(level);
    for (int trial = 0; trial < 100; ++trial) {
      Box box{std::vector<double>(level.dim()), std::vector<double>(level.dim())};
      for (std::size_t i = 0; i < level.dim(); ++i) {
        const double a = u(rng), b = u(rng);
        box.lower[i] = std::min(a, b);
        box.upper[i] = std::max(a, b);
      }
      KSet rec, str, ora;
      for (const auto& p : enumerate_recursive(level, box, ladder)) rec.insert(p.k);
      enumerate_stream<double>(level, box, ladder, [&](const PointRef<double>& p) {
        str.insert(std::vector<std::int64_t>(p.k.begin(), p.k.end()));
      });
      for (const auto& p : oracle_enumerate(level, box)) ora.insert(p.k);
      if (rec != str || str != ora) {
        return {false, "mismatch at n=" + std::to_string(n) + " trial=" + std::to_string(trial)};
      }
      ++boxes;
      points += ora.size();
    }
  }
  return {true, std::to_string(boxes) + " boxes, " + std::to_string(points) +
                    " points, identical sets"};
}

Outcome double_box() {
  Outcome o;
  std::size_t rows = 0;
  for (std::size_t d : {2u, 4u, 8u}) {
    const Level level = Level::from_dimension(d);
    const auto ladder = build_diag_ladder(level);
    for (int m = 1; m <= 10; ++m) {
      const auto r = double_box_check(level, std::ldexp(1.0, m), ladder);
      ++rows;
      if (!r.agree || r.count_direct != golden(d, m)) {
        o.pass = false;
        o.detail += " d=" + std::to_string(d) + ",m=" + std::to_string(m) +
                    ": direct=" + std::to_string(r.count_direct) +
                    " filtered=" + std::to_string(r.count_filtered);
      }
    }
  }
  o.detail = std::to_string(rows) + " rows checked" + o.detail;
  return o;
}

Outcome unimodularity() {
  Outcome o;
  double worst_int = 0.0, worst_det = 0.0;
  for (int n = 0; n <= 3; ++n) {
    const auto r = unimodular_check(Level(n));
    worst_int = std::max(worst_int, r.max_integer_deviation);
    worst_det = std::max(worst_det, r.det_deviation);
    o.pass = o.pass && r.max_integer_deviation < 1e-6 && r.det_deviation < 1e-6;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max integer deviation %.3g, max det deviation %.3g (tol 1e-6)",
                worst_int, worst_det);
  o.detail = buf;
  return o;
}

Outcome determinant_identity() {
  Outcome o;
  double worst = 0.0;
  for (int n = 0; n <= 5; ++n) {
    const Level level(n);
    const double numeric =
        std::abs(build_matrix_a(level, build_diag_ladder(level)).fullPivLu().determinant());
    const double rel = std::abs(numeric - det_magnitude(level)) / det_magnitude(level);
    worst = std::max(worst, rel);
    o.pass = o.pass && rel < 1e-9;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max relative error %.3g (tol 1e-9)", worst);
  o.detail = buf;
  return o;
}

Outcome roots_and_permutation() {
  Outcome o;
  for (int n = 0; n <= 6; ++n) {
    std::set<std::int64_t> seen;
    const std::int64_t d = std::int64_t{1} << n;
    for (std::int64_t k = 1; k <= d; ++k) seen.insert(sigma(n, k));
    if (seen.size() != static_cast<std::size_t>(d) || *seen.begin() != 1 || *seen.rbegin() != d) {
      o.pass = false;
    }
  }
  double worst_p = 0.0, worst_ladder = 0.0;
  for (int n = 0; n <= 5; ++n) {
    const std::size_t d = std::size_t{1} << n;
    for (std::size_t k = 1; k <= d; ++k) {
      worst_p = std::max(worst_p,
                         std::abs(chebyshev_p(d, root_xi(n, static_cast<std::int64_t>(k)))));
    }
    const auto ladder = build_diag_ladder(Level(n));
    for (std::size_t L = 1; L < ladder.size(); ++L) {
      for (std::size_t i = 0; i < ladder[L - 1].size(); ++i) {
        worst_ladder = std::max(worst_ladder,
                                std::abs(ladder[L][i] * ladder[L][i] - 2.0 - ladder[L - 1][i]));
      }
    }
  }
  o.pass = o.pass && worst_p < 1e-9 && worst_ladder < 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "sigma bijective n<=6; max |P_d(xi)| %.3g (tol 1e-9); ladder identity %.3g "
                "(tol 1e-12)",
                worst_p, worst_ladder);
  o.detail = buf;
  return o;
}

Outcome randomized_cubature() {
  auto f = [](std::span<const double> x) {
    double p = 1.0;
    for (double xi : x) p *= std::cos(std::numbers::pi * xi);
    return p;
  };
  const auto t0 = std::chrono::steady_clock::now();
  const Level level(1);
  const auto ladder = build_diag_ladder(level);
  const auto spec = CubatureSpec::from_log2(level, 6);

  bool identical = true;
  for (int n = 0; n <= 4; ++n) {
    const Level l(n);
    const auto lad = build_diag_ladder(l);
    const auto s = CubatureSpec::from_log2(l, 10);
    const auto det = integrate(s, f, std::nullopt, lad);
    const auto rnd = integrate(s, f, RandomShift::identity(l.dim()), lad);
    identical = identical && det.value == rnd.value && det.node_count == rnd.node_count;
  }

  constexpr int kSeeds = 2000;
  double sum = 0.0, sum_sq = 0.0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const auto r = integrate(spec, f, sample_shift(static_cast<std::uint64_t>(seed), 2), ladder);
    sum += r.value;
    sum_sq += r.value * r.value;
  }
  const double mean = sum / kSeeds;
  const double var = (sum_sq - kSeeds * mean * mean) / (kSeeds - 1);
  const double se = std::sqrt(var / kSeeds);
  const double exact = std::pow(2.0 / std::numbers::pi, 2);
  const double z = std::abs(mean - exact) / se;
  const double elapsed = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "identity shift bit-identical=%s; mean=%.8f exact=%.8f se=%.3g z=%.2f (tol 4) "
                "over %d seeds in %.2fs (limit 30s)",
                identical ? "yes" : "no", mean, exact, se, z, kSeeds, elapsed);
  return {identical && z <= 4.0 && elapsed < 30.0, buf};
}

Outcome smoke_d16() {
  const Level level(4);
  const auto t0 = std::chrono::steady_clock::now();
  const auto count = count_points(level, standard_box(CubatureSpec::from_log2(level, 20)),
                                  build_diag_ladder(level));
  const double elapsed = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "count=%llu (expected 1054837) in %.3fs (limit 60s)",
                static_cast<unsigned long long>(count), elapsed);
  return {elapsed < 60.0 && count == 1054837u, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"golden counts, small scales (d=2,4,8; m=1..14)", golden_small},
      {"golden counts, medium scales", golden_medium},
      {"density ratio d=4, N=2^20", density_ratio},
      {"oracle equivalence (n<=3, 100 boxes each)", oracle_equivalence},
      {"2N-box consistency (d<=8, m<=10)", double_box},
      {"unimodularity n<=3", unimodularity},
      {"determinant identity n<=5", determinant_identity},
      {"roots and permutation", roots_and_permutation},
      {"randomized cubature", randomized_cubature},
      {"smoke: d=16, N=2^20 under 60s", smoke_d16},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
