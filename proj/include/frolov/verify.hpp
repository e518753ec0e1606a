#ifndef FROLOV_VERIFY_HPP
#define FROLOV_VERIFY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frolov/cubature.hpp"
#include "frolov/enumeration.hpp"
#include "frolov/lattice.hpp"
#include "frolov/level.hpp"

namespace frolov {

/// The brute-force oracle refused a request it cannot finish in reasonable time.
class CostError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One row of the published node-count tables for N = 2^log2N.
struct CountRecord {
  std::size_t d;
  int log2N;
  std::uint64_t expected_count;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

// Node counts of the standard cubature box for d = 2, 4, 8, 16, 32 and
// N = 2^1 ... 2^30. Mirrored in data/golden_counts.csv.
inline constexpr std::array<CountRecord, 150> kGoldenCounts{{
    // d = 2
    {2, 1, 3}, {2, 2, 5}, {2, 3, 7},
    {2, 4, 15}, {2, 5, 31}, {2, 6, 65},
    {2, 7, 131}, {2, 8, 257}, {2, 9, 513},
    {2, 10, 1027}, {2, 11, 2049}, {2, 12, 4095},
    {2, 13, 8191}, {2, 14, 16383}, {2, 15, 32767},
    {2, 16, 65539}, {2, 17, 131075}, {2, 18, 262145},
    {2, 19, 524289}, {2, 20, 1048579}, {2, 21, 2097153},
    {2, 22, 4194307}, {2, 23, 8388611}, {2, 24, 16777215},
    {2, 25, 33554429}, {2, 26, 67108861}, {2, 27, 134217727},
    {2, 28, 268435457}, {2, 29, 536870913}, {2, 30, 1073741827},
    // d = 4
    {4, 1, 5}, {4, 2, 5}, {4, 3, 11},
    {4, 4, 15}, {4, 5, 31}, {4, 6, 71},
    {4, 7, 123}, {4, 8, 261}, {4, 9, 513},
    {4, 10, 1025}, {4, 11, 2049}, {4, 12, 4099},
    {4, 13, 8201}, {4, 14, 16385}, {4, 15, 32775},
    {4, 16, 65533}, {4, 17, 131095}, {4, 18, 262143},
    {4, 19, 524281}, {4, 20, 1048609}, {4, 21, 2097143},
    {4, 22, 4194355}, {4, 23, 8388589}, {4, 24, 16777221},
    {4, 25, 33554439}, {4, 26, 67108867}, {4, 27, 134217723},
    {4, 28, 268435461}, {4, 29, 536870913}, {4, 30, 1073741807},
    // d = 8
    {8, 1, 19}, {8, 2, 19}, {8, 3, 23},
    {8, 4, 27}, {8, 5, 45}, {8, 6, 79},
    {8, 7, 167}, {8, 8, 271}, {8, 9, 529},
    {8, 10, 1067}, {8, 11, 2107}, {8, 12, 4113},
    {8, 13, 8283}, {8, 14, 16413}, {8, 15, 32823},
    {8, 16, 65645}, {8, 17, 131183}, {8, 18, 262263},
    {8, 19, 524341}, {8, 20, 1048779}, {8, 21, 2097107},
    {8, 22, 4194399}, {8, 23, 8388843}, {8, 24, 16777535},
    {8, 25, 33554807}, {8, 26, 67108777}, {8, 27, 134217783},
    {8, 28, 268435889}, {8, 29, 536871467}, {8, 30, 1073742019},
    // d = 16
    {16, 1, 77}, {16, 2, 127}, {16, 3, 151},
    {16, 4, 223}, {16, 5, 295}, {16, 6, 423},
    {16, 7, 539}, {16, 8, 967}, {16, 9, 1377},
    {16, 10, 2043}, {16, 11, 3503}, {16, 12, 5835},
    {16, 13, 10451}, {16, 14, 18901}, {16, 15, 36085},
    {16, 16, 69353}, {16, 17, 136839}, {16, 18, 267257},
    {16, 19, 530333}, {16, 20, 1054837}, {16, 21, 2106165},
    {16, 22, 4207997}, {16, 23, 8402385}, {16, 24, 16797845},
    {16, 25, 33577467}, {16, 26, 67135425}, {16, 27, 134246629},
    {16, 28, 268458047}, {16, 29, 536891351}, {16, 30, 1073829043},
    // d = 32
    {32, 1, 3377}, {32, 2, 4105}, {32, 3, 5041},
    {32, 4, 6371}, {32, 5, 8915}, {32, 6, 11867},
    {32, 7, 15291}, {32, 8, 20651}, {32, 9, 29215},
    {32, 10, 42323}, {32, 11, 61997}, {32, 12, 88645},
    {32, 13, 128269}, {32, 14, 186749}, {32, 15, 278961},
    {32, 16, 430037}, {32, 17, 679287}, {32, 18, 1102547},
    {32, 19, 1799443}, {32, 20, 2990409}, {32, 21, 5079585},
    {32, 22, 8757305}, {32, 23, 15442557}, {32, 24, 27637841},
    {32, 25, 50306689}, {32, 26, 92921093}, {32, 27, 173897749},
    {32, 28, 328647641}, {32, 29, 627372745}, {32, 30, 1208920345},
}};

/// Parses a golden-count CSV with header "d,log2N,count".
inline std::vector<CountRecord> parse_golden_csv(std::istream& in) {
  std::vector<CountRecord> rows;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("golden csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "d,log2N,count") throw std::runtime_error("golden csv: unexpected header: " + line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string d, m, count;
    if (!std::getline(fields, d, ',') || !std::getline(fields, m, ',') ||
        !std::getline(fields, count)) {
      throw std::runtime_error("golden csv: malformed line " + std::to_string(lineno));
    }
    rows.push_back({std::stoul(d), std::stoi(m), std::stoull(count)});
  }
  return rows;
}

inline std::vector<CountRecord> load_golden_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_golden_csv(in);
}

inline constexpr int kOracleMaxLevel = 3;
inline constexpr double kOracleTolerance = 1e-9;
inline constexpr std::uint64_t kOracleMaxCandidates = 200'000'000;

/// Brute force: bounds k through M = A_n^{-1} applied to the box by interval
/// arithmetic, then tests every integer k in that bounding box against
/// b - tol <= A_n k <= c + tol using the dense matrix. Lexicographic order.
inline std::vector<LatticePoint<double>> oracle_enumerate(Level level, const Box& box) {
  if (level.exponent() > kOracleMaxLevel) {
    throw CostError("oracle_enumerate: level " + std::to_string(level.exponent()) +
                    " exceeds brute-force limit " + std::to_string(kOracleMaxLevel));
  }
  const std::size_t d = level.dim();
  validate_box(box, d);
  std::vector<LatticePoint<double>> out;
  if (box.empty()) return out;

  const Matrix a = build_matrix_a(level, build_diag_ladder<double>(level));
  const Matrix inv = a.fullPivLu().inverse();

  double scale = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    scale = std::max({scale, std::abs(box.lower[i]), std::abs(box.upper[i])});
  }
  const double tol = kOracleTolerance * scale;

  std::vector<std::int64_t> lo(d), hi(d);
  double candidates = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    double kl = 0.0, kh = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double m = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double p = m * (box.lower[j] - tol), q = m * (box.upper[j] + tol);
      kl += std::min(p, q);
      kh += std::max(p, q);
    }
    lo[i] = static_cast<std::int64_t>(std::floor(kl)) - 1;
    hi[i] = static_cast<std::int64_t>(std::ceil(kh)) + 1;
    candidates *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  if (candidates > static_cast<double>(kOracleMaxCandidates)) {
    throw CostError("oracle_enumerate: " + std::to_string(candidates) + " candidates exceed budget");
  }

  std::vector<std::int64_t> k(lo);
  std::vector<double> x(d);
  for (;;) {
    bool inside = true;
    for (std::size_t i = 0; i < d && inside; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        s += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
             static_cast<double>(k[j]);
      }
      x[i] = s;
      inside = box.lower[i] - tol <= s && s <= box.upper[i] + tol;
    }
    if (inside) out.push_back({k, x});

    std::size_t pos = d;
    while (pos > 0) {
      --pos;
      if (k[pos] < hi[pos]) {
        ++k[pos];
        break;
      }
      k[pos] = lo[pos];
      if (pos == 0) return out;
    }
  }
}

struct DoubleBoxResult {
  std::uint64_t count_direct = 0;
  std::uint64_t count_filtered = 0;
  bool agree = false;
};

/// Enumerates the standard box at scale 2N, keeps the points that also lie in
/// the scale-N box, and compares that count with a direct count at scale N.
inline DoubleBoxResult double_box_check(Level level, double scale,
                                        const DiagLadder<double>& ladder) {
  const Box inner = standard_box(CubatureSpec(level, scale));
  const Box outer = standard_box(CubatureSpec(level, 2.0 * scale));
  DoubleBoxResult r;
  r.count_direct = count_points<double>(level, inner, ladder);
  enumerate_stream<double>(level, outer, ladder, [&](const PointRef<double>& p) {
    if (inner.contains(p.x)) ++r.count_filtered;
  });
  r.agree = r.count_direct == r.count_filtered;
  return r;
}

inline DoubleBoxResult double_box_check(Level level, double scale) {
  return double_box_check(level, scale, build_diag_ladder<double>(level));
}

struct UnimodularResult {
  double max_integer_deviation = 0.0;
  double det_deviation = 0.0;
  bool pass = false;
};

inline constexpr double kUnimodularTolerance = 1e-6;

/// S = V_n^{-1} A_n must be an integer matrix with |det S| = 1.
inline UnimodularResult unimodular_check(Level level) {
  if (level.exponent() > kOracleMaxLevel) {
    throw CostError("unimodular_check: level above " + std::to_string(kOracleMaxLevel));
  }
  const Matrix v = build_vandermonde(level);
  const Matrix a = build_matrix_a(level, build_diag_ladder<double>(level));
  const auto lu = v.fullPivLu();
  if (!lu.isInvertible()) throw std::runtime_error("unimodular_check: Vandermonde matrix is singular");
  const Matrix s = lu.solve(a);
  UnimodularResult r;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      r.max_integer_deviation =
          std::max(r.max_integer_deviation, std::abs(s(i, j) - std::round(s(i, j))));
    }
  }
  r.det_deviation = std::abs(std::abs(s.fullPivLu().determinant()) - 1.0);
  r.pass = r.max_integer_deviation < kUnimodularTolerance && r.det_deviation < kUnimodularTolerance;
  return r;
}

struct TableRowResult {
  CountRecord record;
  std::uint64_t observed = 0;
  bool match = false;
};

/// Counts the standard box for each row and compares exactly.
inline std::vector<TableRowResult> reproduce_rows(const std::vector<CountRecord>& rows,
                                                  int max_level = kDefaultMaxLevel) {
  std::vector<TableRowResult> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const Level level = Level::from_dimension(row.d, max_level);
    const auto ladder = build_diag_ladder<double>(level);
    const auto spec = CubatureSpec::from_log2(level, row.log2N);
    const auto observed = count_points<double>(level, standard_box(spec), ladder);
    out.push_back({row, observed, observed == row.expected_count});
  }
  return out;
}

/// Golden rows with d <= 2^max_level and log2N <= max_log2n.
inline std::vector<CountRecord> golden_rows(int max_level, int max_log2n) {
  std::vector<CountRecord> rows;
  const std::size_t max_d = std::size_t{1} << std::max(0, max_level);
  for (const auto& r : kGoldenCounts) {
    if (r.d <= max_d && r.log2N <= max_log2n) rows.push_back(r);
  }
  return rows;
}

inline std::vector<TableRowResult> reproduce_table(Level max_level, int max_log2n) {
  const auto rows = golden_rows(max_level.exponent(), max_log2n);
  if (rows.empty()) throw std::domain_error("reproduce_table: no golden rows in range");
  return reproduce_rows(rows, std::max(max_level.exponent(), kDefaultMaxLevel));
}

}  // namespace frolov

#endif  // FROLOV_VERIFY_HPP
