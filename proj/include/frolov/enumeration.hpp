#ifndef FROLOV_ENUMERATION_HPP
#define FROLOV_ENUMERATION_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "frolov/lattice.hpp"
#include "frolov/level.hpp"

namespace frolov {

/// Axis-parallel box [lower, upper]. Empty boxes (some lower_i > upper_i) are
/// allowed and contain no lattice points.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const noexcept { return lower.size(); }

  bool empty() const noexcept {
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (lower[i] > upper[i]) return true;
    }
    return false;
  }

  bool contains(std::span<const double> x) const noexcept {
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!(lower[i] <= x[i] && x[i] <= upper[i])) return false;
    }
    return true;
  }

  /// Symmetric box [-half_width, half_width]^d.
  static Box symmetric(std::size_t d, double half_width) {
    return Box{std::vector<double>(d, -half_width), std::vector<double>(d, half_width)};
  }
};

/// Throws std::domain_error unless the box has dimension d and finite corners.
inline void validate_box(const Box& box, std::size_t d) {
  if (box.lower.size() != d || box.upper.size() != d) {
    throw std::domain_error("box dimension " + std::to_string(box.lower.size()) + "/" +
                            std::to_string(box.upper.size()) + " does not match d = " +
                            std::to_string(d));
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(box.lower[i]) || !std::isfinite(box.upper[i])) {
      throw std::domain_error("box corner " + std::to_string(i + 1) + " is not finite");
    }
  }
}

/// Owned lattice point: integer coordinates k and the image x = A_n k.
template <std::floating_point Real = double>
struct LatticePoint {
  std::vector<std::int64_t> k;
  std::vector<Real> x;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// Borrowed view handed to enumeration consumers; valid only for the
/// duration of the callback.
template <std::floating_point Real = double>
struct PointRef {
  std::span<const std::int64_t> k;
  std::span<const Real> x;

  LatticePoint<Real> to_point() const {
    return {std::vector<std::int64_t>(k.begin(), k.end()), std::vector<Real>(x.begin(), x.end())};
  }
};

struct EnumOptions {
  /// Inflates every level-0 integer range to [ceil(beta - eps), floor(gamma + eps)].
  double boundary_eps = 0.0;
};

// ---------------------------------------------------------------------------
// Box splitting primitives. A level-(L+1) vector of length 2^{L+1} is read as
// two halves (v1; v2) of length 2^L.

/// m(b) = (b1 + b2) / 2.
template <std::floating_point Real>
void interval_mean(std::span<const Real> b, std::span<Real> out) {
  const std::size_t w = out.size();
  for (std::size_t j = 0; j < w; ++j) out[j] = (b[j] + b[w + j]) / Real(2);
}

template <std::floating_point Real = double>
std::vector<Real> interval_mean(int level, std::span<const Real> b) {
  const std::size_t w = std::size_t{1} << level;
  if (b.size() != 2 * w) throw std::domain_error("interval_mean: input length must be 2^(L+1)");
  std::vector<Real> out(w);
  interval_mean<Real>(b, std::span<Real>(out));
  return out;
}

/// Lower/upper bounds on A_L x2 given a1 = A_L x1:
///   lower = D_L^{-1} max(b1 - a1, a1 - c2)
///   upper = D_L^{-1} min(c1 - a1, a1 - b2)
template <std::floating_point Real>
void clamp_bounds(std::span<const Real> a1, std::span<const Real> b, std::span<const Real> c,
                  std::span<const Real> diag, std::span<Real> lower, std::span<Real> upper) {
  const std::size_t w = a1.size();
  for (std::size_t j = 0; j < w; ++j) {
    lower[j] = std::max(b[j] - a1[j], a1[j] - c[w + j]) / diag[j];
    upper[j] = std::min(c[j] - a1[j], a1[j] - b[w + j]) / diag[j];
  }
}

template <std::floating_point Real = double>
std::pair<std::vector<Real>, std::vector<Real>> clamp_bounds(int level, std::span<const Real> a1,
                                                             std::span<const Real> b,
                                                             std::span<const Real> c,
                                                             const DiagLadder<Real>& ladder) {
  const std::size_t w = std::size_t{1} << level;
  const auto diag = ladder.at(static_cast<std::size_t>(level));
  if (a1.size() != w || b.size() != 2 * w || c.size() != 2 * w) {
    throw std::domain_error("clamp_bounds: length mismatch");
  }
  std::vector<Real> lower(w), upper(w);
  clamp_bounds<Real>(a1, b, c, diag, lower, upper);
  return {std::move(lower), std::move(upper)};
}

/// Butterfly merge (a1 + D a2; a1 - D a2) producing A_{L+1} (x1; x2) from
/// a1 = A_L x1 and a2 = A_L x2.
template <std::floating_point Real>
void alpha_merge(std::span<const Real> a1, std::span<const Real> a2, std::span<const Real> diag,
                 std::span<Real> out) {
  const std::size_t w = a1.size();
  for (std::size_t j = 0; j < w; ++j) {
    const Real t = diag[j] * a2[j];
    out[j] = a1[j] + t;
    out[w + j] = a1[j] - t;
  }
}

/// `level` is the level of the result (L+1); D_L is taken from the ladder.
template <std::floating_point Real = double>
std::vector<Real> alpha_merge(int level, std::span<const Real> a1, std::span<const Real> a2,
                              const DiagLadder<Real>& ladder) {
  if (level < 1) throw std::domain_error("alpha_merge: result level must be >= 1");
  const auto diag = ladder.at(static_cast<std::size_t>(level - 1));
  if (a1.size() != diag.size() || a2.size() != diag.size()) {
    throw std::domain_error("alpha_merge: length mismatch");
  }
  std::vector<Real> out(2 * diag.size());
  alpha_merge<Real>(a1, a2, diag, out);
  return out;
}

/// A_n v by n levels of butterfly merges, without forming A_n.
template <std::floating_point Real = double>
std::vector<Real> apply_generator(const DiagLadder<Real>& ladder, std::span<const Real> v) {
  const std::size_t d = ladder.level().dim();
  if (v.size() != d) throw std::domain_error("apply_generator: length mismatch");
  std::vector<Real> cur(v.begin(), v.end()), next(d);
  for (std::size_t L = 0; L < ladder.size(); ++L) {
    const std::size_t w = std::size_t{1} << L;
    for (std::size_t off = 0; off < d; off += 2 * w) {
      alpha_merge<Real>(std::span<const Real>(cur).subspan(off, w),
                        std::span<const Real>(cur).subspan(off + w, w), ladder[L],
                        std::span<Real>(next).subspan(off, 2 * w));
    }
    std::swap(cur, next);
  }
  return cur;
}

namespace detail {

template <std::floating_point Real>
std::int64_t range_lo(Real beta, double eps) {
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(beta) - eps));
}

template <std::floating_point Real>
std::int64_t range_hi(Real gamma, double eps) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(gamma) + eps));
}

template <std::floating_point Real>
void recursive_set(int n, std::span<const Real> b, std::span<const Real> c,
                   const DiagLadder<Real>& ladder, const EnumOptions& opts,
                   std::vector<LatticePoint<Real>>& out) {
  if (n == 0) {
    const std::int64_t lo = range_lo(b[0], opts.boundary_eps);
    const std::int64_t hi = range_hi(c[0], opts.boundary_eps);
    for (std::int64_t k = lo; k <= hi; ++k) out.push_back({{k}, {static_cast<Real>(k)}});
    return;
  }
  const int L = n - 1;
  const std::size_t w = std::size_t{1} << L;
  std::vector<Real> mb(w), mc(w);
  interval_mean<Real>(b, mb);
  interval_mean<Real>(c, mc);

  std::vector<LatticePoint<Real>> firsts;
  recursive_set<Real>(L, mb, mc, ladder, opts, firsts);

  std::vector<Real> lower(w), upper(w);
  std::vector<LatticePoint<Real>> seconds;
  for (const auto& p1 : firsts) {
    clamp_bounds<Real>(p1.x, b, c, ladder[L], lower, upper);
    seconds.clear();
    recursive_set<Real>(L, lower, upper, ladder, opts, seconds);
    for (const auto& p2 : seconds) {
      LatticePoint<Real> p;
      p.k.reserve(2 * w);
      p.k.insert(p.k.end(), p1.k.begin(), p1.k.end());
      p.k.insert(p.k.end(), p2.k.begin(), p2.k.end());
      p.x.resize(2 * w);
      alpha_merge<Real>(p1.x, p2.x, ladder[L], p.x);
      out.push_back(std::move(p));
    }
  }
}

template <std::floating_point Real>
std::vector<Real> to_real(const std::vector<double>& v) {
  return std::vector<Real>(v.begin(), v.end());
}

}  // namespace detail

/// All k in Z^d with lower <= A_n k <= upper, built by recursive halving of
/// the dimension. Points come out in lexicographic order of k.
template <std::floating_point Real = double>
std::vector<LatticePoint<Real>> enumerate_recursive(Level level, const Box& box,
                                                    const DiagLadder<Real>& ladder,
                                                    EnumOptions opts = {}) {
  validate_box(box, level.dim());
  if (ladder.level() != level) throw std::domain_error("ladder built for a different level");
  const auto b = detail::to_real<Real>(box.lower);
  const auto c = detail::to_real<Real>(box.upper);
  std::vector<LatticePoint<Real>> out;
  detail::recursive_set<Real>(level.exponent(), b, c, ladder, opts, out);
  return out;
}

/// Streaming enumerator: a 2^n-deep nested loop over k_1, ..., k_d that keeps
/// only the alpha/beta/gamma tables for every (level, slot) pair.
///
/// For level L the tables hold 2^{n-L} slots of width 2^L, stored flat so
/// each level is exactly d reals. Coordinate i = 2^r p (p odd) closes the
/// alpha slots along its 2-adic valuation and opens the beta/gamma slot
/// (r, p + 1) together with its descendants (j, 2^{r-j} p + 1).
template <std::floating_point Real = double>
class LatticeEnumerator {
public:
  explicit LatticeEnumerator(const DiagLadder<Real>& ladder, EnumOptions opts = {})
      : ladder_(&ladder), opts_(opts) {
    const int n = ladder.level().exponent();
    const std::size_t d = ladder.level().dim();
    levels_ = n;
    dim_ = d;
    alpha_.assign(static_cast<std::size_t>(n + 1), std::vector<Real>(d));
    beta_.assign(static_cast<std::size_t>(n + 1), std::vector<Real>(d));
    gamma_.assign(static_cast<std::size_t>(n + 1), std::vector<Real>(d));
    val_r_.resize(d + 1);
    val_p_.resize(d + 1);
    for (std::size_t i = 1; i <= d; ++i) {
      std::size_t p = i;
      int r = 0;
      while ((p & 1u) == 0) {
        p >>= 1;
        ++r;
      }
      val_r_[i] = r;
      val_p_[i] = p;
    }
    k_.resize(d);
    hi_.resize(d);
  }

  Level level() const noexcept { return ladder_->level(); }

  /// Integer range [lo, hi] of the first coordinate k_1 for this box.
  std::pair<std::int64_t, std::int64_t> first_coordinate_range(const Box& box) {
    init(box);
    return {detail::range_lo(beta_[0][0], opts_.boundary_eps),
            detail::range_hi(gamma_[0][0], opts_.boundary_eps)};
  }

  /// Visits every lattice point of the box in lexicographic order of k.
  /// `consumer` is called with a PointRef<Real>; returns the number of points.
  template <class Consumer>
  std::uint64_t run(const Box& box, Consumer&& consumer) {
    return run_impl(box, consumer, nullptr);
  }

  /// As run(), restricted to k_1 in [first_lo, first_hi].
  template <class Consumer>
  std::uint64_t run(const Box& box, Consumer&& consumer, std::int64_t first_lo,
                    std::int64_t first_hi) {
    const std::pair<std::int64_t, std::int64_t> first_range{first_lo, first_hi};
    return run_impl(box, consumer, &first_range);
  }

  /// Total size in reals of the alpha/beta/gamma tables.
  std::size_t state_size() const noexcept { return 3 * static_cast<std::size_t>(levels_ + 1) * dim_; }

private:
  // Slot a (1-based) of level L occupies [(a-1) 2^L, a 2^L) in the flat table.
  static std::span<Real> slot(std::vector<Real>& table, int L, std::size_t a) {
    const std::size_t w = std::size_t{1} << L;
    return std::span<Real>(table).subspan((a - 1) * w, w);
  }

  void init(const Box& box) {
    validate_box(box, dim_);
    const int n = levels_;
    std::copy(box.lower.begin(), box.lower.end(), beta_[n].begin());
    std::copy(box.upper.begin(), box.upper.end(), gamma_[n].begin());
    for (int j = n - 1; j >= 0; --j) {
      interval_mean<Real>(slot(beta_[j + 1], j + 1, 1), slot(beta_[j], j, 1));
      interval_mean<Real>(slot(gamma_[j + 1], j + 1, 1), slot(gamma_[j], j, 1));
    }
  }

  void update_alpha(std::size_t i) {
    const int r = val_r_[i];
    const std::size_t p = val_p_[i];
    alpha_[0][i - 1] = static_cast<Real>(k_[i - 1]);
    for (int j = 1; j <= r; ++j) {
      const std::size_t a = (std::size_t{1} << (r - j)) * p;
      alpha_merge<Real>(slot(alpha_[j - 1], j - 1, 2 * a - 1), slot(alpha_[j - 1], j - 1, 2 * a),
                        (*ladder_)[static_cast<std::size_t>(j - 1)], slot(alpha_[j], j, a));
    }
  }

  void update_beta_gamma(std::size_t i) {
    const int r = val_r_[i];
    const std::size_t p = val_p_[i];
    const std::size_t parent = (p + 1) / 2;
    clamp_bounds<Real>(slot(alpha_[r], r, p), slot(beta_[r + 1], r + 1, parent),
                       slot(gamma_[r + 1], r + 1, parent),
                       (*ladder_)[static_cast<std::size_t>(r)], slot(beta_[r], r, p + 1),
                       slot(gamma_[r], r, p + 1));
    for (int j = r - 1; j >= 0; --j) {
      const std::size_t a = (std::size_t{1} << (r - j)) * p + 1;
      const std::size_t up = (std::size_t{1} << (r - j - 1)) * p + 1;
      interval_mean<Real>(slot(beta_[j + 1], j + 1, up), slot(beta_[j], j, a));
      interval_mean<Real>(slot(gamma_[j + 1], j + 1, up), slot(gamma_[j], j, a));
    }
  }

  template <class Consumer>
  std::uint64_t run_impl(const Box& box, Consumer& consumer,
                         const std::pair<std::int64_t, std::int64_t>* first_range) {
    init(box);
    const std::size_t d = dim_;
    const double eps = opts_.boundary_eps;
    std::uint64_t count = 0;

    // idx is the 0-based coordinate currently being iterated.
    std::size_t idx = 0;
    k_[0] = detail::range_lo(beta_[0][0], eps);
    hi_[0] = detail::range_hi(gamma_[0][0], eps);
    if (first_range != nullptr) {
      k_[0] = std::max(k_[0], first_range->first);
      hi_[0] = std::min(hi_[0], first_range->second);
    }
    const std::span<const std::int64_t> kview(k_);
    const std::span<const Real> xview(alpha_[levels_]);

    for (;;) {
      if (k_[idx] > hi_[idx]) {
        if (idx == 0) break;
        --idx;
        ++k_[idx];
        continue;
      }
      const std::size_t i = idx + 1;
      update_alpha(i);
      if (i == d) {
        ++count;
        consumer(PointRef<Real>{kview, xview});
        ++k_[idx];
        continue;
      }
      update_beta_gamma(i);
      ++idx;
      k_[idx] = detail::range_lo(beta_[0][idx], eps);
      hi_[idx] = detail::range_hi(gamma_[0][idx], eps);
    }
    return count;
  }

  const DiagLadder<Real>* ladder_;
  EnumOptions opts_;
  int levels_ = 0;
  std::size_t dim_ = 1;
  std::vector<std::vector<Real>> alpha_, beta_, gamma_;
  std::vector<int> val_r_;
  std::vector<std::size_t> val_p_;
  std::vector<std::int64_t> k_, hi_;
};

/// Streams every lattice point of the box to `consumer` (lexicographic in k)
/// and returns the count.
template <std::floating_point Real = double, class Consumer>
std::uint64_t enumerate_stream(Level level, const Box& box, const DiagLadder<Real>& ladder,
                               Consumer&& consumer, EnumOptions opts = {}) {
  if (ladder.level() != level) throw std::domain_error("ladder built for a different level");
  LatticeEnumerator<Real> e(ladder, opts);
  return e.run(box, std::forward<Consumer>(consumer));
}

template <std::floating_point Real = double>
std::uint64_t count_points(Level level, const Box& box, const DiagLadder<Real>& ladder,
                           EnumOptions opts = {}) {
  return enumerate_stream<Real>(level, box, ladder, [](const PointRef<Real>&) {}, opts);
}

/// Splits the k_1 range into `chunks` contiguous pieces [lo, hi]. Empty ranges
/// yield no chunks.
inline std::vector<std::pair<std::int64_t, std::int64_t>> split_range(std::int64_t lo,
                                                                      std::int64_t hi,
                                                                      std::size_t chunks) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (hi < lo || chunks == 0) return out;
  const auto total = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t n = std::min<std::uint64_t>(chunks, total);
  std::int64_t start = lo;
  for (std::uint64_t c = 0; c < n; ++c) {
    const std::uint64_t len = total / n + (c < total % n ? 1 : 0);
    const std::int64_t end = start + static_cast<std::int64_t>(len) - 1;
    out.emplace_back(start, end);
    start = end + 1;
  }
  return out;
}

/// Runs `make_consumer(chunk_index)`-produced consumers over contiguous chunks
/// of the k_1 range on `threads` workers. Emission order is lexicographic
/// within a chunk only. Returns per-chunk counts in chunk order.
template <std::floating_point Real = double, class ConsumerFactory>
std::vector<std::uint64_t> enumerate_parallel(Level level, const Box& box,
                                              const DiagLadder<Real>& ladder,
                                              std::size_t threads,
                                              ConsumerFactory&& make_consumer,
                                              EnumOptions opts = {}) {
  if (ladder.level() != level) throw std::domain_error("ladder built for a different level");
  if (threads == 0) threads = 1;
  LatticeEnumerator<Real> probe(ladder, opts);
  const auto [lo, hi] = probe.first_coordinate_range(box);
  const auto chunks = split_range(lo, hi, threads);
  std::vector<std::uint64_t> counts(chunks.size(), 0);
  std::vector<std::exception_ptr> errors(chunks.size());
  std::vector<std::thread> workers;
  workers.reserve(chunks.size());
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    workers.emplace_back([&, c] {
      try {
        LatticeEnumerator<Real> e(ladder, opts);
        auto consumer = make_consumer(c);
        counts[c] = e.run(box, consumer, chunks[c].first, chunks[c].second);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return counts;
}

template <std::floating_point Real = double>
std::uint64_t count_points_parallel(Level level, const Box& box, const DiagLadder<Real>& ladder,
                                    std::size_t threads, EnumOptions opts = {}) {
  const auto counts = enumerate_parallel<Real>(
      level, box, ladder, threads, [](std::size_t) { return [](const PointRef<Real>&) {}; }, opts);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

}  // namespace frolov

#endif  // FROLOV_ENUMERATION_HPP
