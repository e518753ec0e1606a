#ifndef FROLOV_CUBATURE_HPP
#define FROLOV_CUBATURE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "frolov/enumeration.hpp"
#include "frolov/lattice.hpp"
#include "frolov/level.hpp"

namespace frolov {

/// Raised when a mapped node falls outside the tolerance-inflated unit cube.
class ConsistencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Level, scale N and the derived shrink s(N) = (|det A_n| N)^{-1/d}.
class CubatureSpec {
public:
  CubatureSpec(Level level, double scale) : level_(level), scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw std::domain_error("cubature scale N must be a positive finite number");
    }
    inverse_shrink_ =
        std::pow(det_magnitude(level) * scale, 1.0 / static_cast<double>(level.dim()));
    shrink_ = 1.0 / inverse_shrink_;
  }

  /// N = 2^m.
  static CubatureSpec from_log2(Level level, int log2_scale) {
    return CubatureSpec(level, std::ldexp(1.0, log2_scale));
  }

  Level level() const noexcept { return level_; }
  std::size_t dim() const noexcept { return level_.dim(); }
  double scale() const noexcept { return scale_; }
  double shrink() const noexcept { return shrink_; }
  /// s(N)^{-1}; the lattice box half-width is half of this.
  double inverse_shrink() const noexcept { return inverse_shrink_; }
  /// |det(s A_n)| = 1 / N.
  double weight() const noexcept { return 1.0 / scale_; }

private:
  Level level_;
  double scale_;
  double shrink_ = 1.0;
  double inverse_shrink_ = 1.0;
};

/// Random dilation u in [1/2, 3/2]^d and lattice shift v in [0, 1]^d.
struct RandomShift {
  std::vector<double> u;
  std::vector<double> v;
  std::optional<std::uint64_t> seed;

  static RandomShift identity(std::size_t d) {
    return {std::vector<double>(d, 1.0), std::vector<double>(d, 0.0), std::nullopt};
  }

  void validate(std::size_t d) const {
    if (u.size() != d || v.size() != d) throw std::domain_error("shift dimension mismatch");
    for (std::size_t i = 0; i < d; ++i) {
      if (!(u[i] >= 0.5 && u[i] <= 1.5)) throw std::domain_error("shift u outside [1/2, 3/2]");
      if (!(v[i] >= 0.0 && v[i] <= 1.0)) throw std::domain_error("shift v outside [0, 1]");
    }
  }
};

namespace detail {

// 53 high bits of a 64-bit draw, mapped to [0, 1).
inline double unit_draw(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Deterministic shift for a seed. Generator: std::mt19937_64 seeded through
/// std::seed_seq{seed_lo, seed_hi, stream}; stream 0 draws u, stream 1 draws v.
inline RandomShift sample_shift(std::uint64_t seed, std::size_t d) {
  const auto lo = static_cast<std::uint32_t>(seed & 0xffffffffu);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  std::seed_seq seq_u{lo, hi, 0u};
  std::seed_seq seq_v{lo, hi, 1u};
  std::mt19937_64 eng_u(seq_u);
  std::mt19937_64 eng_v(seq_v);
  RandomShift s{std::vector<double>(d), std::vector<double>(d), seed};
  for (std::size_t i = 0; i < d; ++i) {
    s.u[i] = 0.5 + detail::unit_draw(eng_u);
    s.v[i] = detail::unit_draw(eng_v);
  }
  return s;
}

/// [-s^{-1}/2, s^{-1}/2]^d; x -> s x maps its lattice points onto the nodes.
inline Box standard_box(const CubatureSpec& spec) {
  return Box::symmetric(spec.dim(), spec.inverse_shrink() * 0.5);
}

struct RandomizedBox {
  Box box;
  /// A_n v.
  std::vector<double> shift_vector;
};

/// Box s^{-1} U [-h, h] - A_n v with h = (1/2, ..., 1/2).
inline RandomizedBox randomized_box(const CubatureSpec& spec, const RandomShift& shift,
                                    const DiagLadder<double>& ladder) {
  const std::size_t d = spec.dim();
  shift.validate(d);
  if (ladder.level() != spec.level()) throw std::domain_error("ladder built for a different level");
  RandomizedBox out{Box{std::vector<double>(d), std::vector<double>(d)},
                    apply_generator<double>(ladder, shift.v)};
  for (std::size_t i = 0; i < d; ++i) {
    const double half = spec.inverse_shrink() * 0.5 * shift.u[i];
    out.box.lower[i] = -half - out.shift_vector[i];
    out.box.upper[i] = half - out.shift_vector[i];
  }
  return out;
}

inline constexpr double kNodeTolerance = 1e-9;

/// Node s U^{-1} (x + A_n v), written into `node`.
inline void map_to_unit(std::span<const double> x, const CubatureSpec& spec,
                        const RandomShift& shift, std::span<const double> shift_vector,
                        std::span<double> node) {
  const double s = spec.shrink();
  for (std::size_t i = 0; i < x.size(); ++i) {
    node[i] = s * (x[i] + shift_vector[i]) / shift.u[i];
    if (!(std::abs(node[i]) <= 0.5 + kNodeTolerance)) {
      throw ConsistencyError("node coordinate " + std::to_string(i + 1) + " = " +
                             std::to_string(node[i]) + " lies outside [-1/2, 1/2]");
    }
  }
}

inline std::vector<double> map_to_unit(std::span<const double> x, const CubatureSpec& spec,
                                       const RandomShift& shift,
                                       std::span<const double> shift_vector) {
  std::vector<double> node(x.size());
  map_to_unit(x, spec, shift, shift_vector, node);
  return node;
}

struct IntegrateOptions {
  /// Neumaier-compensated accumulation instead of a plain running sum.
  bool compensated = false;
  /// >1 splits the first coordinate range across worker threads.
  std::size_t threads = 1;
  EnumOptions enumeration{};
};

struct IntegrationResult {
  double value = 0.0;
  std::uint64_t node_count = 0;
};

namespace detail {

struct Accumulator {
  bool compensated = false;
  double sum = 0.0;
  double carry = 0.0;

  void add(double term) {
    if (!compensated) {
      sum += term;
      return;
    }
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      carry += (sum - t) + term;
    } else {
      carry += (term - t) + sum;
    }
    sum = t;
  }

  double total() const { return sum + carry; }
};

}  // namespace detail

/// Frolov cubature: w * sum f(node) over the nodes of the standard box, or of
/// the randomized box when a shift is given. Nodes are streamed, never stored.
/// The weight is |det(U^{-1} s A_n)| = 1 / (N prod u_i).
template <class Integrand>
IntegrationResult integrate(const CubatureSpec& spec, Integrand&& f,
                            const std::optional<RandomShift>& shift,
                            const DiagLadder<double>& ladder, IntegrateOptions opts = {}) {
  const std::size_t d = spec.dim();
  const RandomShift active = shift ? *shift : RandomShift::identity(d);
  Box box;
  std::vector<double> shift_vector;
  double weight = 0.0;
  if (shift) {
    auto rb = randomized_box(spec, active, ladder);
    box = std::move(rb.box);
    shift_vector = std::move(rb.shift_vector);
    double prod_u = 1.0;
    for (double ui : active.u) prod_u *= ui;
    weight = 1.0 / (spec.scale() * prod_u);
  } else {
    if (ladder.level() != spec.level()) {
      throw std::domain_error("ladder built for a different level");
    }
    box = standard_box(spec);
    shift_vector.assign(d, 0.0);
    weight = spec.weight();
  }

  auto make_consumer = [&](detail::Accumulator& acc, std::vector<double>& node) {
    return [&](const PointRef<double>& p) {
      map_to_unit(p.x, spec, active, shift_vector, node);
      acc.add(f(std::span<const double>(node)));
    };
  };

  IntegrationResult result;
  if (opts.threads <= 1) {
    detail::Accumulator acc{opts.compensated};
    std::vector<double> node(d);
    result.node_count =
        enumerate_stream<double>(spec.level(), box, ladder, make_consumer(acc, node),
                                 opts.enumeration);
    result.value = weight * acc.total();
    return result;
  }

  std::vector<detail::Accumulator> accs(opts.threads, detail::Accumulator{opts.compensated});
  std::vector<std::vector<double>> nodes(opts.threads, std::vector<double>(d));
  const auto counts = enumerate_parallel<double>(
      spec.level(), box, ladder, opts.threads,
      [&](std::size_t c) { return make_consumer(accs[c], nodes[c]); }, opts.enumeration);
  detail::Accumulator total{opts.compensated};
  for (std::size_t c = 0; c < counts.size(); ++c) {
    result.node_count += counts[c];
    total.add(accs[c].total());
  }
  result.value = weight * total.total();
  return result;
}

}  // namespace frolov

#endif  // FROLOV_CUBATURE_HPP
