#ifndef FROLOV_LATTICE_HPP
#define FROLOV_LATTICE_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frolov/level.hpp"

namespace frolov {

/// Dense matrix used for verification and the brute-force oracle only.
using Matrix = Eigen::MatrixXd;

/// Coordinate permutation sigma(n, k) on {1, ..., 2^n} (1-based).
///
/// sigma(0, 1) = 1; the lower half of level n+1 copies level n and the
/// upper half mirrors it as 2d + 1 - sigma(n, k - d).
inline std::int64_t sigma(int n, std::int64_t k) {
  if (n < 0 || n > 62) throw std::domain_error("sigma: level out of range");
  const std::int64_t d = std::int64_t{1} << n;
  if (k < 1 || k > d) {
    throw std::domain_error("sigma: index " + std::to_string(k) + " outside [1, " +
                            std::to_string(d) + "]");
  }
  if (n == 0) return 1;
  const std::int64_t half = d / 2;
  if (k <= half) return sigma(n - 1, k);
  return d + 1 - sigma(n - 1, k - half);
}

/// Permuted Chebyshev root xi_{n,k} = 2 cos(pi (2 sigma(n,k) - 1) / 2^{n+1}).
inline double root_xi(int n, std::int64_t k) {
  const auto s = sigma(n, k);
  const double denom = std::ldexp(1.0, n + 1);
  return 2.0 * std::cos(std::numbers::pi * static_cast<double>(2 * s - 1) / denom);
}

/// Diagonals of D_0, ..., D_{n-1}. Entry L holds 2^L positive reals,
/// D_L = diag(xi_{L+1,1}, ..., xi_{L+1,2^L}).
template <std::floating_point Real = double>
class DiagLadder {
public:
  DiagLadder() = default;

  explicit DiagLadder(Level level) : level_(level) {
    const int n = level.exponent();
    diag_.reserve(static_cast<std::size_t>(n));
    for (int L = 0; L < n; ++L) {
      const std::size_t width = std::size_t{1} << L;
      std::vector<Real> row(width);
      for (std::size_t i = 0; i < width; ++i) {
        row[i] = static_cast<Real>(root_xi(L + 1, static_cast<std::int64_t>(i + 1)));
      }
      diag_.push_back(std::move(row));
    }
  }

  Level level() const noexcept { return level_; }
  /// Number of split levels (= n).
  std::size_t size() const noexcept { return diag_.size(); }
  bool empty() const noexcept { return diag_.empty(); }

  /// Diagonal of D_L.
  std::span<const Real> operator[](std::size_t L) const { return diag_[L]; }

  std::span<const Real> at(std::size_t L) const {
    if (L >= diag_.size()) {
      throw std::domain_error("diag ladder has no level " + std::to_string(L));
    }
    return diag_[L];
  }

private:
  Level level_{0};
  std::vector<std::vector<Real>> diag_;
};

template <std::floating_point Real = double>
DiagLadder<Real> build_diag_ladder(Level level) {
  return DiagLadder<Real>(level);
}

/// Generating matrix A_n from the block recursion
/// A_{L+1} = [[A_L, D_L A_L], [A_L, -D_L A_L]], A_0 = 1.
inline Matrix build_matrix_a(Level level, const DiagLadder<double>& ladder) {
  if (ladder.level() != level) throw std::domain_error("ladder built for a different level");
  Matrix a = Matrix::Ones(1, 1);
  for (std::size_t L = 0; L < ladder.size(); ++L) {
    const Eigen::Index w = a.rows();
    Eigen::Map<const Eigen::VectorXd> diag(ladder[L].data(), w);
    const Matrix scaled = diag.asDiagonal() * a;
    Matrix next(2 * w, 2 * w);
    next.topLeftCorner(w, w) = a;
    next.topRightCorner(w, w) = scaled;
    next.bottomLeftCorner(w, w) = a;
    next.bottomRightCorner(w, w) = -scaled;
    a = std::move(next);
  }
  return a;
}

/// Vandermonde matrix V_n = (xi_{n,i}^{j-1}) of the permuted roots.
inline Matrix build_vandermonde(Level level) {
  const auto d = static_cast<Eigen::Index>(level.dim());
  Matrix v(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double xi = root_xi(level.exponent(), i + 1);
    double p = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      v(i, j) = p;
      p *= xi;
    }
  }
  return v;
}

/// |det A_n| = (2d)^{d/2} / sqrt(2), in closed form.
inline double det_magnitude(Level level) {
  const double d = static_cast<double>(level.dim());
  return std::pow(2.0 * d, d / 2.0) / std::numbers::sqrt2;
}

/// Rescaled Chebyshev polynomial P_d(x) = 2 cos(d arccos(x / 2)), |x| <= 2.
inline double chebyshev_p(std::size_t d, double x) {
  return 2.0 * std::cos(static_cast<double>(d) * std::acos(x / 2.0));
}

}  // namespace frolov

#endif  // FROLOV_LATTICE_HPP
