#ifndef FROLOV_LEVEL_HPP
#define FROLOV_LEVEL_HPP

#include <cstddef>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>

namespace frolov {

/// Default cap on the level exponent (d = 32).
inline constexpr int kDefaultMaxLevel = 5;

/// Hard ceiling regardless of configuration; beyond this the state tables
/// and closed-form determinants stop being meaningful in double precision.
inline constexpr int kAbsoluteMaxLevel = 10;

/// Level exponent n of the dimension d = 2^n.
class Level {
public:
  explicit Level(int n, int max_level = kDefaultMaxLevel) : n_(n) {
    if (max_level > kAbsoluteMaxLevel) max_level = kAbsoluteMaxLevel;
    if (n < 0 || n > max_level) {
      throw std::domain_error("level " + std::to_string(n) +
                              " outside [0, " + std::to_string(max_level) + "]");
    }
  }

  /// Level for a dimension that must be an exact power of two.
  static Level from_dimension(std::size_t d, int max_level = kDefaultMaxLevel) {
    if (d == 0 || (d & (d - 1)) != 0) {
      throw std::domain_error("dimension " + std::to_string(d) + " is not a power of two");
    }
    int n = 0;
    while ((std::size_t{1} << n) < d) ++n;
    return Level(n, max_level);
  }

  int exponent() const noexcept { return n_; }
  std::size_t dim() const noexcept { return std::size_t{1} << n_; }

  friend bool operator==(Level, Level) = default;

private:
  int n_;
};

/// Level cap from the FROLOV_MAX_LEVEL environment variable, if set.
inline int max_level_from_env(int fallback = kDefaultMaxLevel) {
  const char* raw = std::getenv("FROLOV_MAX_LEVEL");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 0 || v > kAbsoluteMaxLevel) {
    throw std::domain_error(std::string("invalid FROLOV_MAX_LEVEL: ") + raw);
  }
  return static_cast<int>(v);
}

}  // namespace frolov

#endif  // FROLOV_LEVEL_HPP
