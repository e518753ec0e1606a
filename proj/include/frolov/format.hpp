#ifndef FROLOV_FORMAT_HPP
#define FROLOV_FORMAT_HPP

#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "frolov/enumeration.hpp"

namespace frolov {

enum class PointFormat { csv, jsonl };

inline PointFormat parse_point_format(std::string_view name) {
  if (name == "csv") return PointFormat::csv;
  if (name == "jsonl") return PointFormat::jsonl;
  throw std::invalid_argument("unknown point format: " + std::string(name));
}

/// %.<precision>g; 17 significant digits round-trips any double.
inline void append_real(std::string& out, double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  out += buf;
}

/// "x1,...,xd" (csv) or {"k":[...],"x":[...]} (jsonl), without a newline.
inline std::string format_point(std::span<const std::int64_t> k, std::span<const double> x,
                                PointFormat format, int precision = 17) {
  std::string out;
  if (format == PointFormat::csv) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) out += ',';
      append_real(out, x[i], precision);
    }
    return out;
  }
  out += "{\"k\":[";
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(k[i]);
  }
  out += "],\"x\":[";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ',';
    append_real(out, x[i], precision);
  }
  out += "]}";
  return out;
}

inline std::string format_point(const PointRef<double>& p, PointFormat format,
                                int precision = 17) {
  return format_point(p.k, p.x, format, precision);
}

inline std::string format_point(const LatticePoint<double>& p, PointFormat format,
                                int precision = 17) {
  return format_point(p.k, p.x, format, precision);
}

/// "x1,...,xd" header line for csv output.
inline std::string csv_header(std::size_t d) {
  std::string out;
  for (std::size_t i = 1; i <= d; ++i) {
    if (i > 1) out += ',';
    out += 'x' + std::to_string(i);
  }
  return out;
}

}  // namespace frolov

#endif  // FROLOV_FORMAT_HPP
