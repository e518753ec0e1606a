// Counts the standard cubature box with the enumeration carried out in single
// and in double precision and prints both. Single precision is expected to
// drift from the published counts for large N (e.g. d = 4, N = 2^24).
//
// usage: precision_experiment [dim=4] [min_log2N=16] [max_log2N=24]

#include <cstdio>
#include <cstdlib>

#include "frolov/frolov.hpp"

int main(int argc, char** argv) {
  const std::size_t dim = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 4;
  const int lo = argc > 2 ? std::atoi(argv[2]) : 16;
  const int hi = argc > 3 ? std::atoi(argv[3]) : 24;

  const auto level = frolov::Level::from_dimension(dim);
  const auto ladder_d = frolov::build_diag_ladder<double>(level);
  const auto ladder_f = frolov::build_diag_ladder<float>(level);

  std::printf("d,log2N,golden,double,float\n");
  for (int m = lo; m <= hi; ++m) {
    const auto box = frolov::standard_box(frolov::CubatureSpec::from_log2(level, m));
    const auto count_d = frolov::count_points<double>(level, box, ladder_d);
    const auto count_f = frolov::count_points<float>(level, box, ladder_f);
    long long golden = -1;
    for (const auto& r : frolov::kGoldenCounts) {
      if (r.d == dim && r.log2N == m) golden = static_cast<long long>(r.expected_count);
    }
    std::printf("%zu,%d,%lld,%llu,%llu\n", dim, m, golden,
                static_cast<unsigned long long>(count_d), static_cast<unsigned long long>(count_f));
  }
  return 0;
}
