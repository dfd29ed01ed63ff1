#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ree/field.hpp"

namespace ree {

struct BenchRow {
  std::uint32_t q = 0;
  std::string op;  // "stabilizer" or "conjugation"
  int trials = 0;
  double mean_normalized = 0;  // mean_seconds / field_multiplication_baseline
  double mean_seconds = 0;
};

/// Wall time in seconds of 10^6 multiplications of random pairs of elements of f (best of five runs).
double field_multiplication_baseline(const Field& f, std::uint64_t seed);

/**
 * Per m: mean time of a stabilizer element from a fresh finder (centralizer
 * included) and of conjugate_to_standard, both on random conjugates of the
 * standard copy.
 */
std::vector<BenchRow> run_bench(std::span<const int> ms, int trials, std::uint64_t seed);

/// Header "q,op,trials,mean_normalized,mean_seconds" and one line per row.
std::string bench_csv(std::span<const BenchRow> rows);

}  // namespace ree
