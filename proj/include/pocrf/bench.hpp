#ifndef POCRF_BENCH_HPP
#define POCRF_BENCH_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pocrf {

struct BenchConfig {
  int batch = 32;
  int length = 40;
  int labels = 8;
  int repeats = 3;
  int threads = 4;
  // Chance that each span of a random bracketing is annotated. 0.1 gives
  // about one entity per five tokens.
  double entity_rate = 0.1;
  std::uint64_t seed = 0;
};

struct BenchRow {
  int batch_size = 0;
  int sentence_length = 0;
  int label_count = 0;
  int threads = 0;
  double entity_rate = 0.0;
  double vanilla_time = 0.0;         // seconds, best of the repeats
  double masked_batched_time = 0.0;  // seconds, best of the repeats
  double speedup_ratio = 0.0;
  double max_value_discrepancy = 0.0;
};

inline constexpr double kBenchTolerance = 1e-6;

// Times sequential per-sentence vanilla partial marginalization against one
// batched masked inside call on the same random charts and annotations.
// Half the labels are observed; at least one is latent.
BenchRow run_bench(const BenchConfig& config);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

}  // namespace pocrf

#endif  // POCRF_BENCH_HPP
