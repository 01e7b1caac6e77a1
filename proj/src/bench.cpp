#include "pocrf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pocrf/batched.hpp"
#include "pocrf/error.hpp"
#include "pocrf/mask.hpp"
#include "pocrf/sampling.hpp"
#include "pocrf/vanilla.hpp"

namespace pocrf {

namespace {

template <typename Fn>
double seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

BenchRow run_bench(const BenchConfig& config) {
  if (config.batch <= 0 || config.length <= 0 || config.labels <= 0 || config.repeats <= 0 ||
      config.threads <= 0)
    throw Error(ErrorCode::bad_config, "bench sizes must be positive");
  if (!(config.entity_rate >= 0.0 && config.entity_rate <= 1.0))
    throw Error(ErrorCode::bad_config, "entity rate must lie in [0, 1]");
  if (config.labels < 2) throw Error(ErrorCode::bad_config, "bench needs at least 2 labels");

  const int observed = std::max(1, config.labels / 2);
  const auto schema = sampling::numbered_schema(observed, config.labels - observed);
  std::mt19937_64 rng(config.seed);
  std::vector<ScoreChart> charts;
  std::vector<SymbolTree> symbols;
  std::vector<ChartMask> masks;
  for (int b = 0; b < config.batch; ++b) {
    charts.push_back(sampling::random_chart(rng, config.length, config.labels));
    symbols.push_back(classify_nodes(sampling::random_partial_tree(rng, config.length, schema, config.entity_rate)));
    masks.push_back(build_mask(symbols.back(), schema));
  }

  std::vector<double> vanilla(config.batch);
  std::vector<double> batched;
  BenchRow row;
  row.batch_size = config.batch;
  row.sentence_length = config.length;
  row.label_count = config.labels;
  row.threads = config.threads;
  row.entity_rate = config.entity_rate;
  row.vanilla_time = row.masked_batched_time = std::numeric_limits<double>::infinity();
  for (int r = 0; r < config.repeats; ++r) {
    row.vanilla_time = std::min(row.vanilla_time, seconds([&] {
      for (int b = 0; b < config.batch; ++b)
        vanilla[b] = vanilla_partial_marginalization(charts[b], symbols[b], schema);
    }));
    row.masked_batched_time = std::min(row.masked_batched_time, seconds([&] {
      batched = batched_masked_inside<double>(charts, masks, config.threads);
    }));
  }
  row.speedup_ratio = row.vanilla_time / row.masked_batched_time;
  for (int b = 0; b < config.batch; ++b) {
    const double gap = std::abs(vanilla[b] - batched[b]);
    row.max_value_discrepancy =
        std::isnan(gap) ? std::numeric_limits<double>::infinity() : std::max(row.max_value_discrepancy, gap);
  }
  return row;
}

std::string bench_csv_header() {
  return "batch_size,sentence_length,label_count,threads,entity_rate,vanilla_time,masked_batched_time,"
         "speedup_ratio,max_value_discrepancy";
}

std::string bench_csv_row(const BenchRow& row) {
  std::ostringstream out;
  out << row.batch_size << ',' << row.sentence_length << ',' << row.label_count << ','
      << row.threads << ',' << row.entity_rate << ',';
  out.precision(6);
  out << row.vanilla_time << ',' << row.masked_batched_time << ',' << row.speedup_ratio << ',';
  out.precision(3);
  out << std::scientific << row.max_value_discrepancy;
  return out.str();
}

}  // namespace pocrf
