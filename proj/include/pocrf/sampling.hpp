#ifndef POCRF_SAMPLING_HPP
#define POCRF_SAMPLING_HPP

#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "pocrf/annotation.hpp"
#include "pocrf/chart.hpp"
#include "pocrf/label_schema.hpp"

// Random charts and annotations for self-checks, benchmarks and tests.
namespace pocrf::sampling {

// Uniform[lo, hi] on the upper triangle; NaN below it so any read of an
// unused cell shows up in the result.
inline ScoreChart random_chart(std::mt19937_64& rng, int n, int labels, double lo = -2.0,
                               double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScoreChart c(n, labels, std::numeric_limits<double>::quiet_NaN());
  for_each_cell(n, [&](int i, int j) {
    for (int k = 0; k < labels; ++k) c(i, j, k) = u(rng);
  });
  return c;
}

inline void random_bracketing(std::mt19937_64& rng, int i, int j,
                              std::vector<std::pair<int, int>>& out) {
  out.emplace_back(i, j);
  if (i == j) return;
  const int m = std::uniform_int_distribution<int>(i, j - 1)(rng);
  random_bracketing(rng, i, m, out);
  random_bracketing(rng, m + 1, j, out);
}

// Random laminar annotation: each span of one random bracketing is kept
// with probability `keep` and given a random observed label.
inline PartialTree random_partial_tree(std::mt19937_64& rng, int n, const LabelSchema& schema,
                                       double keep = 0.35) {
  std::vector<std::pair<int, int>> spans;
  random_bracketing(rng, 0, n - 1, spans);
  std::bernoulli_distribution take(keep);
  std::uniform_int_distribution<int> label(0, schema.observed_count() - 1);
  std::vector<Span> entities;
  for (const auto& [i, j] : spans)
    if (take(rng)) entities.push_back(Span{i, j, label(rng)});
  return make_partial_tree(n, entities, schema);
}

inline LabelSchema numbered_schema(int observed, int latent) {
  std::vector<std::string> names;
  for (int k = 0; k < observed; ++k) names.push_back("L" + std::to_string(k));
  return LabelSchema(names, latent);
}

}  // namespace pocrf::sampling

#endif  // POCRF_SAMPLING_HPP
