#ifndef POCRF_METRICS_HPP
#define POCRF_METRICS_HPP

#include <map>
#include <string>
#include <vector>

#include "pocrf/chart.hpp"

namespace pocrf {

struct MatchCounts {
  long gold = 0;
  long predicted = 0;
  long matched = 0;

  double precision() const { return predicted > 0 ? double(matched) / predicted : 0.0; }
  double recall() const { return gold > 0 ? double(matched) / gold : 0.0; }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  MatchCounts& operator+=(const MatchCounts& o) {
    gold += o.gold;
    predicted += o.predicted;
    matched += o.matched;
    return *this;
  }
};

// Exact (start, end, label) matching, micro-averaged.
struct EvalReport {
  MatchCounts total;
  std::map<std::string, MatchCounts> per_label;

  double precision() const { return total.precision(); }
  double recall() const { return total.recall(); }
  double f1() const { return total.f1(); }

  // Adds one sentence; label names index per_label.
  void add(const std::vector<Span>& gold, const std::vector<Span>& predicted,
           const std::vector<std::string>& label_names);

  std::string to_text() const;
  // Single machine-readable line: EVAL precision=.. recall=.. f1=.. gold=..
  std::string to_line() const;
};

}  // namespace pocrf

#endif  // POCRF_METRICS_HPP
