#include "pocrf/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace pocrf {

void EvalReport::add(const std::vector<Span>& gold, const std::vector<Span>& predicted,
                     const std::vector<std::string>& label_names) {
  const std::set<Span> g(gold.begin(), gold.end());
  const std::set<Span> p(predicted.begin(), predicted.end());
  for (const auto& s : g) {
    auto& c = per_label[label_names.at(s.label)];
    ++c.gold;
    ++total.gold;
    if (p.count(s)) {
      ++c.matched;
      ++total.matched;
    }
  }
  for (const auto& s : p) {
    ++per_label[label_names.at(s.label)].predicted;
    ++total.predicted;
  }
}

std::string EvalReport::to_text() const {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %9s %9s %9s %8s %8s %8s\n", "label", "precision", "recall",
                "f1", "gold", "pred", "match");
  out += buf;
  auto row = [&](const std::string& name, const MatchCounts& c) {
    std::snprintf(buf, sizeof buf, "%-12s %9.4f %9.4f %9.4f %8ld %8ld %8ld\n", name.c_str(),
                  c.precision(), c.recall(), c.f1(), c.gold, c.predicted, c.matched);
    out += buf;
  };
  for (const auto& [name, c] : per_label) row(name, c);
  row("micro", total);
  return out;
}

std::string EvalReport::to_line() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "EVAL precision=%.6f recall=%.6f f1=%.6f gold=%ld predicted=%ld matched=%ld",
                precision(), recall(), f1(), total.gold, total.predicted, total.matched);
  return buf;
}

}  // namespace pocrf
