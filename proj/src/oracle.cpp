#include "pocrf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace pocrf::oracle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_length(int n) {
  if (n < 1 || n > kMaxLength)
    throw Error(ErrorCode::too_large, "oracle supports 1 <= n <= " + std::to_string(kMaxLength) +
                                          ", got " + std::to_string(n));
}

std::vector<Bracketing> bracketings_of(int i, int j) {
  if (i == j) return {Bracketing{{i, j}}};
  std::vector<Bracketing> out;
  for (int m = i; m < j; ++m) {
    const auto lefts = bracketings_of(i, m);
    const auto rights = bracketings_of(m + 1, j);
    for (const auto& l : lefts) {
      for (const auto& r : rights) {
        Bracketing b{{i, j}};
        b.insert(b.end(), l.begin(), l.end());
        b.insert(b.end(), r.begin(), r.end());
        out.push_back(std::move(b));
      }
    }
  }
  return out;
}

// Plain accumulate-then-log; deliberately not the max-shifted helper the
// dynamic programs use.
double log_sum(const std::vector<double>& xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double total = 0.0;
  for (double x : xs) total += std::exp(x - mx);
  return mx + std::log(total);
}

std::vector<int> allowed_labels(const SymbolTree* symbols, const LabelSchema* schema, int i, int j,
                                int label_count) {
  std::vector<int> out;
  if (symbols == nullptr) {
    for (int k = 0; k < label_count; ++k) out.push_back(k);
    return out;
  }
  switch (symbols->kind(i, j)) {
    case NodeKind::observed:
      return symbols->observed_labels(i, j);
    case NodeKind::latent:
      for (int k = schema->observed_count(); k < schema->size(); ++k) out.push_back(k);
      return out;
    case NodeKind::rejected:
      return out;
  }
  return out;
}

bool bracketing_admissible(const Bracketing& br, const SymbolTree& symbols) {
  const int n = symbols.length();
  std::vector<char> present(std::size_t(n) * n, 0);
  for (const auto& [i, j] : br) {
    if (symbols.kind(i, j) == NodeKind::rejected) return false;
    present[std::size_t(i) * n + j] = 1;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (symbols.kind(i, j) == NodeKind::observed && !present[std::size_t(i) * n + j]) return false;
  return true;
}

// log of the total weight of one bracketing with labels marginalized per node.
double bracketing_log_weight(const ScoreChart& chart, const Bracketing& br, const SymbolTree* symbols,
                             const LabelSchema* schema) {
  double total = 0.0;
  for (const auto& [i, j] : br) {
    std::vector<double> xs;
    for (int k : allowed_labels(symbols, schema, i, j, chart.labels())) xs.push_back(chart(i, j, k));
    total += log_sum(xs);
  }
  return total;
}

MarginalChart marginals_impl(const ScoreChart& chart, const SymbolTree* symbols,
                             const LabelSchema* schema) {
  const int n = chart.length();
  require_length(n);
  const auto brs = enumerate_bracketings(n);
  std::vector<const Bracketing*> kept;
  std::vector<double> weights;
  for (const auto& br : brs) {
    if (symbols != nullptr && !bracketing_admissible(br, *symbols)) continue;
    kept.push_back(&br);
    weights.push_back(bracketing_log_weight(chart, br, symbols, schema));
  }
  const double log_z = log_sum(weights);
  MarginalChart mu(n, chart.labels(), 0.0);
  for (std::size_t b = 0; b < kept.size(); ++b) {
    const double p = std::exp(weights[b] - log_z);
    for (const auto& [i, j] : *kept[b]) {
      const auto labels = allowed_labels(symbols, schema, i, j, chart.labels());
      std::vector<double> xs;
      for (int k : labels) xs.push_back(chart(i, j, k));
      const double node_z = log_sum(xs);
      for (int k : labels) mu(i, j, k) += p * std::exp(chart(i, j, k) - node_z);
    }
  }
  return mu;
}

using TieKey = std::vector<std::pair<int, int>>;

TieKey tie_key(const FullTree& tree) {
  TieKey key;
  for (std::size_t p = 0; p < tree.nodes.size(); ++p) {
    const Span& s = tree.nodes[p];
    const int split = s.start == s.end ? -1 : tree.nodes[p + 1].end;
    key.emplace_back(s.label, split);
  }
  return key;
}

}  // namespace

std::uint64_t catalan(int k) {
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

std::vector<Bracketing> enumerate_bracketings(int n) {
  require_length(n);
  return bracketings_of(0, n - 1);
}

TreeEnumeration::TreeEnumeration(int n, int label_count)
    : n_(n), labels_(label_count), bracketings_(enumerate_bracketings(n)) {
  if (label_count < 1) throw Error(ErrorCode::bad_config, "need at least one label");
}

std::uint64_t TreeEnumeration::size() const {
  std::uint64_t per = 1;
  for (int i = 0; i < 2 * n_ - 1; ++i) per *= static_cast<std::uint64_t>(labels_);
  return per * bracketings_.size();
}

bool TreeEnumeration::next(FullTree& out) {
  const std::size_t nodes = 2 * std::size_t(n_) - 1;
  if (!started_) {
    started_ = true;
    odometer_.assign(nodes, 0);
  } else {
    std::size_t pos = nodes;
    while (pos > 0) {
      --pos;
      if (++odometer_[pos] < labels_) break;
      odometer_[pos] = 0;
      if (pos == 0) ++current_;
    }
  }
  if (current_ >= bracketings_.size()) return false;
  out.n = n_;
  out.nodes.resize(nodes);
  const auto& br = bracketings_[current_];
  for (std::size_t p = 0; p < nodes; ++p) out.nodes[p] = Span{br[p].first, br[p].second, odometer_[p]};
  return true;
}

TreeEnumeration enumerate_full_trees(int n, const LabelSchema& schema) {
  require_length(n);
  TreeEnumeration e(n, schema.size());
  if (e.size() > kMaxTrees)
    throw Error(ErrorCode::too_large, std::to_string(e.size()) + " trees exceeds the guard of " +
                                          std::to_string(kMaxTrees));
  return e;
}

bool is_compatible(const FullTree& tree, const SymbolTree& symbols, const LabelSchema& schema) {
  const int n = symbols.length();
  std::vector<char> present(std::size_t(n) * n, 0);
  for (const auto& s : tree.nodes) {
    switch (symbols.kind(s.start, s.end)) {
      case NodeKind::rejected:
        return false;
      case NodeKind::latent:
        if (!schema.is_latent(s.label)) return false;
        break;
      case NodeKind::observed: {
        const auto& labels = symbols.observed_labels(s.start, s.end);
        if (std::find(labels.begin(), labels.end(), s.label) == labels.end()) return false;
        break;
      }
    }
    present[std::size_t(s.start) * n + s.end] = 1;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (symbols.kind(i, j) == NodeKind::observed && !present[std::size_t(i) * n + j]) return false;
  return true;
}

double brute_force_log_z(const ScoreChart& chart) {
  require_length(chart.length());
  std::vector<double> weights;
  for (const auto& br : enumerate_bracketings(chart.length()))
    weights.push_back(bracketing_log_weight(chart, br, nullptr, nullptr));
  return log_sum(weights);
}

double brute_force_partial_score(const ScoreChart& chart, const SymbolTree& symbols,
                                 const LabelSchema& schema) {
  require_length(chart.length());
  if (symbols.length() != chart.length() || schema.size() != chart.labels())
    throw Error(ErrorCode::dimension_mismatch, "symbols or schema do not match chart");
  std::vector<double> weights;
  for (const auto& br : enumerate_bracketings(chart.length()))
    if (bracketing_admissible(br, symbols))
      weights.push_back(bracketing_log_weight(chart, br, &symbols, &schema));
  return log_sum(weights);
}

MarginalChart brute_force_marginals(const ScoreChart& chart) {
  return marginals_impl(chart, nullptr, nullptr);
}

MarginalChart brute_force_marginals(const ScoreChart& chart, const SymbolTree& symbols,
                                    const LabelSchema& schema) {
  return marginals_impl(chart, &symbols, &schema);
}

FullTree brute_force_best_tree(const ScoreChart& chart) {
  const int n = chart.length();
  require_length(n);
  FullTree best;
  TieKey best_key;
  double best_score = kNegInf;
  bool have = false;
  for (const auto& br : enumerate_bracketings(n)) {
    FullTree tree{n, {}};
    for (const auto& [i, j] : br) {
      int k_best = 0;
      for (int k = 1; k < chart.labels(); ++k)
        if (chart(i, j, k) > chart(i, j, k_best)) k_best = k;
      tree.nodes.push_back(Span{i, j, k_best});
    }
    const double score = tree_score(chart, tree);
    if (!have || score > best_score) {
      have = true;
      best_score = score;
      best = tree;
      best_key = tie_key(tree);
    } else if (score == best_score) {
      auto key = tie_key(tree);
      if (key < best_key) {
        best = tree;
        best_key = std::move(key);
      }
    }
  }
  return best;
}

double exhaustive_log_z(const ScoreChart& chart, const LabelSchema& schema) {
  auto trees = enumerate_full_trees(chart.length(), schema);
  std::vector<double> weights;
  weights.reserve(trees.size());
  FullTree t;
  while (trees.next(t)) {
    double total = 0.0;
    for (const auto& s : t.nodes) total += chart(s.start, s.end, s.label);
    weights.push_back(total);
  }
  return log_sum(weights);
}

double exhaustive_partial_score(const ScoreChart& chart, const SymbolTree& symbols,
                                const LabelSchema& schema) {
  auto trees = enumerate_full_trees(chart.length(), schema);
  std::vector<double> weights;
  FullTree t;
  while (trees.next(t)) {
    if (!is_compatible(t, symbols, schema)) continue;
    double total = 0.0;
    for (const auto& s : t.nodes) total += chart(s.start, s.end, s.label);
    weights.push_back(total);
  }
  return log_sum(weights);
}

std::uint64_t count_compatible(const SymbolTree& symbols, const LabelSchema& schema) {
  auto trees = enumerate_full_trees(symbols.length(), schema);
  std::uint64_t count = 0;
  FullTree t;
  while (trees.next(t))
    if (is_compatible(t, symbols, schema)) ++count;
  return count;
}

}  // namespace pocrf::oracle
