#ifndef POCRF_MASK_HPP
#define POCRF_MASK_HPP

#include <vector>

#include "pocrf/annotation.hpp"
#include "pocrf/chart.hpp"
#include "pocrf/label_schema.hpp"

namespace pocrf {

enum class NodeKind : unsigned char { latent, observed, rejected };

// Per-span node classification of a partial tree.
class SymbolTree {
 public:
  SymbolTree() = default;
  explicit SymbolTree(int n)
      : n_(n), kinds_(std::size_t(n) * n, NodeKind::latent), observed_(std::size_t(n) * n) {}

  int length() const { return n_; }
  NodeKind kind(int i, int j) const { return kinds_[index(i, j)]; }
  void set_kind(int i, int j, NodeKind k) { kinds_[index(i, j)] = k; }

  // Observed label indices annotated at (i, j); empty unless kind is observed.
  const std::vector<int>& observed_labels(int i, int j) const { return observed_[index(i, j)]; }
  void add_observed_label(int i, int j, int label);

  bool operator==(const SymbolTree&) const = default;

 private:
  std::size_t index(int i, int j) const { return std::size_t(i) * n_ + j; }

  int n_ = 0;
  std::vector<NodeKind> kinds_;
  std::vector<std::vector<int>> observed_;
};

SymbolTree classify_nodes(const PartialTree& tree);

// Observed cells keep their annotated labels, latent cells keep every
// latent label, rejected cells keep nothing.
ChartMask build_mask(const SymbolTree& symbols, const LabelSchema& schema);

// Rejected cells become epsilon everywhere; nothing else changes.
ChartMask smooth_mask(const ChartMask& mask, const SymbolTree& symbols, double epsilon);

// Symbol tree in which the spans of a full bracketing are observed and
// every span crossing it is rejected.
SymbolTree symbols_from_spans(int n, const std::vector<Span>& nodes);

}  // namespace pocrf

#endif  // POCRF_MASK_HPP
