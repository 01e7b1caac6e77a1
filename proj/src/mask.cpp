#include "pocrf/mask.hpp"

#include <algorithm>

namespace pocrf {

void SymbolTree::add_observed_label(int i, int j, int label) {
  auto& labels = observed_[index(i, j)];
  if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
    labels.push_back(label);
    std::sort(labels.begin(), labels.end());
  }
  kinds_[index(i, j)] = NodeKind::observed;
}

SymbolTree symbols_from_spans(int n, const std::vector<Span>& nodes) {
  SymbolTree symbols(n);
  for_each_cell(n, [&](int i, int j) {
    for (const auto& s : nodes) {
      if (crosses(i, j, s.start, s.end)) {
        symbols.set_kind(i, j, NodeKind::rejected);
        return;
      }
    }
  });
  for (const auto& s : nodes) symbols.add_observed_label(s.start, s.end, s.label);
  return symbols;
}

SymbolTree classify_nodes(const PartialTree& tree) {
  return symbols_from_spans(tree.n, tree.entities);
}

ChartMask build_mask(const SymbolTree& symbols, const LabelSchema& schema) {
  const int n = symbols.length();
  ChartMask mask(n, schema.size(), 0.0);
  for_each_cell(n, [&](int i, int j) {
    switch (symbols.kind(i, j)) {
      case NodeKind::observed:
        for (int k : symbols.observed_labels(i, j)) mask(i, j, k) = 1.0;
        break;
      case NodeKind::latent:
        for (int k = schema.observed_count(); k < schema.size(); ++k) mask(i, j, k) = 1.0;
        break;
      case NodeKind::rejected:
        break;
    }
  });
  return mask;
}

ChartMask smooth_mask(const ChartMask& mask, const SymbolTree& symbols, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw Error(ErrorCode::bad_config, "smoothing epsilon must lie in [0, 1)");
  if (mask.length() != symbols.length())
    throw Error(ErrorCode::dimension_mismatch, "mask and symbol tree lengths differ");
  ChartMask out = mask;
  for_each_cell(mask.length(), [&](int i, int j) {
    if (symbols.kind(i, j) == NodeKind::rejected) out.weights.cell(i, j).setConstant(epsilon);
  });
  return out;
}

}  // namespace pocrf
