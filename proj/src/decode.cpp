#include "pocrf/decode.hpp"

#include <algorithm>

namespace pocrf {
namespace {

bool check_subtree(const std::vector<Span>& nodes, std::size_t& pos, int i, int j) {
  if (pos >= nodes.size()) return false;
  const Span node = nodes[pos++];
  if (node.start != i || node.end != j || node.label < 0) return false;
  if (i == j) return true;
  if (pos >= nodes.size()) return false;
  const int m = nodes[pos].end;
  if (m < i || m >= j) return false;
  return check_subtree(nodes, pos, i, m) && check_subtree(nodes, pos, m + 1, j);
}

}  // namespace

bool is_valid_full_tree(const FullTree& tree) {
  if (tree.n <= 0 || tree.nodes.size() != 2 * std::size_t(tree.n) - 1) return false;
  std::size_t pos = 0;
  return check_subtree(tree.nodes, pos, 0, tree.n - 1) && pos == tree.nodes.size();
}

std::vector<Span> extract_entities(const FullTree& tree, const LabelSchema& schema) {
  std::vector<Span> out;
  for (const auto& node : tree.nodes)
    if (schema.is_observed(node.label)) out.push_back(node);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pocrf
