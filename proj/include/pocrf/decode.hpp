#ifndef POCRF_DECODE_HPP
#define POCRF_DECODE_HPP

#include <Eigen/Core>

#include <vector>

#include "pocrf/chart.hpp"
#include "pocrf/label_schema.hpp"

namespace pocrf {

// Full binary bracketing with one label per node. Nodes are stored in
// preorder (parent, left subtree, right subtree), 2n - 1 of them.
struct FullTree {
  int n = 0;
  std::vector<Span> nodes;

  bool operator==(const FullTree&) const = default;
};

bool is_valid_full_tree(const FullTree& tree);

namespace detail {

// Sums node scores bottom-up as s(node) + (left + right), the same
// association order CKY uses, so equal trees give bit-identical totals.
template <typename Scalar>
Scalar subtree_score(const Chart3<Scalar>& scores, const std::vector<Span>& nodes, std::size_t& pos) {
  const Span node = nodes.at(pos++);
  const Scalar own = scores(node.start, node.end, node.label);
  if (node.start == node.end) return own;
  const Scalar left = subtree_score(scores, nodes, pos);
  const Scalar right = subtree_score(scores, nodes, pos);
  return own + (left + right);
}

}  // namespace detail

template <typename Scalar>
Scalar tree_score(const Chart3<Scalar>& scores, const FullTree& tree) {
  if (tree.n != scores.length())
    throw Error(ErrorCode::dimension_mismatch, "tree length does not match chart");
  std::size_t pos = 0;
  return detail::subtree_score(scores, tree.nodes, pos);
}

// Highest-scoring full tree. Ties go to the lowest label index, then the
// lowest split point.
template <typename Scalar>
FullTree cky_decode(const Chart3<Scalar>& scores) {
  const int n = scores.length();
  if (n <= 0) throw Error(ErrorCode::degenerate_chart, "chart has no tokens");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> best(n, n);
  Eigen::MatrixXi label(n, n);
  Eigen::MatrixXi split(n, n);

  for (int width = 0; width < n; ++width) {
    for (int i = 0; i + width < n; ++i) {
      const int j = i + width;
      int k_best = 0;
      for (int k = 1; k < scores.labels(); ++k)
        if (scores(i, j, k) > scores(i, j, k_best)) k_best = k;
      label(i, j) = k_best;
      const Scalar own = scores(i, j, k_best);
      if (width == 0) {
        best(i, j) = own;
        continue;
      }
      int m_best = i;
      Scalar s_best = best(i, i) + best(i + 1, j);
      for (int m = i + 1; m < j; ++m) {
        const Scalar s = best(i, m) + best(m + 1, j);
        if (s > s_best) {
          s_best = s;
          m_best = m;
        }
      }
      split(i, j) = m_best;
      best(i, j) = own + s_best;
    }
  }

  FullTree tree{n, {}};
  tree.nodes.reserve(2 * std::size_t(n) - 1);
  std::vector<std::pair<int, int>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    tree.nodes.push_back(Span{i, j, label(i, j)});
    if (i == j) continue;
    const int m = split(i, j);
    stack.emplace_back(m + 1, j);
    stack.emplace_back(i, m);
  }
  return tree;
}

// Nodes carrying observed labels, sorted by (start, end, label).
std::vector<Span> extract_entities(const FullTree& tree, const LabelSchema& schema);

}  // namespace pocrf

#endif  // POCRF_DECODE_HPP
