#ifndef POCRF_ORACLE_HPP
#define POCRF_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "pocrf/chart.hpp"
#include "pocrf/decode.hpp"
#include "pocrf/label_schema.hpp"
#include "pocrf/mask.hpp"

// Reference implementations by exhaustive enumeration. Nothing here shares
// code with the dynamic programs it is used to check.
namespace pocrf::oracle {

inline constexpr int kMaxLength = 8;
inline constexpr std::uint64_t kMaxTrees = 10'000'000;

std::uint64_t catalan(int k);

// Preorder node spans of one unlabeled bracketing.
using Bracketing = std::vector<std::pair<int, int>>;

// Every binary bracketing of n tokens, split points in increasing order
// from the root down. Requires 1 <= n <= kMaxLength.
std::vector<Bracketing> enumerate_bracketings(int n);

// Lazy cursor over every full labeled tree: bracketings in canonical order,
// each with its labelings in odometer order over preorder nodes (the last
// node varies fastest). Single-threaded use only.
class TreeEnumeration {
 public:
  TreeEnumeration(int n, int label_count);

  int length() const { return n_; }
  std::uint64_t size() const;
  bool next(FullTree& out);

 private:
  int n_;
  int labels_;
  std::vector<Bracketing> bracketings_;
  std::size_t current_ = 0;
  std::vector<int> odometer_;
  bool started_ = false;
};

// Throws TooLarge past kMaxLength or kMaxTrees trees.
TreeEnumeration enumerate_full_trees(int n, const LabelSchema& schema);

// A full tree is compatible when every observed span is present with one of
// its annotated labels, every other node carries a latent label, and no
// node sits on a rejected span.
bool is_compatible(const FullTree& tree, const SymbolTree& symbols, const LabelSchema& schema);

// Labels are summed (or maximized) node by node inside each bracketing,
// which is exact because a node's label does not affect any other node;
// bracketings are enumerated exhaustively. This keeps n = 6, |L| = 4 cheap.
double brute_force_log_z(const ScoreChart& chart);
double brute_force_partial_score(const ScoreChart& chart, const SymbolTree& symbols,
                                 const LabelSchema& schema);
MarginalChart brute_force_marginals(const ScoreChart& chart);
MarginalChart brute_force_marginals(const ScoreChart& chart, const SymbolTree& symbols,
                                    const LabelSchema& schema);
// Same tie-break as cky_decode: among equal scores, the lexicographically
// smallest preorder sequence of (label, split point).
FullTree brute_force_best_tree(const ScoreChart& chart);

// Fully labeled enumeration, subject to the kMaxTrees guard.
double exhaustive_log_z(const ScoreChart& chart, const LabelSchema& schema);
double exhaustive_partial_score(const ScoreChart& chart, const SymbolTree& symbols,
                                const LabelSchema& schema);
std::uint64_t count_compatible(const SymbolTree& symbols, const LabelSchema& schema);

}  // namespace pocrf::oracle

#endif  // POCRF_ORACLE_HPP
