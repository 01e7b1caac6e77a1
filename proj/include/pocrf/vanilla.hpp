#ifndef POCRF_VANILLA_HPP
#define POCRF_VANILLA_HPP

#include <Eigen/Core>

#include <vector>

#include "pocrf/chart.hpp"
#include "pocrf/inside.hpp"
#include "pocrf/label_schema.hpp"
#include "pocrf/log_semiring.hpp"
#include "pocrf/mask.hpp"

namespace pocrf {

// Partial marginalization by per-cell branching: observed cells evaluate
// their annotated labels, latent cells sum over latent labels only, and
// rejected cells are excluded outright (-inf, no log-zero stand-in).
// Processes one sentence at a time.
template <typename Scalar>
Scalar vanilla_partial_marginalization(const Chart3<Scalar>& scores, const SymbolTree& symbols,
                                       const LabelSchema& schema) {
  const int n = scores.length();
  if (n <= 0) throw Error(ErrorCode::degenerate_chart, "chart has no tokens");
  if (symbols.length() != n || scores.labels() != schema.size())
    throw Error(ErrorCode::dimension_mismatch, "symbol tree or schema does not match chart");

  const int observed = schema.observed_count();
  const int total = schema.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> beta =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, neg_inf<Scalar>());
  std::vector<Scalar> picked;
  picked.reserve(total);

  for (int width = 0; width < n; ++width) {
    for (int i = 0; i + width < n; ++i) {
      const int j = i + width;
      Scalar node = neg_inf<Scalar>();
      switch (symbols.kind(i, j)) {
        case NodeKind::rejected:
          continue;
        case NodeKind::observed: {
          picked.clear();
          for (int k : symbols.observed_labels(i, j)) picked.push_back(scores(i, j, k));
          node = logsumexp(Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
              picked.data(), Eigen::Index(picked.size())));
          break;
        }
        case NodeKind::latent:
          node = logsumexp(scores.cell(i, j).segment(observed, total - observed));
          break;
      }
      if (width == 0) {
        beta(i, j) = node;
        continue;
      }
      Scalar acc = neg_inf<Scalar>();
      for (int m = i; m < j; ++m) {
        const Scalar left = beta(i, m);
        const Scalar right = beta(m + 1, j);
        if (left == neg_inf<Scalar>() || right == neg_inf<Scalar>()) continue;
        acc = log_add(acc, left + right);
      }
      if (acc != neg_inf<Scalar>()) beta(i, j) = node + acc;
    }
  }
  return beta(0, n - 1);
}

}  // namespace pocrf

#endif  // POCRF_VANILLA_HPP
