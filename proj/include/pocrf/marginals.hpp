#ifndef POCRF_MARGINALS_HPP
#define POCRF_MARGINALS_HPP

#include <cmath>

#include "pocrf/chart.hpp"
#include "pocrf/inside.hpp"

namespace pocrf {

// Posterior span-label probabilities mu(i, j, k) = d log Z / d s(i, j, k).
// The outside pass runs top-down in probability space: the root is present
// with probability 1 and each span hands its mass to its split children in
// proportion to exp(beta(i, m) + beta(m + 1, j) - split(i, j)).
template <typename Scalar>
Chart3<Scalar> marginals_from_inside(const Chart3<Scalar>& scores, const InsideChartT<Scalar>& in) {
  const int n = scores.length();
  const int labels = scores.labels();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> span_prob =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  span_prob(0, n - 1) = 1;
  for (int width = n - 1; width > 0; --width) {
    for (int i = 0; i + width < n; ++i) {
      const int j = i + width;
      const Scalar p = span_prob(i, j);
      if (p == 0) continue;
      for (int m = i; m < j; ++m) {
        const Scalar w = p * std::exp(in.beta(i, m) + in.beta(m + 1, j) - in.split(i, j));
        span_prob(i, m) += w;
        span_prob(m + 1, j) += w;
      }
    }
  }

  Chart3<Scalar> mu(n, labels, Scalar(0));
  for_each_cell(n, [&](int i, int j) {
    const Scalar p = span_prob(i, j);
    if (p == 0) return;
    mu.cell(i, j) = p * (scores.cell(i, j) - in.node(i, j)).exp();
  });
  return mu;
}

template <typename Scalar>
Chart3<Scalar> marginals(const Chart3<Scalar>& scores, const InsideOptions& options = {}) {
  return marginals_from_inside(scores, inside_chart(scores, options));
}

// Posteriors of the mask-constrained distribution (gradient of the partial
// score with respect to the unmasked scores).
template <typename Scalar>
Chart3<Scalar> marginals(const Chart3<Scalar>& scores, const ChartMask& mask,
                         const InsideOptions& options = {}) {
  const Chart3<Scalar> masked = apply_log_mask(scores, mask, options);
  return marginals_from_inside(masked, inside_chart(masked, options));
}

template <typename Scalar>
struct LossAndGradient {
  Scalar loss = 0;
  Chart3<Scalar> grad;
};

// loss = log Z - s(T); grad = mu_unmasked - mu_masked.
template <typename Scalar>
LossAndGradient<Scalar> loss_and_score_gradient(const Chart3<Scalar>& scores, const ChartMask& mask,
                                                const InsideOptions& options = {}) {
  const InsideChartT<Scalar> full = inside_chart(scores, options);
  const Chart3<Scalar> masked_scores = apply_log_mask(scores, mask, options);
  const InsideChartT<Scalar> partial = inside_chart(masked_scores, options);

  LossAndGradient<Scalar> out;
  out.loss = full.log_partition() - partial.log_partition();
  out.grad = marginals_from_inside(scores, full);
  out.grad.data() -= marginals_from_inside(masked_scores, partial).data();
  return out;
}

}  // namespace pocrf

#endif  // POCRF_MARGINALS_HPP
