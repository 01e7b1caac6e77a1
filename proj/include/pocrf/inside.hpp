#ifndef POCRF_INSIDE_HPP
#define POCRF_INSIDE_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

#include "pocrf/chart.hpp"
#include "pocrf/log_semiring.hpp"

namespace pocrf {

// Stand-in for log(0) when a mask is folded into the scores.
inline constexpr double kLogZero = -1e6;

struct InsideOptions {
  double log_zero = kLogZero;
  // Test-only fault: subtracts the split term instead of adding it.
  bool flip_split_sign = false;
};

// Log inside scores plus the two per-cell factors they are built from:
// beta(i, j) = node(i, j) + split(i, j), with split(i, i) = 0.
template <typename Scalar>
struct InsideChartT {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix beta;
  Matrix node;
  Matrix split;

  int length() const { return static_cast<int>(beta.rows()); }
  Scalar log_partition() const { return beta(0, length() - 1); }
};

using InsideChart = InsideChartT<double>;

namespace detail {

// log sum_m exp(term(m)) for m in [lo, hi), max-shifted, fixed order.
template <typename Scalar, typename Term>
Scalar split_logsumexp(int lo, int hi, Term&& term) {
  Scalar mx = neg_inf<Scalar>();
  for (int m = lo; m < hi; ++m) mx = std::max(mx, term(m));
  if (mx == neg_inf<Scalar>()) return mx;
  // Below this gap exp() rounds to exactly zero, so skipping the call
  // leaves the sum unchanged.
  static const Scalar underflow = std::log(std::numeric_limits<Scalar>::denorm_min()) - Scalar(2);
  Scalar sum = 0;
  for (int m = lo; m < hi; ++m) {
    const Scalar gap = term(m) - mx;
    if (gap > underflow) sum += std::exp(gap);
  }
  return mx + std::log(sum);
}

// log of a mask weight, with log 0 replaced by log_zero.
inline double log_weight(double w, double log_zero) {
  if (w == 1.0) return 0.0;
  return w > 0.0 ? std::log(w) : log_zero;
}

// Log-sum-exp over a contiguous run; shared by every inside variant so
// they agree bit for bit.
template <typename Scalar>
Scalar lse_contiguous(const Scalar* x, int len) {
  return split_logsumexp<Scalar>(0, len, [x](int k) { return x[k]; });
}

}  // namespace detail

// s + log M, with log 0 replaced by options.log_zero. Lower-triangular
// cells are copied through untouched.
template <typename Scalar>
Chart3<Scalar> apply_log_mask(const Chart3<Scalar>& scores, const ChartMask& mask,
                              const InsideOptions& options = {}) {
  require_same_shape(scores, mask);
  Chart3<Scalar> out = scores;
  for_each_cell(scores.length(), [&](int i, int j) {
    for (int k = 0; k < scores.labels(); ++k) {
      out(i, j, k) = scores(i, j, k) + Scalar(detail::log_weight(mask(i, j, k), options.log_zero));
    }
  });
  return out;
}

// Inside pass over all full labeled binary trees. Labels factor out of the
// split sum because every node picks its label independently.
template <typename Scalar>
InsideChartT<Scalar> inside_chart(const Chart3<Scalar>& scores, const InsideOptions& options = {}) {
  const int n = scores.length();
  if (n <= 0) throw Error(ErrorCode::degenerate_chart, "chart has no tokens");
  if (scores.labels() <= 0) throw Error(ErrorCode::degenerate_chart, "chart has no labels");

  InsideChartT<Scalar> out;
  out.beta.setConstant(n, n, neg_inf<Scalar>());
  out.node.setConstant(n, n, neg_inf<Scalar>());
  out.split.setZero(n, n);
  for (int width = 0; width < n; ++width) {
    for (int i = 0; i + width < n; ++i) {
      const int j = i + width;
      const Scalar node = detail::lse_contiguous(scores.cell_data(i, j), scores.labels());
      out.node(i, j) = node;
      if (width == 0) {
        out.beta(i, j) = node;
        continue;
      }
      const Scalar split = detail::split_logsumexp<Scalar>(
          i, j, [&](int m) { return out.beta(i, m) + out.beta(m + 1, j); });
      out.split(i, j) = split;
      out.beta(i, j) = options.flip_split_sign ? node - split : node + split;
    }
  }
  return out;
}

// log Z over all full labeled binary trees.
template <typename Scalar>
Scalar inside(const Chart3<Scalar>& scores, const InsideOptions& options = {}) {
  return inside_chart(scores, options).log_partition();
}

// Partial score s(T): log-sum over full trees compatible with the mask,
// computed as inside(s + log M).
template <typename Scalar>
Scalar masked_inside(const Chart3<Scalar>& scores, const ChartMask& mask,
                     const InsideOptions& options = {}) {
  return inside(apply_log_mask(scores, mask, options), options);
}

// log p(T | x) = s(T) - log Z.
template <typename Scalar>
Scalar log_prob(const Chart3<Scalar>& scores, const ChartMask& mask,
                const InsideOptions& options = {}) {
  return masked_inside(scores, mask, options) - inside(scores, options);
}

}  // namespace pocrf

#endif  // POCRF_INSIDE_HPP
