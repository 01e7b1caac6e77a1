#ifndef POCRF_BATCHED_HPP
#define POCRF_BATCHED_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pocrf/chart.hpp"
#include "pocrf/inside.hpp"
#include "pocrf/parallel.hpp"

namespace pocrf {

// Masked inside over a whole batch, one span-width diagonal at a time
// across all sentences. Sentences are padded to the longest length; padded
// cells score log_zero and each sentence reads its own root cell.
// Inside scores are kept twice (row-major and column-major) so the split
// sum walks contiguous memory on both sides. Threads take contiguous
// blocks of sentences; per-cell arithmetic matches masked_inside exactly,
// so the result does not depend on the thread count.
template <typename Scalar>
std::vector<Scalar> batched_masked_inside(std::span<const Chart3<Scalar>> scores,
                                          std::span<const ChartMask> masks, int threads = 1,
                                          const InsideOptions& options = {}) {
  if (scores.size() != masks.size())
    throw Error(ErrorCode::dimension_mismatch, "batch has different numbers of charts and masks");
  const int batch = static_cast<int>(scores.size());
  int N = 0;
  int labels = 0;
  for (int b = 0; b < batch; ++b) {
    require_same_shape(scores[b], masks[b]);
    if (scores[b].length() <= 0) throw Error(ErrorCode::degenerate_chart, "chart has no tokens");
    if (b == 0) labels = scores[b].labels();
    if (scores[b].labels() != labels)
      throw Error(ErrorCode::dimension_mismatch, "label counts differ within batch");
    N = std::max(N, scores[b].length());
  }
  const std::size_t plane = std::size_t(N) * N;
  std::vector<Scalar> result(batch);

  parallel_chunks(batch, threads, [&](int b0, int b1) {
    const int count = b1 - b0;
    std::vector<Scalar> node(plane * count);
    std::vector<Scalar> by_row(plane * count, neg_inf<Scalar>());
    std::vector<Scalar> by_col(plane * count, neg_inf<Scalar>());
    std::vector<Scalar> masked(labels);

    for (int b = 0; b < count; ++b) {
      const auto& s = scores[b0 + b];
      const auto& m = masks[b0 + b];
      const int n = s.length();
      for (int i = 0; i < N; ++i) {
        for (int j = i; j < N; ++j) {
          for (int k = 0; k < labels; ++k)
            masked[k] = j < n ? s(i, j, k) + Scalar(detail::log_weight(m(i, j, k), options.log_zero))
                              : Scalar(options.log_zero);
          node[b * plane + std::size_t(i) * N + j] = detail::lse_contiguous(masked.data(), labels);
        }
      }
    }

    for (int width = 0; width < N; ++width) {
      for (int b = 0; b < count; ++b) {
        Scalar* row = by_row.data() + b * plane;
        Scalar* col = by_col.data() + b * plane;
        const Scalar* nd = node.data() + b * plane;
        for (int i = 0; i + width < N; ++i) {
          const int j = i + width;
          Scalar beta = nd[std::size_t(i) * N + j];
          if (width > 0) {
            const Scalar* left = row + std::size_t(i) * N;
            const Scalar* right = col + std::size_t(j) * N + 1;
            const Scalar split = detail::split_logsumexp<Scalar>(
                i, j, [&](int m) { return left[m] + right[m]; });
            beta = options.flip_split_sign ? beta - split : beta + split;
          }
          row[std::size_t(i) * N + j] = beta;
          col[std::size_t(j) * N + i] = beta;
        }
      }
    }

    for (int b = 0; b < count; ++b)
      result[b0 + b] = by_row[b * plane + (scores[b0 + b].length() - 1)];
  });
  return result;
}

}  // namespace pocrf

#endif  // POCRF_BATCHED_HPP
