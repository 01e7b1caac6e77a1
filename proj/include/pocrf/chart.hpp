#ifndef POCRF_CHART_HPP
#define POCRF_CHART_HPP

#include <Eigen/Core>

#include <cassert>
#include <compare>

#include "pocrf/error.hpp"

namespace pocrf {

// Span over tokens, 0-based and end-inclusive.
struct Span {
  int start = 0;
  int end = 0;
  int label = 0;

  auto operator<=>(const Span&) const = default;
};

// Two spans cross when they overlap without one containing the other.
inline bool crosses(int a, int b, int c, int d) {
  return (a < c && c <= b && b < d) || (c < a && a <= d && d < b);
}

// Dense n x n x L chart. Cell (i, j) is one row of an (n*n) x L row-major
// array, so the labels of a span are contiguous. Only i <= j is meaningful.
template <typename Scalar>
class Chart3 {
 public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Chart3() = default;
  Chart3(int n, int labels, Scalar fill = Scalar(0))
      : n_(n), labels_(labels), data_(Storage::Constant(Eigen::Index(n) * n, labels, fill)) {}

  int length() const { return n_; }
  int labels() const { return labels_; }

  Scalar& operator()(int i, int j, int k) {
    assert(i >= 0 && j < n_ && k < labels_);
    return data_(Eigen::Index(i) * n_ + j, k);
  }
  Scalar operator()(int i, int j, int k) const {
    assert(i >= 0 && j < n_ && k < labels_);
    return data_(Eigen::Index(i) * n_ + j, k);
  }

  auto cell(int i, int j) { return data_.row(Eigen::Index(i) * n_ + j); }
  auto cell(int i, int j) const { return data_.row(Eigen::Index(i) * n_ + j); }

  // Contiguous labels of cell (i, j).
  const Scalar* cell_data(int i, int j) const { return data_.data() + (Eigen::Index(i) * n_ + j) * labels_; }

  Storage& data() { return data_; }
  const Storage& data() const { return data_; }

  bool same_shape(const Chart3& other) const {
    return n_ == other.n_ && labels_ == other.labels_;
  }

  template <typename Other>
  Chart3<Other> cast() const {
    Chart3<Other> out(n_, labels_);
    out.data() = data_.template cast<Other>();
    return out;
  }

 private:
  int n_ = 0;
  int labels_ = 0;
  Storage data_;
};

template <typename Scalar>
using ScoreChartT = Chart3<Scalar>;
using ScoreChart = Chart3<double>;
using MarginalChart = Chart3<double>;

// Mask weights in [0, 1], kept distinct from score charts at the type level.
struct ChartMask {
  Chart3<double> weights;

  ChartMask() = default;
  explicit ChartMask(Chart3<double> w) : weights(std::move(w)) {}
  ChartMask(int n, int labels, double fill = 0.0) : weights(n, labels, fill) {}

  int length() const { return weights.length(); }
  int labels() const { return weights.labels(); }
  double operator()(int i, int j, int k) const { return weights(i, j, k); }
  double& operator()(int i, int j, int k) { return weights(i, j, k); }

  static ChartMask all_ones(int n, int labels) { return ChartMask(n, labels, 1.0); }
};

template <typename Scalar>
void require_same_shape(const Chart3<Scalar>& chart, const ChartMask& mask) {
  if (chart.length() != mask.length() || chart.labels() != mask.labels())
    throw Error(ErrorCode::dimension_mismatch, "mask shape does not match chart");
}

// Visits every upper-triangular cell (i <= j) in row-major order.
template <typename Fn>
void for_each_cell(int n, Fn&& fn) {
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) fn(i, j);
}

}  // namespace pocrf

#endif  // POCRF_CHART_HPP
