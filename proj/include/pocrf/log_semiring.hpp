#ifndef POCRF_LOG_SEMIRING_HPP
#define POCRF_LOG_SEMIRING_HPP

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace pocrf {

template <typename Scalar>
constexpr Scalar neg_inf() {
  return -std::numeric_limits<Scalar>::infinity();
}

// Max-shifted log-sum-exp; an empty or all -inf input gives -inf.
template <typename Derived>
typename Derived::Scalar logsumexp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) return neg_inf<Scalar>();
  const Scalar mx = x.maxCoeff();
  if (mx == neg_inf<Scalar>()) return mx;
  return mx + std::log((x.derived().array() - mx).exp().sum());
}

template <typename Scalar>
Scalar log_add(Scalar a, Scalar b) {
  if (a == neg_inf<Scalar>()) return b;
  if (b == neg_inf<Scalar>()) return a;
  const Scalar mx = a > b ? a : b;
  return mx + std::log1p(std::exp(-(a > b ? a - b : b - a)));
}

}  // namespace pocrf

#endif  // POCRF_LOG_SEMIRING_HPP
