#pragma once

#include <Eigen/Dense>

namespace gna::detail {

// Elementwise logistic and tanh built on Eigen's vectorized exp. Both use
// exp(-|x|) so nothing overflows, and agree with std:: versions to a few ulp.

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using Array = Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Derived::IsRowMajor ? Eigen::RowMajor : Eigen::ColMajor>;
  const Array e = (-x.abs()).exp();
  return Array((x >= 0.0).select(1.0 / (1.0 + e), e / (1.0 + e)));
}

template <typename Derived>
auto tanh(const Eigen::ArrayBase<Derived>& x) {
  using Array = Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Derived::IsRowMajor ? Eigen::RowMajor : Eigen::ColMajor>;
  const Array a = x.abs();
  const Array e = (-2.0 * a).exp();
  const Array big = (1.0 - e) / (1.0 + e);
  // Near zero 1 - e cancels; the odd series is exact to rounding there.
  const Array a2 = a.square();
  const Array small = a * (1.0 + a2 * (-1.0 / 3.0 + a2 * (2.0 / 15.0 - a2 * (17.0 / 315.0))));
  return Array((a < 0.005).select(small, big) * x.sign());
}

}  // namespace gna::detail
