#pragma once

#include <Eigen/Dense>

#include <complex>

namespace wavescat::cheb {

/// Chebyshev-Lobatto collocation on [-1, 1] with m+1 ascending nodes.
///
/// `backward` maps samples f(x_j) to the integrals of the interpolant from
/// x_i up to the right end +1, so (backward * f)(m) == 0 and row 0 holds the
/// full-interval weights.
struct Lobatto {
  int m = 0;
  Eigen::VectorXd nodes;
  Eigen::MatrixXd backward;
  Eigen::VectorXd bary;  // barycentric weights

  explicit Lobatto(int m);

  Eigen::VectorXd weights() const { return backward.row(0).transpose(); }

  /// Interpolate samples given at the nodes at s in [-1, 1].
  template <typename Vec>
  typename Vec::Scalar interpolate(const Vec& values, double s) const {
    using S = typename Vec::Scalar;
    S num{0};
    double den = 0;
    for (int j = 0; j <= m; ++j) {
      const double d = s - nodes(j);
      if (d == 0) return values(j);
      const double c = bary(j) / d;
      num += c * values(j);
      den += c;
    }
    return num / den;
  }
};

/// Shared instance for the given order.
const Lobatto& lobatto(int m);

}  // namespace wavescat::cheb
