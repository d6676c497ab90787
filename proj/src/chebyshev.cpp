#include "wavescat/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace wavescat::cheb {

namespace {

// Integral of T_n from s to 1.
double chebyshev_tail_integral(int n, double s) {
  auto antiderivative = [n](double x) {
    const double t = std::acos(std::clamp(x, -1.0, 1.0));
    if (n == 0) return x;
    if (n == 1) return 0.5 * x * x;
    return 0.5 * (std::cos((n + 1) * t) / (n + 1) - std::cos((n - 1) * t) / (n - 1));
  };
  return antiderivative(1.0) - antiderivative(s);
}

}  // namespace

Lobatto::Lobatto(int order) : m(order), nodes(order + 1), bary(order + 1) {
  for (int j = 0; j <= m; ++j) {
    nodes(j) = -std::cos(std::numbers::pi * j / m);
    bary(j) = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == m) ? 0.5 : 1.0);
  }
  // samples -> Chebyshev coefficients via V^{-1}, then exact tail integrals
  Eigen::MatrixXd vandermonde(m + 1, m + 1), tails(m + 1, m + 1);
  for (int i = 0; i <= m; ++i) {
    const double t = std::acos(std::clamp(nodes(i), -1.0, 1.0));
    for (int n = 0; n <= m; ++n) {
      vandermonde(i, n) = std::cos(n * t);
      tails(i, n) = chebyshev_tail_integral(n, nodes(i));
    }
  }
  backward = tails * vandermonde.partialPivLu().inverse();
  backward.row(m).setZero();
}

const Lobatto& lobatto(int m) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Lobatto>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<Lobatto>(m);
  return *slot;
}

}  // namespace wavescat::cheb
