#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace wavescat::quad {

template <typename Real>
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Gauss-Legendre rule on [-1, 1].
template <typename Real>
struct GaussRule {
  Vector<Real> nodes;
  Vector<Real> weights;
};

/// Newton iteration on the Legendre three-term recurrence; nodes ascending.
template <typename Real>
GaussRule<Real> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussRule<Real> rule{Vector<Real>(n), Vector<Real>(n)};
  const Real pi = std::numbers::pi_v<Real>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = std::cos(pi * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const Real p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 4 * std::numeric_limits<Real>::epsilon()) break;
    }
    {
      // refresh derivative at the converged node
      Real p0 = 1, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const Real p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    const Real w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0;
  return rule;
}

/// Cached 15-point rule used by the adaptive integrator.
const GaussRule<double>& gl15();

/// Cached n-point rule (thread-safe, built on first use).
const GaussRule<double>& gauss(int n);

/// Apply a rule on [a, b].
template <typename F>
auto apply_rule(const GaussRule<double>& rule, F&& f, double a, double b) {
  using R = std::decay_t<decltype(f(a))>;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  R sum{};
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights(i) * f(mid + half * rule.nodes(i));
  return R(sum * half);
}

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 60;
};

namespace detail {
template <typename F, typename R>
R adaptive_step(F& f, double a, double b, R whole, const AdaptiveOptions& opt,
                int depth, double abs_tol, bool& ok) {
  const double m = 0.5 * (a + b);
  const R left = apply_rule(gl15(), f, a, m);
  const R right = apply_rule(gl15(), f, m, b);
  const R both = left + right;
  const double err = std::abs(both - whole);
  if (err <= std::max(abs_tol, opt.rel_tol * std::abs(both))) return both;
  if (depth >= opt.max_depth || m <= a || m >= b) {
    ok = false;
    return both;
  }
  return adaptive_step(f, a, m, left, opt, depth + 1, 0.5 * abs_tol, ok) +
         adaptive_step(f, m, b, right, opt, depth + 1, 0.5 * abs_tol, ok);
}
}  // namespace detail

/// Result of an adaptive integration; `converged` is false when the depth
/// limit was reached somewhere.
template <typename R>
struct Integral {
  R value{};
  bool converged = true;
};

/// Adaptive composite Gauss-Legendre: a 15-point panel is accepted when it
/// agrees with the sum over its two halves.
template <typename F>
auto adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  using R = std::decay_t<decltype(f(a))>;
  Integral<R> out;
  if (a == b) return out;
  if (b < a) {
    auto r = adaptive(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  bool ok = true;
  const R whole = apply_rule(gl15(), f, a, b);
  out.value = detail::adaptive_step(f, a, b, whole, opt, 0, opt.abs_tol, ok);
  out.converged = ok;
  return out;
}

/// Adaptive integration over [a, b] split at the given interior points.
template <typename F>
auto adaptive_piecewise(F&& f, double a, double b, std::span<const double> breaks,
                        const AdaptiveOptions& opt = {}, double max_piece = 0) {
  using R = std::decay_t<decltype(f(a))>;
  Integral<R> out;
  if (a == b) return out;
  const double sign = b < a ? -1.0 : 1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> edges{lo};
  for (double x : breaks)
    if (x > lo && x < hi) edges.push_back(x);
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double x0 = edges[i];
    const double x1 = edges[i + 1];
    const int pieces =
        max_piece > 0 ? std::max(1, int(std::ceil((x1 - x0) / max_piece))) : 1;
    const double h = (x1 - x0) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double s0 = x0 + p * h, s1 = (p + 1 == pieces) ? x1 : x0 + (p + 1) * h;
      auto r = adaptive(f, s0, s1, opt);
      out.value += r.value;
      out.converged = out.converged && r.converged;
    }
  }
  out.value = R(out.value * sign);
  return out;
}

/// Nodes and weights of a composite rule.
struct NodeSet {
  Eigen::VectorXd x;
  Eigen::VectorXd w;
};

/// Composite Gauss-Legendre on [a,b]: the interval is cut at `breaks` and
/// each piece into panels no wider than `max_panel`, `per_panel` nodes each.
NodeSet composite_gauss(double a, double b, std::span<const double> breaks,
                        double max_panel, int per_panel);

}  // namespace wavescat::quad
