#include "wavescat/det2.hpp"

#include "wavescat/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wavescat {

namespace {

constexpr cplx I{0, 1};
constexpr int kPerPanel = 16;

void require_upper(cplx k, const char* who) {
  if (!(k.imag() > 0)) throw std::invalid_argument(std::string(who) + ": requires Im k > 0");
}

}  // namespace

cplx resolvent_kernel(cplx k, double x, double y) {
  require_upper(k, "resolvent_kernel");
  return -(std::exp(I * k * std::abs(x - y)) - std::exp(I * k * (x + y))) / (2.0 * I * k);
}

cplx fourier_hat(const Potential& q, cplx k, double tol) {
  if (q.is_zero()) return 0;
  double hi = q.support_bound();
  if (!std::isfinite(hi)) {
    if (!(k.imag() > 0) && q.decay_tag() != DecayTag::l1)
      throw std::invalid_argument("fourier_hat: q not integrable on the real axis");
    if (!(k.imag() > 0)) throw std::invalid_argument("fourier_hat: non-compact q needs Im k > 0");
    // e^{-Im k x} sup|q| below tol
    hi = std::max(1.0, std::log(std::max(q.sup_abs(0, 0), 1.0) / tol) / k.imag());
  }
  hi = std::min(hi, q.truncation());
  std::vector<double> breaks(q.breakpoints().begin(), q.breakpoints().end());
  const double piece = std::min(1.0, 2.0 / (std::abs(k) + q.local_frequency(hi) + 1e-300));
  auto r = quad::adaptive_piecewise([&](double x) { return q(x) * std::exp(I * k * x); }, 0.0, hi,
                                    breaks, {tol * 1e-2, tol}, piece);
  return r.value;
}

KernelMatrix kernel_matrix(const Potential& q, cplx k, double R, int n) {
  require_upper(k, "kernel_matrix");
  if (n < 1) throw std::invalid_argument("kernel_matrix: n must be positive");
  const double reff = q.is_zero() ? R : std::min(R, q.support_bound());
  const int panels = std::max(1, n / kPerPanel);
  std::vector<double> breaks(q.breakpoints().begin(), q.breakpoints().end());
  auto ns = quad::composite_gauss(0.0, reff, breaks, reff / panels, kPerPanel);
  KernelMatrix K{k, ns.x, ns.w, Eigen::MatrixXcd::Zero(ns.x.size(), ns.x.size())};
  if (q.is_zero()) return K;
  const Eigen::Index m = ns.x.size();
  Eigen::VectorXd qw(m);
  for (Eigen::Index j = 0; j < m; ++j) qw(j) = q(ns.x(j)) * ns.w(j);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      K.entries(i, j) = resolvent_kernel(k, ns.x(i), ns.x(j)) * qw(j);
  return K;
}

cplx det2(const KernelMatrix& K) {
  const Eigen::Index n = K.entries.rows();
  if (n == 0 || K.entries.isZero(0)) return 1;
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n) + K.entries;
  return A.partialPivLu().determinant() * std::exp(-K.entries.trace());
}

cplx det2_log_split(const KernelMatrix& K) {
  if (K.entries.rows() == 0 || K.entries.isZero(0)) return 1;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(K.entries, false);
  cplx s = 0;
  for (const cplx& l : es.eigenvalues()) s += std::log(1.0 + l) - l;
  return std::exp(s);
}

Det2Result det2_modified_jost(const Potential& q, cplx k, double R, int n,
                              const Det2Options& opt) {
  require_upper(k, "det2_modified_jost");
  if (!(R > 0)) throw std::invalid_argument("det2_modified_jost: R must be positive");
  if (n < 64) throw std::invalid_argument("det2_modified_jost: n must be at least 64");
  Det2Result out;
  if (q.is_zero()) {
    out.jm = 1;
    out.nodes_used = 0;
    return out;
  }
  const Potential qr = q.truncate(R);
  const cplx prefactor = std::exp(fourier_hat(qr, 2.0 * k) / (2.0 * I * k));
  auto raw = [&](int nodes) { return det2(kernel_matrix(qr, k, R, nodes)); };

  // values at n, 2n, 4n, ...; first-level extrapolants r1 and second-level r2
  std::vector<cplx> v{raw(n), raw(2 * n)};
  std::vector<cplx> r1{(4.0 * v[1] - v[0]) / 3.0};
  std::vector<cplx> r2;
  int nodes = 2 * n;
  while (true) {
    nodes *= 2;
    v.push_back(raw(nodes));
    r1.push_back((4.0 * v.back() - v[v.size() - 2]) / 3.0);
    r2.push_back((16.0 * r1.back() - r1[r1.size() - 2]) / 15.0);
    out.nodes_used = nodes;
    if (r2.size() >= 2) {
      out.doubling_gap = std::abs(prefactor) * std::abs(r2.back() - r2[r2.size() - 2]);
    } else {
      out.doubling_gap = std::abs(prefactor) * std::abs(r2.back() - r1.back());
    }
    if (out.doubling_gap <= opt.gap_tol) break;
    if (2 * nodes > opt.max_nodes) {
      out.converged = false;
      break;
    }
  }
  out.jm = prefactor * r2.back();
  return out;
}

}  // namespace wavescat
