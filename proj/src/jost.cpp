#include "wavescat/jost.hpp"

#include "wavescat/chebyshev.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavescat {

namespace {

constexpr cplx I{0, 1};

void check_wavenumber(cplx k, const JostOptions& opt) {
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
    throw std::invalid_argument("wavenumber must be finite");
  if (k.imag() < 0) throw std::invalid_argument("wavenumber must satisfy Im k >= 0");
  if (std::abs(k) < opt.small_k_cutoff)
    throw std::invalid_argument("|k| below the small-k cutoff");
}

std::vector<double> build_panels(const Potential& q, double R, cplx k, const JostOptions& opt) {
  std::vector<double> cuts{0.0};
  for (double x : q.breakpoints())
    if (x > 0 && x < R) cuts.push_back(x);
  cuts.push_back(R);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double ak = std::abs(k);
  std::vector<double> edges{0.0};
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double x = cuts[s];
    const double hi = cuts[s + 1];
    while (x < hi) {
      const double probe = std::min(x + opt.max_panel, hi);
      double h = opt.max_panel;
      h = std::min(h, opt.phase_per_panel / (ak + q.local_frequency(probe)));
      const double sup = q.sup_abs(x, probe);
      if (sup > 0) {
        h = std::min(h, opt.panel_mass * 2 * ak / sup);
        h = std::min(h, opt.phase_per_panel / std::sqrt(sup));
      }
      if (hi - x <= 1.05 * h) {
        x = hi;
      } else if (hi - x <= 2 * h) {
        x = 0.5 * (x + hi);
      } else {
        x += h;
      }
      edges.push_back(x);
    }
  }
  return edges;
}

}  // namespace

double effective_radius(const Potential& q, double R) {
  return std::min(R, q.is_zero() ? R : std::max(q.support_bound(), 0.0));
}

JostData solve_psi(const Potential& q, cplx k, double R, const JostOptions& opt) {
  check_wavenumber(k, opt);
  if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("solve_psi: R must be positive");
  if (!(opt.tol > 0)) throw std::invalid_argument("solve_psi: tol must be positive");

  JostData d;
  d.k = k;
  d.R = R;
  const double reff = q.is_zero() ? R : std::min(R, q.support_bound());
  const auto& cheb = cheb::lobatto(opt.order);
  const int n = cheb.m + 1;
  d.nodes_per_panel = n;

  if (q.is_zero() || reff <= 0) {
    d.panel_edges = {0.0, R};
    for (int j = 0; j < n; ++j) {
      d.grid.push_back(0.5 * R * (1 + cheb.nodes(j)));
      d.psi1.push_back(1.0);
      d.psi2.push_back(0.0);
      d.chi.push_back(0.0);
      d.z1.push_back(1.0);
      d.phi.push_back(0.0);
    }
    d.phi0 = 0;
    d.jm = d.j = d.a = d.am = 1;
    d.b = 0;
    d.jprime0 = I * k;
    return d;
  }

  d.panel_edges = build_panels(q, reff, k, opt);
  const int panels = int(d.panel_edges.size()) - 1;
  const std::size_t total = std::size_t(panels) * n;
  d.grid.resize(total);
  d.psi1.resize(total);
  d.psi2.resize(total);
  d.chi.resize(total);
  d.z1.resize(total);
  d.phi.resize(total);

  const cplx c = I / (2.0 * k);
  const double inner_tol = std::max(1e-2 * opt.tol, 1e-15);
  const Eigen::MatrixXcd B = cheb.backward.cast<cplx>();
  Eigen::VectorXd qv(n), tv(n);
  Eigen::VectorXcd p1(n), ch(n), ploc(n), e1(n), e2(n), next(n);

  // Each panel [a, b] is solved in the Z-variables z1 = e^{i phi} psi1 and
  // zeta = e^{-2ikb} e^{-i phi} psi2, which are as smooth as j itself and
  // carry the data between panels without exponential growth.
  cplx z1_b = 1.0, zeta_b = 0.0, phi_b = 0.0;
  double worst = 0;
  for (int p = panels - 1; p >= 0; --p) {
    const double a = d.panel_edges[p], b = d.panel_edges[p + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int j = 0; j < n; ++j) {
      tv(j) = mid + half * cheb.nodes(j);
      qv(j) = q.value_within(tv(j), a, b);
    }
    tv(n - 1) = b;
    const Eigen::VectorXd qint = half * (cheb.backward * qv);
    for (int j = 0; j < n; ++j) {
      ploc(j) = qint(j) / (2.0 * k);
      const cplx arg = 2.0 * I * k * (tv(j) - b);
      e1(j) = qv(j) * std::exp(-arg);
      e2(j) = qv(j) * std::exp(arg);
    }
    const Eigen::VectorXcd qc = qv.cast<cplx>();
    p1.setConstant(z1_b);
    ch.setConstant(zeta_b);
    int it = 0;
    for (;; ++it) {
      if (it >= opt.max_iterations)
        throw NumericalError("solve_psi: Picard iteration did not converge (grid too coarse)");
      next = z1_b + c * half * (B * (qc.cwiseProduct(p1) + e1.cwiseProduct(ch))).array();
      double delta = (next - p1).cwiseAbs().maxCoeff();
      p1 = next;
      next = zeta_b - c * half * (B * (e2.cwiseProduct(p1) + qc.cwiseProduct(ch))).array();
      delta = std::max(delta, (next - ch).cwiseAbs().maxCoeff());
      ch = next;
      const double scale = 1 + std::max(p1.cwiseAbs().maxCoeff(), ch.cwiseAbs().maxCoeff());
      if (!std::isfinite(delta)) throw NumericalError("solve_psi: non-finite iterate");
      if (delta <= inner_tol * scale) {
        d.residual = std::max(d.residual, delta / scale);
        break;
      }
    }
    worst = std::max(worst, double(it + 1));
    const std::size_t off = std::size_t(p) * n;
    const cplx scale2 = std::exp(2.0 * I * k * b);
    for (int j = 0; j < n; ++j) {
      const cplx ph = phi_b + ploc(j);
      const cplx z1 = p1(j), zeta = ch(j);
      d.grid[off + j] = tv(j);
      d.chi[off + j] = zeta;
      d.z1[off + j] = z1;
      d.phi[off + j] = ph;
      d.psi1[off + j] = std::exp(-I * ph) * z1;
      d.psi2[off + j] = std::exp(I * ph) * scale2 * zeta;
    }
    z1_b = d.z1[off];
    zeta_b = d.chi[off] * std::exp(2.0 * I * k * (b - a));
    phi_b = d.phi[off];
  }
  d.iteration_count = int(worst);

  d.phi0 = phi_b;
  d.a = z1_b;
  d.b = zeta_b;  // after the last transfer zeta = z2(0)
  d.j = d.a + d.b;
  const cplx gauge = std::exp(-I * d.phi0);
  d.jm = gauge * d.j;
  d.am = gauge * d.a;
  d.jprime0 = I * k * (d.a - d.b);
  return d;
}

std::pair<cplx, cplx> JostData::solution_at(double x) const {
  const cplx ik = I * k;
  if (x < 0) {
    const cplx ep = std::exp(ik * x), em = std::exp(-ik * x);
    return {a * ep + b * em, ik * (a * ep - b * em)};
  }
  const double reff = panel_edges.back();
  if (x >= reff) {
    const cplx e = std::exp(ik * x);
    return {e, ik * e};
  }
  auto it = std::upper_bound(panel_edges.begin(), panel_edges.end(), x);
  const std::size_t p = std::size_t(it - panel_edges.begin()) - 1;
  const double pa = panel_edges[p], pb = panel_edges[p + 1];
  const double s = (2 * x - pa - pb) / (pb - pa);
  const auto& cheb = cheb::lobatto(nodes_per_panel - 1);
  const std::size_t off = p * nodes_per_panel;
  Eigen::Map<const Eigen::VectorXcd> vz1(z1.data() + off, nodes_per_panel);
  Eigen::Map<const Eigen::VectorXcd> vze(chi.data() + off, nodes_per_panel);
  const cplx w1 = std::exp(ik * x) * cheb.interpolate(vz1, s);
  const cplx w2 = std::exp(ik * (2 * pb - x)) * cheb.interpolate(vze, s);
  return {w1 + w2, ik * (w1 - w2)};
}

std::vector<std::pair<cplx, cplx>> JostData::solution_on_grid() const {
  std::vector<std::pair<cplx, cplx>> out(grid.size());
  const cplx ik = I * k;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t p = i / nodes_per_panel;
    const double pb = panel_edges[p + 1], x = grid[i];
    const cplx w1 = std::exp(ik * x) * z1[i];
    const cplx w2 = std::exp(ik * (2 * pb - x)) * chi[i];
    out[i] = {w1 + w2, ik * (w1 - w2)};
  }
  return out;
}

cplx modified_jost(const Potential& q, cplx k, double R, const JostOptions& opt) {
  return solve_psi(q, k, R, opt).jm;
}

Scattering scattering_ab(const JostData& d) {
  const cplx ik = I * d.k;
  Scattering s;
  s.a = (ik * d.j + d.jprime0) / (2.0 * ik);
  s.b = (ik * d.j - d.jprime0) / (2.0 * ik);
  s.am = s.a * std::exp(-I * d.phi0);
  s.am_direct = d.am;
  return s;
}

Scattering scattering_ab(const Potential& q, cplx k, double R, const JostOptions& opt) {
  return scattering_ab(solve_psi(q, k, R, opt));
}

cplx djost_dR(const Potential& q, double k, double R, const JostOptions& opt) {
  if (k == 0) throw std::invalid_argument("djost_dR: k = 0");
  const double qR = q(R);
  if (qR == 0) return 0;
  const cplx j = solve_psi(q, k, R, opt).j;
  const cplx ik = I * k;
  return qR / (2.0 * ik) * (-j + std::conj(j) * std::exp(2.0 * ik * R));
}

double wronskian_check(const JostData& d) {
  if (d.k.imag() != 0) throw std::invalid_argument("wronskian_check: k must be real");
  const cplx target = 2.0 * I * d.k;
  double worst = 0;
  for (const auto& [j, dj] : d.solution_on_grid())
    worst = std::max(worst, std::abs(dj * std::conj(j) - j * std::conj(dj) - target));
  return worst;
}

double wronskian_check(const Potential& q, double k, double R, const JostOptions& opt) {
  return wronskian_check(solve_psi(q, k, R, opt));
}

}  // namespace wavescat
