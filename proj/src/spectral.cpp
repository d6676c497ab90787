#include "wavescat/spectral.hpp"

#include "wavescat/chebyshev.hpp"
#include "wavescat/parallel.hpp"
#include "wavescat/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavescat {

namespace {

constexpr cplx I{0, 1};
constexpr double kPi = std::numbers::pi;

using State = std::array<cplx, 2>;

State rk4(const Potential& q, cplx k2, double x, double h, const State& y, double lo,
          double hi) {
  auto f = [&](double t, const State& s) -> State {
    return {s[1], (q.value_within(t, lo, hi) - k2) * s[0]};
  };
  const State a = f(x, y);
  const State b = f(x + h / 2, {y[0] + h / 2 * a[0], y[1] + h / 2 * a[1]});
  const State c = f(x + h / 2, {y[0] + h / 2 * b[0], y[1] + h / 2 * b[1]});
  const State d = f(x + h, {y[0] + h * c[0], y[1] + h * c[1]});
  return {y[0] + h / 6 * (a[0] + 2.0 * b[0] + 2.0 * c[0] + d[0]),
          y[1] + h / 6 * (a[1] + 2.0 * b[1] + 2.0 * c[1] + d[1])};
}

// Composite Gauss-Legendre k-grid on [lo, hi], geometrically graded up to `grade`.
quad::NodeSet k_grid(double lo, double hi, double panel, int per_panel, double grade) {
  std::vector<double> breaks;
  for (double x = 2 * lo; x < std::min(grade, hi); x *= 2) breaks.push_back(x);
  if (grade > lo && grade < hi) breaks.push_back(grade);
  return quad::composite_gauss(lo, hi, breaks, panel, per_panel);
}

double eigen_norm2(const JostData& d) {
  const auto& cheb = cheb::lobatto(d.nodes_per_panel - 1);
  const Eigen::VectorXd w = cheb.weights();
  const auto sol = d.solution_on_grid();
  double s = 0;
  for (std::size_t p = 0; p + 1 < d.panel_edges.size(); ++p) {
    const double half = 0.5 * (d.panel_edges[p + 1] - d.panel_edges[p]);
    for (int j = 0; j < d.nodes_per_panel; ++j) {
      const double v = sol[p * d.nodes_per_panel + j].first.real();
      s += half * w(j) * v * v;
    }
  }
  const double kappa = d.k.imag(), reff = d.panel_edges.back();
  return s + std::exp(-2 * kappa * reff) / (2 * kappa);
}

double model_radius(const Potential& q, double R) {
  if (R > 0) return R;
  if (q.is_zero()) return 1;
  if (!q.is_compact()) throw std::invalid_argument("spectral model: R required for non-compact q");
  return q.support_bound();
}

}  // namespace

RegularSolution regular_solution(const Potential& q, cplx k, double xmax,
                                 const RegularOptions& opt, std::span<const double> samples) {
  if (!(xmax > 0)) throw std::invalid_argument("regular_solution: xmax must be positive");
  RegularSolution out;
  out.k = k;
  const cplx k2 = k * k;
  const double reff = q.is_zero() ? 0.0 : std::min(q.support_bound(), xmax);

  std::vector<double> stops;
  for (double x : q.breakpoints())
    if (x > 0 && x < xmax) stops.push_back(x);
  for (double x : samples)
    if (x > 0 && x < xmax) stops.push_back(x);
  if (reff > 0 && reff < xmax) stops.push_back(reff);
  stops.push_back(xmax);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  State y{0.0, 1.0};
  double x = 0;
  out.grid.push_back(0);
  out.u.push_back(0.0);
  out.uprime.push_back(1.0);
  double h = opt.h0;
  for (double stop : stops) {
    if (x >= reff) {
      // free continuation from the support edge
      const double s = stop - reff;
      const State& ys = y;
      const cplx c = std::cos(k * s), sn = std::sin(k * s);
      const cplx u = ys[0] * c + ys[1] * (k == cplx(0) ? cplx(s) : sn / k);
      const cplx up = -ys[0] * k * sn + ys[1] * c;
      out.grid.push_back(stop);
      out.u.push_back(u);
      out.uprime.push_back(up);
      continue;
    }
    const double lo = x, hi = stop;
    while (x < hi) {
      h = std::min(h, hi - x);
      if (h < opt.h_min) throw NumericalError("regular_solution: step size underflow");
      const State full = rk4(q, k2, x, h, y, lo, hi);
      const State halfs = rk4(q, k2, x + h / 2, h / 2, rk4(q, k2, x, h / 2, y, lo, hi), lo, hi);
      const double err = std::max(std::abs(halfs[0] - full[0]), std::abs(halfs[1] - full[1])) / 15;
      const double scale = 1 + std::max(std::abs(halfs[0]), std::abs(halfs[1]));
      if (err <= opt.tol * scale) {
        x = (hi - x - h < 1e-14 * std::max(1.0, hi)) ? hi : x + h;
        y = {halfs[0] + (halfs[0] - full[0]) / 15.0, halfs[1] + (halfs[1] - full[1]) / 15.0};
        ++out.steps;
        if (x < hi) {
          out.grid.push_back(x);
          out.u.push_back(y[0]);
          out.uprime.push_back(y[1]);
        }
      }
      const double fac = err > 0 ? 0.9 * std::pow(opt.tol * scale / err, 0.2) : 4.0;
      h *= std::clamp(fac, 0.2, 4.0);
    }
    out.grid.push_back(hi);
    out.u.push_back(y[0]);
    out.uprime.push_back(y[1]);
  }
  return out;
}

cplx m_function(const Potential& q, cplx k, double R, const JostOptions& opt) {
  const auto d = solve_psi(q, k, R, opt);
  if (std::abs(d.j) < 1e-12) throw NumericalError("m_function: j(0) vanishes (Dirichlet eigenvalue)");
  return d.jprime0 / d.j;
}

double spectral_density(const Potential& q, double k, double R, const JostOptions& opt) {
  if (!(k > 0)) throw std::invalid_argument("spectral_density: k must be positive");
  return k / (kPi * std::norm(modified_jost(q, k, R, opt)));
}

DensityEstimate spectral_density_checked(const Potential& q, double k, double R, double rel_tol,
                                         int max_doublings) {
  DensityEstimate e;
  e.R_used = R;
  e.mu = spectral_density(q, k, R);
  if (q.is_compact() && R >= q.support_bound()) return e;
  for (int i = 0; i < max_doublings; ++i) {
    const double next = spectral_density(q, k, 2 * e.R_used);
    e.doubling_gap = std::abs(next - e.mu) / std::abs(next);
    e.mu = next;
    e.R_used *= 2;
    if (e.doubling_gap <= rel_tol) return e;
  }
  e.converged = false;
  return e;
}

double normalized_ratio(const JostData& d) {
  const double t = d.k.real();
  if (d.k.imag() != 0 || !(t > 0)) throw std::invalid_argument("normalized_ratio: real k > 0");
  const cplx m = d.jprime0 / d.j;
  const double mu = t / (kPi * std::norm(d.jm));
  return std::norm(m + I * t) / (4 * kPi * t * mu);
}

BoundStates bound_states(const Potential& q, double R, BoundStateKind which,
                         const BoundStateOptions& opt) {
  BoundStates out;
  if (q.is_zero()) return out;
  const double reff = effective_radius(q, R);
  const double ymax = std::sqrt(q.sup_abs(0, reff)) * 1.01 + 1e-3;
  if (ymax <= opt.delta) return out;
  auto g = [&](double y) {
    const auto d = solve_psi(q, cplx(0, y), R);
    if (which == BoundStateKind::halfline_dirichlet) return d.j.real();
    return (d.jprime0 - y * d.j).real();
  };
  const int n = std::max(opt.scan, 8);
  std::vector<double> ys(n + 1), gs(n + 1);
  for (int i = 0; i <= n; ++i) ys[i] = opt.delta + (ymax - opt.delta) * i / n;
  parallel_for(std::size_t(n + 1), [&](std::size_t i) { gs[i] = g(ys[i]); });
  for (int i = 0; i < n; ++i) {
    if (gs[i] == 0 || (gs[i] < 0) != (gs[i + 1] < 0)) {
      double lo = ys[i], hi = ys[i + 1], flo = gs[i];
      while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi), fm = g(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.values.push_back(0.5 * (lo + hi));
      if (i == 0) out.threshold_warning = true;
    }
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

cplx BlaschkeProduct::operator()(cplx k) const {
  cplx p = 1;
  for (double xi : xis) p *= (k - I * xi) / (k + I * xi) * std::exp(2.0 * I * xi / k);
  return p;
}

SpectralModel build_model(const Potential& q, const ModelOptions& opt) {
  if (!(opt.delta > 0) || !(opt.kmax > opt.delta))
    throw std::invalid_argument("build_model: need 0 < delta < kmax");
  SpectralModel M;
  M.R_used = model_radius(q, opt.R);
  M.delta = opt.delta;
  M.kmax = opt.kmax;
  const auto grid = k_grid(opt.delta, opt.kmax, opt.panel, opt.per_panel, opt.grade);
  const Eigen::Index n = grid.x.size();
  M.k = grid.x;
  M.w = grid.w;
  M.mu.resize(n);
  M.drho.resize(n);
  M.m.resize(n);
  M.jm.resize(n);
  M.j.resize(n);
  parallel_for(std::size_t(n), [&](std::size_t i) {
    const double k = M.k(i);
    const auto d = solve_psi(q, k, M.R_used, opt.jost);
    M.jm(i) = d.jm;
    M.j(i) = d.j;
    M.m(i) = d.jprime0 / d.j;
    M.mu(i) = k / (kPi * std::norm(d.jm));
    M.drho(i) = M.w(i) * 2 * k * M.mu(i);
  });
  if (opt.bound_states && !q.is_zero()) {
    BoundStateOptions bo;
    bo.delta = std::min(1e-3, opt.delta);
    auto line = bound_states(q, M.R_used, BoundStateKind::line_glued, bo);
    auto dir = bound_states(q, M.R_used, BoundStateKind::halfline_dirichlet, bo);
    M.bound_xis = line.values;
    M.dirichlet_eigs = dir.values;
    M.threshold_warning = line.threshold_warning || dir.threshold_warning;
    for (double kappa : M.dirichlet_eigs) {
      const auto d = solve_psi(q, cplx(0, kappa), M.R_used, opt.jost);
      M.point_weights.push_back(std::norm(d.jprime0.real()) / eigen_norm2(d));
    }
  }
  return M;
}

Eigen::MatrixXd regular_matrix(const Potential& q, const SpectralModel& model,
                               std::span<const double> xs, const JostOptions& opt,
                               Eigen::MatrixXd* derivative) {
  Eigen::MatrixXd U(model.k.size(), Eigen::Index(xs.size()));
  if (derivative) derivative->resize(U.rows(), U.cols());
  parallel_for(std::size_t(model.k.size()), [&](std::size_t r) {
    const double k = model.k(r);
    const auto d = solve_psi(q, k, model.R_used, opt);
    const cplx cj = std::conj(d.j);
    for (std::size_t c = 0; c < xs.size(); ++c) {
      const auto [j, dj] = d.solution_at(xs[c]);
      U(r, c) = (cj * j).imag() / k;
      if (derivative) (*derivative)(r, c) = (cj * dj).imag() / k;
    }
  });
  return U;
}

Eigen::MatrixXd eigenfunction_matrix(const Potential& q, const SpectralModel& model,
                                     std::span<const double> xs, const JostOptions& opt,
                                     Eigen::MatrixXd* derivative) {
  Eigen::MatrixXd E(Eigen::Index(model.dirichlet_eigs.size()), Eigen::Index(xs.size()));
  if (derivative) derivative->resize(E.rows(), E.cols());
  for (std::size_t r = 0; r < model.dirichlet_eigs.size(); ++r) {
    const auto d = solve_psi(q, cplx(0, model.dirichlet_eigs[r]), model.R_used, opt);
    const double dj0 = d.jprime0.real();
    for (std::size_t c = 0; c < xs.size(); ++c) {
      const auto [j, dj] = d.solution_at(xs[c]);
      E(r, c) = j.real() / dj0;
      if (derivative) (*derivative)(r, c) = dj.real() / dj0;
    }
  }
  return E;
}

SampledFunction sample_function(const std::function<cplx(double)>& g, double a, double b,
                                double panel, int per_panel) {
  const auto ns = quad::composite_gauss(a, b, {}, panel, per_panel);
  SampledFunction f{ns.x, ns.w, Eigen::VectorXcd(ns.x.size())};
  for (Eigen::Index i = 0; i < ns.x.size(); ++i) f.f(i) = g(ns.x(i));
  return f;
}

TransformPair generalized_transform(const Potential& q, const SampledFunction& f,
                                    const SpectralModel& model, const Eigen::MatrixXd* U,
                                    const Eigen::MatrixXd* E) {
  std::span<const double> xs(f.x.data(), std::size_t(f.x.size()));
  Eigen::MatrixXd Uown, Eown;
  if (!U) {
    Uown = regular_matrix(q, model, xs);
    U = &Uown;
  }
  if (!E) {
    Eown = eigenfunction_matrix(q, model, xs);
    E = &Eown;
  }
  const Eigen::VectorXcd wf = f.w.cast<cplx>().cwiseProduct(f.f);
  TransformPair t;
  t.fb = U->cast<cplx>() * wf;
  t.points = E->cast<cplx>() * wf;
  t.norm2 = f.norm2();
  t.continuum = (model.drho.array() * t.fb.array().abs2()).sum();
  for (Eigen::Index j = 0; j < t.points.size(); ++j)
    t.point_mass += model.point_weights[j] * std::norm(t.points(j));
  t.defect = std::abs(t.continuum + t.point_mass - t.norm2);
  t.truncation_flag = t.norm2 > 0 && (t.norm2 - t.continuum - t.point_mass) > 0.01 * t.norm2;
  return t;
}

TraceCheck trace_identity_check(const Potential& q, double R, const TraceOptions& opt) {
  TraceCheck out;
  if (q.is_zero()) return out;
  const double reff = effective_radius(q, R);
  out.rhs = (reff >= q.support_bound() ? q.l2_moment() : q.truncate(reff).l2_moment()) / 8;
  const auto grid = k_grid(opt.delta, opt.kmax, opt.panel, 16, 0.5);
  const Eigen::Index n = grid.x.size();
  Eigen::VectorXd integrand(n);
  parallel_for(std::size_t(n), [&](std::size_t i) {
    const double t = grid.x(i);
    const double L = std::max(0.0, std::log(normalized_ratio(solve_psi(q, t, R))));
    integrand(i) = t * t * L;
  });
  double main = grid.w.dot(integrand) / kPi;
  // t^2 L ~ C t^-2 beyond kmax; C from the weighted mean of t^4 L over the top half
  double num = 0, den = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (grid.x(i) >= opt.kmax / 2) {
      num += grid.w(i) * integrand(i) * grid.x(i) * grid.x(i);
      den += grid.w(i);
    }
  const double C = den > 0 ? num / den : 0;
  const double tail = C / (kPi * opt.kmax);
  out.tail_bound = std::abs(tail);
  out.lhs_continuum = main + tail;
  const auto line = bound_states(q, R, BoundStateKind::line_glued);
  out.xis = line.values;
  for (double xi : out.xis) out.lhs_points += 2.0 / 3.0 * xi * xi * xi;
  out.tail_flag = out.tail_bound > 0.05 * std::abs(out.rhs);
  return out;
}

Factorization am_factorization(const Potential& q, cplx k, double R, const TraceOptions& opt) {
  if (!(k.imag() > 0)) throw std::invalid_argument("am_factorization: requires Im k > 0");
  Factorization out;
  out.direct = solve_psi(q, k, R).am;
  if (q.is_zero()) {
    out.am = 1;
    return out;
  }
  const auto grid = k_grid(opt.delta, opt.kmax, opt.panel, 16, 0.5);
  const Eigen::Index n = grid.x.size();
  Eigen::VectorXd L(n);
  parallel_for(std::size_t(n), [&](std::size_t i) {
    L(i) = std::max(0.0, std::log(normalized_ratio(solve_psi(q, grid.x(i), R))));
  });
  cplx integral = 0;
  double num = 0, den = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = grid.x(i);
    integral += grid.w(i) * t * t * L(i) / (t * t - k * k);
    if (t >= opt.kmax / 2) {
      num += grid.w(i) * L(i) * t * t * t * t;
      den += grid.w(i);
    }
  }
  // L ~ C t^-4, so the integrand tail is C/(3 kmax^3)
  const double C = den > 0 ? num / den : 0;
  const double tail = C / (3 * opt.kmax * opt.kmax * opt.kmax);
  integral += tail;
  const cplx exponent = integral / (kPi * I * k);
  out.tail_bound = std::abs(tail / (kPi * k));
  const auto line = bound_states(q, R, BoundStateKind::line_glued);
  out.am = BlaschkeProduct{line.values}(k) * std::exp(exponent);
  const double scale = std::abs(std::log(out.am));
  out.inconclusive = scale > 0 && out.tail_bound > 0.1 * scale;
  return out;
}

WeakProbe weak_convergence_probe(const Potential& q, const std::function<double(double)>& testfn,
                                 double E1, double E2, std::span<const double> Rlist,
                                 double R_model) {
  if (!(E1 > 0) || !(E2 > E1)) throw std::invalid_argument("weak_convergence_probe: bad support");
  // |j_m(k, R)|^2 oscillates in k with period ~ pi/R
  double Rmax = R_model;
  for (double R : Rlist) Rmax = std::max(Rmax, R);
  const double panel = std::min(0.05, 4 / Rmax);
  const auto grid = quad::composite_gauss(std::sqrt(E1), std::sqrt(E2), {}, panel, 16);
  const Eigen::Index n = grid.x.size();
  WeakProbe out;
  out.s.assign(Rlist.size(), 0.0);
  Eigen::MatrixXd ratio(n, Eigen::Index(Rlist.size()));
  parallel_for(std::size_t(n), [&](std::size_t i) {
    const double k = grid.x(i);
    const double ref = std::norm(modified_jost(q, k, R_model));
    for (std::size_t r = 0; r < Rlist.size(); ++r)
      ratio(i, r) = std::norm(modified_jost(q, k, Rlist[r])) / ref;
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = grid.x(i), base = grid.w(i) * testfn(k * k) * 2 * k * k;
    out.target += base;
    for (std::size_t r = 0; r < Rlist.size(); ++r) out.s[r] += base * ratio(i, r);
  }
  return out;
}

std::vector<double> jm_ratio_convergence(const Potential& q, double k1, double k2,
                                         std::span<const double> Rlist, double R_ref) {
  if (Rlist.empty()) return {};
  if (!(k1 > 0) || !(k2 > k1)) throw std::invalid_argument("jm_ratio_convergence: bad interval");
  const double Rref = R_ref > 0 ? R_ref : 2 * *std::max_element(Rlist.begin(), Rlist.end());
  const auto grid = quad::composite_gauss(k1, k2, {}, 0.1, 16);
  const Eigen::Index n = grid.x.size();
  Eigen::MatrixXd dev(n, Eigen::Index(Rlist.size()));
  parallel_for(std::size_t(n), [&](std::size_t i) {
    const double k = grid.x(i);
    const cplx ref = modified_jost(q, k, Rref);
    for (std::size_t r = 0; r < Rlist.size(); ++r)
      dev(i, r) = std::norm(modified_jost(q, k, Rlist[r]) / ref - 1.0);
  });
  std::vector<double> out(Rlist.size());
  for (std::size_t r = 0; r < Rlist.size(); ++r) out[r] = grid.w.dot(dev.col(r));
  return out;
}

}  // namespace wavescat
