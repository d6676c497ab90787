#include "wavescat/evolution.hpp"

#include "wavescat/parallel.hpp"
#include "wavescat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavescat {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_uniform(const Eigen::VectorXd& x) {
  if (x.size() < 3) return false;
  const double dx = x(1) - x(0);
  for (Eigen::Index i = 2; i < x.size(); ++i)
    if (std::abs(x(i) - x(i - 1) - dx) > 1e-9 * dx) return false;
  return true;
}

Eigen::VectorXd cell_averages(const Potential& q, const Eigen::VectorXd& x) {
  Eigen::VectorXd qc = Eigen::VectorXd::Zero(x.size());
  if (q.is_zero() || x.size() < 2) return qc;
  const double dx = x(1) - x(0);
  parallel_for(std::size_t(x.size()), [&](std::size_t i) {
    const double lo = std::max(0.0, x(i) - 0.5 * dx), hi = x(i) + 0.5 * dx;
    if (lo >= q.support_bound()) return;
    qc(i) = integrate_potential(q, lo, hi) / (hi - lo);
  });
  return qc;
}

Eigen::VectorXcd sample_on(const std::function<cplx(double)>& g, const Eigen::VectorXd& x) {
  Eigen::VectorXcd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = g(x(i));
  return out;
}

// Fourth-order central difference; odd reflection at x = 0, second order at
// the far end.
Eigen::VectorXcd derivative(const Eigen::VectorXcd& y, double dx) {
  const Eigen::Index n = y.size();
  Eigen::VectorXcd d(n);
  auto at = [&](Eigen::Index i) -> cplx {
    if (i < 0) return -y(-i);
    return y(i);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i + 2 < n)
      d(i) = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12 * dx);
    else if (i + 1 < n)
      d(i) = (at(i + 1) - at(i - 1)) / (2 * dx);
    else
      d(i) = (at(i) - at(i - 1)) / dx;
  }
  return d;
}

// y'' - q y on the interior, zero at both walls.
void apply_operator(const Eigen::VectorXcd& y, const Eigen::VectorXd& qc, double inv_dx2,
                    Eigen::VectorXcd& out) {
  const Eigen::Index n = y.size();
  out(0) = 0;
  out(n - 1) = 0;
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    out(i) = (y(i + 1) - 2.0 * y(i) + y(i - 1)) * inv_dx2 - qc(i) * y(i);
}

// int q |y|^2 on a uniform grid: cubic interpolation of y per cell, Gauss
// panels split at the breakpoints of q.
double potential_term(const Potential& q, const Eigen::VectorXd& x, const Eigen::VectorXcd& y) {
  if (q.is_zero()) return 0;
  const Eigen::Index n = x.size();
  const double dx = x(1) - x(0);
  auto at = [&](Eigen::Index i) -> cplx {
    if (i < 0) return -y(-i);
    return y(std::min(i, n - 1));
  };
  const auto& rule = quad::gauss(6);
  const auto br = q.breakpoints();
  std::vector<double> partial(std::size_t(n), 0.0);
  parallel_for(std::size_t(n - 1), [&](std::size_t ci) {
    const Eigen::Index i = Eigen::Index(ci);
    const double a = x(i), b = x(i + 1);
    if (a >= q.support_bound()) return;
    std::vector<double> cuts{a};
    for (double c : br)
      if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    const cplx f0 = at(i - 1), f1 = at(i), f2 = at(i + 1), f3 = at(i + 2);
    double sum = 0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double lo = cuts[p], hi = cuts[p + 1];
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (Eigen::Index g = 0; g < rule.nodes.size(); ++g) {
        const double xg = mid + half * rule.nodes(g);
        const double s = (xg - a) / dx;  // nodes at -1, 0, 1, 2
        const cplx v = f0 * (-s * (s - 1) * (s - 2) / 6) + f1 * ((s + 1) * (s - 1) * (s - 2) / 2) +
                       f2 * (-(s + 1) * s * (s - 2) / 2) + f3 * ((s + 1) * s * (s - 1) / 6);
        sum += half * rule.weights(g) * q.value_within(xg, lo, hi) * std::norm(v);
      }
    }
    partial[ci] = sum;
  });
  double total = 0;
  for (double v : partial) total += v;
  return total;
}

SampledFunction sample_data(const std::function<cplx(double)>& g, double support, double panel) {
  return sample_function(g, 0, support, panel, 16);
}

}  // namespace

FieldState uniform_grid(double X, double dx) {
  if (!(dx > 0) || !(X > dx)) throw std::invalid_argument("uniform_grid: need 0 < dx < X");
  const Eigen::Index n = Eigen::Index(std::ceil(X / dx - 1e-9)) + 1;
  FieldState s;
  s.x = Eigen::VectorXd::LinSpaced(n, 0, dx * double(n - 1));
  s.w = Eigen::VectorXd::Constant(n, dx);
  s.w(0) = s.w(n - 1) = 0.5 * dx;
  s.y = s.yt = Eigen::VectorXcd::Zero(n);
  return s;
}

SpectralCoefficients spectral_coefficients(const Potential& q, const SampledFunction& fphi,
                                           const SampledFunction* fpsi, PsiMode mode,
                                           const SpectralModel& model) {
  if (mode == PsiMode::given && (!fpsi || fpsi->x.size() != fphi.x.size()))
    throw std::invalid_argument("spectral_coefficients: psi samples missing");
  std::span<const double> xs(fphi.x.data(), std::size_t(fphi.x.size()));
  const Eigen::MatrixXd U = regular_matrix(q, model, xs);
  const Eigen::MatrixXd E = eigenfunction_matrix(q, model, xs);
  const auto tphi = generalized_transform(q, fphi, model, &U, &E);

  SpectralCoefficients c;
  c.phi = tphi.fb;
  c.phi_points = tphi.points;
  c.norm2 = tphi.norm2;
  c.excluded_mass = tphi.norm2 - tphi.continuum - tphi.point_mass;
  c.bound_mass = tphi.point_mass;

  const Eigen::ArrayXd k = model.k.array();
  switch (mode) {
    case PsiMode::zero:
      c.psi = Eigen::VectorXcd::Zero(model.k.size());
      c.psi_points = Eigen::VectorXcd::Zero(c.phi_points.size());
      break;
    case PsiMode::minus_i_sqrtH_of_phi:
      c.psi = (cplx(0, -1) * k.cast<cplx>() * c.phi.array()).matrix();
      // sqrt(-kappa^2) = i kappa
      c.psi_points.resize(c.phi_points.size());
      for (Eigen::Index j = 0; j < c.phi_points.size(); ++j)
        c.psi_points(j) = model.dirichlet_eigs[std::size_t(j)] * c.phi_points(j);
      break;
    case PsiMode::given: {
      const auto tpsi = generalized_transform(q, *fpsi, model, &U, &E);
      c.psi = tpsi.fb;
      c.psi_points = tpsi.points;
      c.norm2 += tpsi.norm2;
      c.excluded_mass += tpsi.norm2 - tpsi.continuum - tpsi.point_mass;
      c.bound_mass += tpsi.point_mass;
      break;
    }
  }
  c.excluded_flag = c.norm2 > 0 && std::abs(c.excluded_mass) > 0.01 * c.norm2;
  return c;
}

SpectralCoefficients spectral_coefficients(const Potential& q, const CauchyData& data,
                                           const SpectralModel& model) {
  if (!data.phi) throw std::invalid_argument("spectral_coefficients: phi missing");
  if (!(data.support > 0)) throw std::invalid_argument("spectral_coefficients: support must be positive");
  if (data.psi_mode == PsiMode::given && !data.psi)
    throw std::invalid_argument("spectral_coefficients: psi missing");
  const auto fphi = sample_data(data.phi, data.support, data.panel);
  if (data.psi_mode != PsiMode::given)
    return spectral_coefficients(q, fphi, nullptr, data.psi_mode, model);
  SampledFunction fpsi = fphi;
  for (Eigen::Index i = 0; i < fpsi.x.size(); ++i) fpsi.f(i) = data.psi(fpsi.x(i));
  return spectral_coefficients(q, fphi, &fpsi, PsiMode::given, model);
}

namespace {

struct TimeCoefficients {
  Eigen::VectorXcd y, yt, py, pyt;
};

// Coefficients of y and y_t against u(., k) drho and the eigenfunctions.
TimeCoefficients time_coefficients(const SpectralModel& M, const SpectralCoefficients& c,
                                   double t, bool project) {
  const Eigen::ArrayXd k = M.k.array();
  const Eigen::ArrayXd ct = (k * t).cos(), st = (k * t).sin();
  TimeCoefficients out;
  out.y = (ct.cast<cplx>() * c.phi.array() + (st / k).cast<cplx>() * c.psi.array()).matrix();
  out.yt = ((-k * st).cast<cplx>() * c.phi.array() + ct.cast<cplx>() * c.psi.array()).matrix();
  const Eigen::Index np = project ? 0 : c.phi_points.size();
  out.py.resize(np);
  out.pyt.resize(np);
  for (Eigen::Index j = 0; j < np; ++j) {
    const double kappa = M.dirichlet_eigs[std::size_t(j)];
    const double ch = std::cosh(kappa * t), sh = std::sinh(kappa * t);
    out.py(j) = ch * c.phi_points(j) + sh / kappa * c.psi_points(j);
    out.pyt(j) = kappa * sh * c.phi_points(j) + ch * c.psi_points(j);
  }
  return out;
}

Eigen::VectorXcd real_times(const Eigen::MatrixXd& A, const Eigen::VectorXcd& v) {
  const Eigen::VectorXd re = A * v.real(), im = A * v.imag();
  Eigen::VectorXcd out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

double spectral_mass(const SpectralModel& model, const SpectralCoefficients& c, double t,
                     bool project) {
  const auto tc = time_coefficients(model, c, t, project);
  double m = (model.drho.array() * tc.y.array().abs2()).sum();
  for (Eigen::Index j = 0; j < tc.py.size(); ++j)
    m += model.point_weights[std::size_t(j)] * std::norm(tc.py(j));
  return m;
}

SpectralSynthesizer::SpectralSynthesizer(const Potential& q, const SpectralModel& model,
                                         const FieldState& grid, bool with_derivative)
    : model_(&model), grid_(grid) {
  std::span<const double> xs(grid.x.data(), std::size_t(grid.x.size()));
  Eigen::MatrixXd Ud, Ed;
  U_ = regular_matrix(q, model, xs, {}, with_derivative ? &Ud : nullptr).transpose();
  E_ = eigenfunction_matrix(q, model, xs, {}, with_derivative ? &Ed : nullptr).transpose();
  if (with_derivative) {
    Ux_ = Ud.transpose();
    Ex_ = Ed.transpose();
  }
}

FieldState SpectralSynthesizer::state(const SpectralCoefficients& c, double t, bool project) const {
  const SpectralModel& M = *model_;
  auto tc = time_coefficients(M, c, t, project);
  const Eigen::ArrayXcd drho = M.drho.array().cast<cplx>();
  tc.y = (drho * tc.y.array()).matrix();
  tc.yt = (drho * tc.yt.array()).matrix();
  for (Eigen::Index j = 0; j < tc.py.size(); ++j) {
    tc.py(j) *= M.point_weights[std::size_t(j)];
    tc.pyt(j) *= M.point_weights[std::size_t(j)];
  }

  FieldState s = grid_;
  s.t = t;
  s.y = real_times(U_, tc.y);
  s.yt = real_times(U_, tc.yt);
  if (Ux_.size() > 0) s.yx = real_times(Ux_, tc.y);
  if (tc.py.size() > 0) {
    s.y += real_times(E_, tc.py);
    s.yt += real_times(E_, tc.pyt);
    if (Ex_.size() > 0) s.yx += real_times(Ex_, tc.py);
  }
  s.excluded_mass = c.excluded_mass;
  s.excluded_flag = c.excluded_flag;
  return s;
}

FieldState evolve_spectral(const Potential& q, const CauchyData& data, double t,
                           const SpectralModel& model, const FieldState* grid) {
  if (!(t >= 0)) throw std::invalid_argument("evolve_spectral: t must be nonnegative");
  const FieldState g = grid ? *grid : uniform_grid(data.support + t + 5, 0.01);
  const auto c = spectral_coefficients(q, data, model);
  return SpectralSynthesizer(q, model, g).state(c, t);
}

FieldState evolve_fdtd(const Potential& q, const CauchyData& data, double t, double dx,
                       double dt) {
  if (data.psi_mode == PsiMode::minus_i_sqrtH_of_phi)
    throw std::invalid_argument("evolve_fdtd: -i sqrt(H) data must be synthesized first");
  if (!data.phi) throw std::invalid_argument("evolve_fdtd: phi missing");
  if (data.psi_mode == PsiMode::given && !data.psi)
    throw std::invalid_argument("evolve_fdtd: psi missing");
  FieldState s = uniform_grid(data.support + t + 5, dx);
  s.y = sample_on(data.phi, s.x);
  if (data.psi_mode == PsiMode::given) s.yt = sample_on(data.psi, s.x);
  s.y(0) = s.yt(0) = 0;
  return evolve_fdtd(q, s, t, dt);
}

FieldState evolve_fdtd(const Potential& q, const FieldState& initial, double t, double dt) {
  if (!is_uniform(initial.x) || initial.x(0) != 0)
    throw std::invalid_argument("evolve_fdtd: initial state needs a uniform grid from 0");
  if (!(t >= 0)) throw std::invalid_argument("evolve_fdtd: t must be nonnegative");
  const double dx = initial.x(1) - initial.x(0);
  if (!(dt > 0) || dt > 0.9 * dx * (1 + 1e-12))
    throw std::invalid_argument("evolve_fdtd: CFL condition dt <= 0.9 dx violated");

  const Eigen::VectorXd qc = cell_averages(q, initial.x);
  const Eigen::Index n = initial.x.size();
  const long steps = std::max(1L, long(std::ceil(t / dt - 1e-9)));
  const double h = t > 0 ? t / double(steps) : dt;
  const double inv_dx2 = 1 / (dx * dx);

  Eigen::VectorXcd prev = initial.y, cur(n), next(n), L(n);
  prev(0) = prev(n - 1) = 0;
  apply_operator(prev, qc, inv_dx2, L);
  cur = prev + h * initial.yt + 0.5 * h * h * L;
  cur(0) = cur(n - 1) = 0;
  const long total = t > 0 ? steps : 0;
  for (long s = 1; s <= total; ++s) {
    apply_operator(cur, qc, inv_dx2, L);
    next = 2.0 * cur - prev + h * h * L;
    prev.swap(cur);
    cur.swap(next);
  }
  // `prev` holds y(t), `cur` holds y(t + h)

  FieldState out = initial;
  out.t = t;
  out.yx.resize(0);
  // |(y1 - y0)/h|^2 - <y1, A y0> is invariant under the scheme
  apply_operator(prev, qc, inv_dx2, L);
  const Eigen::VectorXcd v = (cur - prev) / h;
  out.scheme_energy = dx * (v.squaredNorm() - cur.dot(L).real());
  if (total == 0) {
    out.y = initial.y;
    out.yt = initial.yt;
    return out;
  }
  out.y = prev;
  // y(t - h) from one step back: y(t-h) = 2 y(t) - y(t+h) + h^2 L y(t)
  const Eigen::VectorXcd back = 2.0 * prev - cur + h * h * L;
  Eigen::VectorXcd D = (cur - back) / (2 * h);
  // remove the h^2/6 y_ttt term of the central difference
  Eigen::VectorXcd LD(n);
  apply_operator(D, qc, inv_dx2, LD);
  out.yt = D - (h * h / 6) * LD;
  return out;
}

FieldState evolve_fdtd_extrapolated(const Potential& q, const CauchyData& data, double t,
                                    double dx, double cfl) {
  auto coarse = evolve_fdtd(q, data, t, dx, cfl * dx);
  const auto fine = evolve_fdtd(q, data, t, 0.5 * dx, 0.5 * cfl * dx);
  for (Eigen::Index j = 0; j < coarse.x.size(); ++j) {
    coarse.y(j) = (4.0 * fine.y(2 * j) - coarse.y(j)) / 3.0;
    coarse.yt(j) = (4.0 * fine.yt(2 * j) - coarse.yt(j)) / 3.0;
  }
  return coarse;
}

double energy(const Potential& q, const FieldState& s) {
  const Eigen::Index n = s.x.size();
  if (n == 0) return 0;
  Eigen::VectorXcd yx = s.yx;
  double e = 0;
  if (is_uniform(s.x)) {
    if (yx.size() != n) yx = derivative(s.y, s.x(1) - s.x(0));
    e = potential_term(q, s.x, s.y);
    for (Eigen::Index i = 0; i < n; ++i) e += s.w(i) * (std::norm(s.yt(i)) + std::norm(yx(i)));
  } else {
    if (yx.size() != n) throw std::invalid_argument("energy: non-uniform grid needs y_x");
    for (Eigen::Index i = 0; i < n; ++i)
      e += s.w(i) * (std::norm(s.yt(i)) + std::norm(yx(i)) + q(s.x(i)) * std::norm(s.y(i)));
  }
  return e;
}

double field_mass(const FieldState& s) {
  return (s.w.array() * s.y.array().abs2()).sum();
}

double ballistic_mass(const FieldState& s) {
  if (!(s.t >= 1)) throw std::invalid_argument("ballistic_mass: needs t >= 1");
  const double lo = s.t - std::sqrt(s.t), hi = s.t + std::sqrt(s.t);
  double m = 0;
  for (Eigen::Index i = 0; i < s.x.size(); ++i)
    if (s.x(i) >= lo && s.x(i) <= hi) m += s.w(i) * std::norm(s.y(i));
  return m;
}

Eigen::VectorXcd asymptotic_profile(const Potential& q, const SpectralCoefficients& c,
                                    const SpectralModel& model, std::span<const double> xs) {
  if (q.decay_tag() == DecayTag::l2_monotone && model.R_used >= kInf)
    throw std::invalid_argument("asymptotic_profile: int q does not converge");
  // k f-breve e^{-(i/2k) int q} / j_m = k f-breve / j
  const Eigen::ArrayXcd h =
      model.w.array().cast<cplx>() * model.k.array().cast<cplx>() * c.phi.array() / model.j.array();
  Eigen::VectorXcd mu(Eigen::Index(xs.size()));
  parallel_for(xs.size(), [&](std::size_t i) {
    cplx sum = 0;
    for (Eigen::Index r = 0; r < h.size(); ++r)
      sum += h(r) * std::exp(cplx(0, model.k(r) * xs[i]));
    mu(Eigen::Index(i)) = sum / cplx(0, kPi);
  });
  return mu;
}

Eigen::VectorXcd asymptotic_profile(const Potential& q, const std::function<cplx(double)>& f,
                                    double support, const SpectralModel& model,
                                    std::span<const double> xs) {
  CauchyData d{f, {}, PsiMode::zero, support};
  return asymptotic_profile(q, spectral_coefficients(q, d, model), model, xs);
}

std::vector<double> convergence_test_ch1(const Potential& q, const std::function<cplx(double)>& f,
                                         double support, std::span<const double> Tlist,
                                         std::span<const double> xwindow,
                                         const SpectralModel& model) {
  if (xwindow.empty()) throw std::invalid_argument("convergence_test_ch1: empty window");
  const double xmin = *std::min_element(xwindow.begin(), xwindow.end());
  for (double T : Tlist)
    if (!(T > 0) || T + xmin < 0)
      throw std::invalid_argument("convergence_test_ch1: window leaves the half-line");
  if (q.decay_tag() == DecayTag::l2_monotone && !q.is_compact() && model.R_used >= kInf)
    throw std::invalid_argument("convergence_test_ch1: int q does not converge");

  CauchyData d{f, {}, PsiMode::minus_i_sqrtH_of_phi, support};
  const auto c = spectral_coefficients(q, d, model);
  const Eigen::VectorXcd mu = asymptotic_profile(q, c, model, xwindow);
  std::vector<double> out;
  for (double T : Tlist) {
    FieldState g;
    g.x.resize(Eigen::Index(xwindow.size()));
    for (std::size_t i = 0; i < xwindow.size(); ++i) g.x(Eigen::Index(i)) = T + xwindow[i];
    g.w = Eigen::VectorXd::Zero(g.x.size());
    const auto s = SpectralSynthesizer(q, model, g).state(c, T);
    out.push_back((s.y - mu).cwiseAbs().maxCoeff());
  }
  return out;
}

double synthesis_panel(double t, double x_max, double support) {
  return std::min(0.25, 12.0 / (t + x_max + support + 1));
}

}  // namespace wavescat
