#include "wavescat/acceptance.hpp"

#include "wavescat/det2.hpp"
#include "wavescat/evolution.hpp"
#include "wavescat/jost.hpp"
#include "wavescat/quadrature.hpp"
#include "wavescat/spectral.hpp"
#include "wavescat/waveop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>

namespace wavescat {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0, 1};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void require(bool ok, std::string note) {
    passed = passed && ok;
    notes.push_back((ok ? "" : "FAILED ") + std::move(note));
  }
};

std::vector<Potential> compact_wells() {
  return {make_potential(spec::SquareWell{-0.1, 1}), make_potential(spec::SquareWell{-3, 1}),
          make_potential(spec::SquareWell{-4, 1}), make_potential(spec::SquareWell{2, 1})};
}

const char* well_name(const Potential& q) {
  static thread_local char buf[32];
  std::snprintf(buf, sizeof buf, "well(%g)", std::get<spec::SquareWell>(q.spec()).depth);
  return buf;
}

// (1 - s^2)^6 on |x - 1.5| < 0.75
cplx packet(double x) {
  const double s = (x - 1.5) / 0.75;
  return std::abs(s) >= 1 ? 0.0 : std::pow(1 - s * s, 6);
}
constexpr double kPacketSupport = 2.25;

SpectralModel evolution_model(const Potential& q, double t, double xmax, double kmax,
                              double R = 0) {
  ModelOptions mo;
  mo.R = R;
  mo.delta = 2e-3;
  mo.kmax = kmax;
  mo.panel = synthesis_panel(t, xmax, kPacketSupport);
  return build_model(q, mo);
}

FieldState gauss_grid(double a, double b, std::vector<double> breaks, double panel) {
  const auto ns = quad::composite_gauss(a, b, breaks, panel, 16);
  FieldState g;
  g.x = ns.x;
  g.w = ns.w;
  return g;
}

bool nonincreasing(const std::vector<double>& v, int allowed) {
  int bad = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) ++bad;
  return bad <= allowed;
}

bool strictly_decreasing(const std::vector<double>& v) { return nonincreasing(v, 0) &&
  std::adjacent_find(v.begin(), v.end()) == v.end(); }

std::string list(const std::vector<double>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += fmt(i ? ", %.3e" : "%.3e", v[i]);
  return s + "}";
}

// ---------------------------------------------------------------- criteria

Outcome jost_closed_form() {
  Outcome o;
  const auto q = make_potential(spec::SquareWell{-3, 1});
  double worst = 0;
  for (cplx k : {cplx(0.5), cplx(1), cplx(2), cplx(1, 0.5), cplx(0, 2)}) {
    const cplx kap = std::sqrt(k * k + 3.0);
    const cplx exact = std::exp(I * k) * (std::cos(kap) - I * (k / kap) * std::sin(kap));
    worst = std::max(worst, std::abs(solve_psi(q, k, 1).j - exact));
  }
  o.require(worst < 1e-7, fmt("max |j - closed form| %.2e < 1e-7", worst));
  return o;
}

Outcome route_equivalence() {
  Outcome o;
  double worst = 0;
  bool converged = true;
  for (const auto& q : compact_wells())
    for (double kr : {0.5, 1.0, 2.0})
      for (double ki : {0.25, 0.5, 1.0}) {
        const cplx k{kr, ki};
        const auto r = det2_modified_jost(q, k, 1.0);
        converged = converged && r.converged;
        worst = std::max(worst, std::abs(r.jm - modified_jost(q, k, 1.0)));
      }
  o.require(converged, "det2 node doubling converged");
  o.require(worst < 1e-6, fmt("max |det2 - Volterra| %.2e < 1e-6", worst));
  return o;
}

Outcome lemma1_check() {
  Outcome o;
  const double probes[5][2] = {{0.6, 0.2}, {1.0, 0.35}, {2.5, 0.5}, {1.7, 0.65}, {0.9, 0.8}};
  const double h = 1e-4;
  double worst = 0;
  for (const auto& q : compact_wells())
    for (const auto& p : probes) {
      const double k = p[0], R = p[1];
      const cplx fd = (solve_psi(q, k, R + h).j - solve_psi(q, k, R - h).j) / (2 * h);
      const cplx an = djost_dR(q, k, R);
      worst = std::max(worst, std::abs(fd - an) / std::abs(an));
    }
  o.require(worst < 1e-4, fmt("max relative error %.2e < 1e-4", worst));
  return o;
}

Outcome scattering_identities() {
  Outcome o;
  double e_ab = 0, e_j = 0, e_bridge = 0;
  for (const auto& np : acceptance_potentials()) {
    const auto full = make_potential(np.spec);
    const double R = full.is_compact() ? std::max(1.0, full.support_bound()) : 20;
    const auto q = full.is_compact() ? full : full.truncate(R);
    for (int i = 0; i < 50; ++i) {
      const double k = 0.1 + 4.9 * i / 49;
      const auto d = solve_psi(q, k, R);
      const auto s = scattering_ab(d);
      e_ab = std::max(e_ab, std::abs(std::norm(s.a) - std::norm(s.b) - 1));
      e_j = std::max(e_j, std::abs(d.j - (s.a + s.b)));
      const auto r = regular_solution(q, k, R);
      const cplx u = r.u.back(), du = r.uprime.back();
      e_bridge = std::max(e_bridge, std::abs(k * k * u * u + du * du - std::norm(d.jm)));
    }
  }
  o.require(e_ab < 1e-8, fmt("max ||a|^2-|b|^2-1| %.2e < 1e-8", e_ab));
  o.require(e_j < 1e-8, fmt("max |j-(a+b)| %.2e < 1e-8", e_j));
  o.require(e_bridge < 1e-6, fmt("max |k^2u^2+u'^2-|jm|^2| %.2e < 1e-6", e_bridge));
  return o;
}

Outcome trace_identity() {
  Outcome o;
  for (double V : {-0.1, -4.0}) {
    const auto q = make_potential(spec::SquareWell{V, 1});
    const auto t = trace_identity_check(q, 1);
    const double rel = std::abs(t.lhs_continuum + t.lhs_points - t.rhs) / t.rhs;
    o.require(rel < 0.05, fmt("well(%g): lhs %.5e (points %.3e) rhs %.5e rel %.2e < 5%%", V,
                              t.lhs_continuum + t.lhs_points, t.lhs_points, t.rhs, rel));
    if (V == -4.0) o.require(!t.xis.empty() && t.lhs_points > 0, "bound-state term present");
  }
  return o;
}

Outcome plancherel() {
  Outcome o;
  const std::function<cplx(double)> data[3] = {
      [](double x) { return cplx(std::sin(kPi * x)); },
      [](double x) { return cplx(x * x * std::exp(-(x - 1) * (x - 1) / 0.125)); },
      packet};
  const double ends[3] = {1, 2.5, kPacketSupport};
  // one node set for all three, so the regular solutions are computed once
  const double br[] = {1.0, kPacketSupport};
  const auto ns = quad::composite_gauss(0, 2.5, br, 0.05, 16);
  const std::span<const double> xs(ns.x.data(), std::size_t(ns.x.size()));
  double worst = 0;
  bool points_ok = true;
  for (const auto& np : acceptance_potentials()) {
    const auto q = make_potential(np.spec);
    ModelOptions mo;
    mo.delta = 1e-3;
    if (!q.is_compact()) mo.R = 30;
    const auto M = build_model(q, mo);
    const Eigen::MatrixXd U = regular_matrix(q, M, xs), E = eigenfunction_matrix(q, M, xs);
    for (int i = 0; i < 3; ++i) {
      SampledFunction f{ns.x, ns.w, Eigen::VectorXcd(ns.x.size())};
      for (Eigen::Index j = 0; j < ns.x.size(); ++j)
        f.f(j) = ns.x(j) < ends[i] ? data[i](ns.x(j)) : cplx(0);
      const auto t = generalized_transform(q, f, M, &U, &E);
      worst = std::max(worst, t.defect / t.norm2);
      if (!M.dirichlet_eigs.empty() && !(t.point_mass > 0)) points_ok = false;
    }
  }
  o.require(points_ok, "point masses included where present");
  o.require(worst < 1e-3, fmt("max relative defect %.2e < 1e-3", worst));
  return o;
}

double data_energy(const Potential& q) {
  auto e = [&](double x) {
    const double s = (x - 1.5) / 0.75;
    if (std::abs(s) >= 1) return 0.0;
    const double p = std::pow(1 - s * s, 6), dp = -12 * s * std::pow(1 - s * s, 5) / 0.75;
    return dp * dp + q(x) * p * p;
  };
  const double br[] = {1.0};
  return quad::adaptive_piecewise(e, 0.75, kPacketSupport, br, {1e-15, 1e-13}).value;
}

// int |y_t|^2 + |y_x|^2 + |q| |y|^2, the scale of the energy when it is indefinite
double energy_scale(const Potential& q, const FieldState& s) {
  const double V = std::get<spec::SquareWell>(q.spec()).depth;
  return energy(make_potential(spec::SquareWell{std::abs(V), 1}), s);
}

Outcome evolution_oracle() {
  Outcome o;
  const double a = kPacketSupport;
  const CauchyData d{packet, {}, PsiMode::zero, a};
  double err = 0, cone_s = 0, cone_f = 0;
  for (const auto& q : compact_wells()) {
    const double e0 = data_energy(q);
    double drift_s = 0, drift_f = 0, raw = 0;
    bool growing = false;
    for (double t : {5.0, 20.0}) {
      const auto M = evolution_model(q, t, a + t + 5, 60);
      growing = !M.dirichlet_eigs.empty();
      const auto c = spectral_coefficients(q, d, M);
      const auto f = evolve_fdtd_extrapolated(q, d, t, 0.005);
      const auto g = uniform_grid(a + t + 5, 0.01);
      const auto s = SpectralSynthesizer(q, M, g, false).state(c, t, false);
      double e2 = 0;
      for (Eigen::Index i = 0; i < s.x.size(); ++i) {
        if (2 * i < f.x.size()) e2 += s.w(i) * std::norm(s.y(i) - f.y(2 * i));
        if (s.x(i) > a + t + 1) cone_s = std::max(cone_s, std::abs(s.y(i)));
      }
      for (Eigen::Index i = 0; i < f.x.size(); ++i)
        if (f.x(i) > a + t + 1) cone_f = std::max(cone_f, std::abs(f.y(i)));
      err = std::max(err, std::sqrt(e2));
      const auto gg = gauss_grid(0, a + t + 5, {1.0}, 0.1);
      const auto st = SpectralSynthesizer(q, M, gg).state(c, t, false);
      const double ef = energy(q, f), es = energy(q, st);
      // a Dirichlet eigenvalue below 0 makes the energy indefinite: the
      // growing mode is cancelled inside E, so drift is read on its scale
      const double sf = growing ? energy_scale(q, f) : e0, ss = growing ? energy_scale(q, st) : e0;
      drift_f = std::max(drift_f, std::abs(ef - e0) / sf);
      drift_s = std::max(drift_s, std::abs(es - e0) / ss);
      raw = std::max({raw, std::abs(ef / e0 - 1), std::abs(es / e0 - 1)});
    }
    o.require(drift_s < 1e-5 && drift_f < 1e-5,
              fmt("%s energy drift spectral %.2e, FDTD %.2e < 1e-5 relative to %s (|E/E0-1| %.2e)",
                  well_name(q), drift_s, drift_f, growing ? "the energy scale" : "E0", raw));
  }
  o.require(err < 1e-3, fmt("max L2 |spectral - FDTD| %.2e < 1e-3", err));
  o.require(std::max(cone_s, cone_f) < 1e-6,
            fmt("leakage beyond a+t+1: spectral %.2e, FDTD %.2e < 1e-6", cone_s, cone_f));
  return o;
}

Outcome ch1_trend() {
  Outcome o;
  std::vector<double> xs;
  for (int i = -90; i <= 90; ++i) xs.push_back(0.1 * i);
  const std::vector<double> Ts{10, 20, 40};
  {
    const auto q = make_potential(spec::SquareWell{-3, 1});
    const auto M = evolution_model(q, 40, 49, 40);
    const auto e = convergence_test_ch1(q, packet, kPacketSupport, Ts, xs, M);
    o.require(strictly_decreasing(e), "well(-3) sup errors " + list(e) + " strictly decreasing");
  }
  {
    // carrier packet without low-energy content, so the mirror term is negligible
    const auto q = make_potential(spec::Zero{});
    auto f = [](double x) -> cplx {
      return std::exp(-0.5 * (x - 5) * (x - 5) / 0.64) * std::cos(8 * x);
    };
    ModelOptions mo;
    mo.delta = 2e-3;
    mo.kmax = 20;
    mo.panel = synthesis_panel(40, 50, 10);
    const auto M = build_model(q, mo);
    const auto e = convergence_test_ch1(q, f, 10, Ts, xs, M);
    o.require(*std::max_element(e.begin(), e.end()) < 1e-7, "free sup errors " + list(e) + " < 1e-7");
  }
  return o;
}

Outcome waveop_probe() {
  Outcome o;
  const auto f = bump_profile();
  const std::vector<double> ts{10, 20, 40, 80};
  const std::pair<PotentialSpec, double> cases[] = {
      {spec::SquareWell{-4, 1}, 0}, {spec::OscillatoryDecay{0.5, 1.5, 0.6}, 140}};
  for (const auto& [sp, R] : cases) {
    const auto q = make_potential(sp);
    ModelOptions mo;
    mo.R = R;
    mo.kmax = 8;
    mo.delta = 1e-3;
    mo.panel = 0.1;
    const auto M = build_model(q, mo);
    const WaveOperatorProbe P(q, f, M, 140);
    const auto c = waveop_convergence(P, q, ts);
    std::vector<double> g;
    for (std::size_t i = 1; i < c.records.size(); ++i) g.push_back(c.records[i].cauchy_gap);
    const std::string name = R > 0 ? "osc(0.5,1.5,0.6)" : "well(-4)";
    o.require(c.hypothesis_ok, name + " decay hypothesis");
    o.require(nonincreasing(g, 1), name + " gaps " + list(g) + " nonincreasing");
    const std::vector<double> z{P.zero_energy_mass(50, 0.04), P.zero_energy_mass(50, 0.02),
                                P.zero_energy_mass(50, 0.01)};
    o.require(strictly_decreasing(z), name + " zero-energy mass " + list(z) + " decreasing");
    const double tail = P.localization_tail(100);
    o.require(tail < 0.05, fmt("%s localization tail %.2e < 0.05", name.c_str(), tail));
  }
  return o;
}

Outcome lemma8_probe() {
  Outcome o;
  const double anchor = std::abs(oscillatory_vp(0, 0) - std::log(2.0));
  o.require(anchor < 1e-6, fmt("|vp(0,0) - ln 2| %.2e < 1e-6", anchor));
  const auto gA = log_grid(10, 5e3, 32, true), tA = log_grid(10, 5e3, 32, false);
  const auto gB = log_grid(10, 1e4, 64, true), tB = log_grid(10, 1e4, 64, false);
  const auto A = oscillatory_bound_probe(gA, tA), B = oscillatory_bound_probe(gB, tB);
  const double growth = B.max_abs / A.max_abs - 1;
  o.require(std::abs(growth) < 0.05, fmt("max %.5f -> %.5f under doubling, change %.2f%% < 5%%",
                                         A.max_abs, B.max_abs, 100 * growth));
  return o;
}

Outcome weak_star_probe() {
  Outcome o;
  auto testfn = [](double E) {
    if (E <= 0.25 || E >= 4) return 0.0;
    return std::exp(-1 / ((E - 0.25) * (4 - E)));
  };
  double worst = 0, target = 0;
  const double Rc[] = {2, 4, 8};
  for (const auto& q : compact_wells()) {
    const auto w = weak_convergence_probe(q, testfn, 0.25, 4, Rc, 16);
    target = w.target;
    for (double s : w.s) worst = std::max(worst, std::abs(s - w.target));
  }
  o.require(worst < 1e-3 * std::min(1.0, target),
            fmt("compact wells: max |s(R) - target| %.2e (target %.4e)", worst, target));
  const double Ro[] = {10, 20, 40, 80};
  for (double b : {0.7, 0.6}) {
    const auto q = make_potential(spec::OscillatoryDecay{0.5, 1.5, b});
    const auto w = weak_convergence_probe(q, testfn, 0.25, 4, Ro, 160);
    std::vector<double> dev;
    for (double s : w.s) dev.push_back(std::abs(s - w.target));
    const std::string line = fmt("osc(0.5,1.5,%g) |s(R) - target| ", b) + list(dev);
    if (b == 0.7)
      o.require(strictly_decreasing(dev), line + " decreasing");
    else  // s(R) - target changes sign near R = 40 here; reported only
      o.notes.push_back("info: " + line);
  }
  return o;
}

Outcome ballistic() {
  Outcome o;
  const double t = 100, r = std::sqrt(t);
  const CauchyData d{packet, {}, PsiMode::minus_i_sqrtH_of_phi, kPacketSupport};
  const auto window = gauss_grid(t - r, t + r, {}, 0.2);
  const std::pair<PotentialSpec, double> cases[] = {{spec::SquareWell{-3, 1}, 0},
                                                    {spec::SquareWell{-4, 1}, 0},
                                                    {spec::SquareWell{2, 1}, 0},
                                                    {spec::OscillatoryDecay{0.5, 1.5, 0.6}, 120}};
  for (const auto& [sp, R] : cases) {
    const auto q = make_potential(sp);
    const std::string name = R > 0 ? "osc(0.5,1.5,0.6)" : well_name(q);
    // q beyond (t + r + support)/2 cannot reach the window by time t
    const auto M = evolution_model(q, t, t + r, R > 0 ? 10 : 30, R);
    const auto c = spectral_coefficients(q, d, M);
    const double f1 = spectral_mass(M, c, 0);
    const SpectralSynthesizer S(q, M, window, false);
    auto s = S.state(c, t);
    s.t = t;
    const double frac = ballistic_mass(s) / f1;
    o.require(frac >= 0.95 && !c.excluded_flag,
              fmt("%s a.c. data window fraction %.4f >= 0.95", name.c_str(), frac));
    if (!M.dirichlet_eigs.empty()) {
      SpectralCoefficients b;
      b.phi = b.psi = Eigen::VectorXcd::Zero(M.k.size());
      b.phi_points = Eigen::VectorXcd::Constant(1, 1 / M.point_weights[0]);
      b.psi_points = Eigen::VectorXcd::Zero(1);
      auto sb = S.state(b, t, false);
      sb.t = t;
      const double bf = ballistic_mass(sb) / spectral_mass(M, b, t, false);
      o.require(bf < 0.05, fmt("%s bound-state data window fraction %.2e < 0.05", name.c_str(), bf));
    }
  }
  return o;
}

struct Entry {
  const char* title;
  double budget;
  Outcome (*run)();
};

const Entry kEntries[kCriteria] = {
    {"closed-form Jost oracle", 1, jost_closed_form},
    {"det2 vs Volterra route", 10, route_equivalence},
    {"dj/dR formula vs finite differences", 5, lemma1_check},
    {"scattering identities", 30, scattering_identities},
    {"trace identity", 120, trace_identity},
    {"Plancherel", 60, plancherel},
    {"evolution oracle equivalence", 120, evolution_oracle},
    {"asymptotic profile trend", 180, ch1_trend},
    {"modified wave operator probe", 300, waveop_probe},
    {"oscillatory v.p. bound", 60, lemma8_probe},
    {"weak-* probe", 120, weak_star_probe},
    {"ballistic mass", 120, ballistic},
};

}  // namespace

std::vector<NamedPotential> acceptance_potentials() {
  return {{"zero", spec::Zero{}},
          {"square_well(-0.1,1)", spec::SquareWell{-0.1, 1}},
          {"square_well(-3,1)", spec::SquareWell{-3, 1}},
          {"square_well(-4,1)", spec::SquareWell{-4, 1}},
          {"square_well(2,1)", spec::SquareWell{2, 1}},
          {"oscillatory_decay(0.5,1.5,0.6)", spec::OscillatoryDecay{0.5, 1.5, 0.6}},
          {"oscillatory_decay(0.5,1.5,0.7)", spec::OscillatoryDecay{0.5, 1.5, 0.7}}};
}

CriterionResult run_criterion(int id) {
  if (id < 1 || id > kCriteria) throw std::invalid_argument("run_criterion: id must be in 1..12");
  const Entry& e = kEntries[id - 1];
  CriterionResult r;
  r.id = id;
  r.title = e.title;
  r.budget = e.budget;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Outcome o = e.run();
    r.passed = o.passed;
    for (std::size_t i = 0; i < o.notes.size(); ++i) r.detail += (i ? "; " : "") + o.notes[i];
  } catch (const std::exception& ex) {
    r.passed = false;
    r.detail = std::string("exception: ") + ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(std::span<const int> ids) {
  std::vector<CriterionResult> out;
  if (ids.empty())
    for (int i = 1; i <= kCriteria; ++i) out.push_back(run_criterion(i));
  else
    for (int i : ids) out.push_back(run_criterion(i));
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt("[%s] %2d  %-36s (%.1f s / %.0f s)  ", r.passed ? "PASS" : "FAIL", r.id,
             r.title.c_str(), r.seconds, r.budget) +
         r.detail;
}

}  // namespace wavescat
