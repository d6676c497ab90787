#include <doctest.h>

#include "oracles.hpp"
#include "wavescat/quadrature.hpp"
#include "wavescat/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace wavescat;

namespace {
constexpr double kPi = std::numbers::pi;
const cplx I{0, 1};

double bump(double x, double c, double s) { return std::exp(-(x - c) * (x - c) / (2 * s * s)); }
}  // namespace

TEST_CASE("free regular solution") {
  const auto q = make_potential(spec::Zero{});
  for (cplx k : {cplx(1.3), cplx(0.4, 0.9)}) {
    const auto r = regular_solution(q, k, 6.0);
    CHECK(r.u.front() == cplx(0));
    CHECK(r.uprime.front() == cplx(1));
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
      CHECK(std::abs(r.u[i] - std::sin(k * r.grid[i]) / k) < 1e-8);
      CHECK(std::abs(r.uprime[i] - std::cos(k * r.grid[i])) < 1e-8);
    }
  }
}

TEST_CASE("regular solution in the square well") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  const double samples[] = {0.25, 0.5, 0.75, 1.0, 2.5};
  const auto r = regular_solution(q, 1.0, 3.0, {}, samples);
  const double u1 = std::sin(2.0) / 2, du1 = std::cos(2.0);
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const double x = r.grid[i];
    const double u = x <= 1 ? std::sin(2 * x) / 2 : u1 * std::cos(x - 1) + du1 * std::sin(x - 1);
    CHECK(std::abs(r.u[i] - u) < 1e-8);
  }
}

TEST_CASE("regular solution bridges to the modified Jost function") {
  const auto well = make_potential(spec::SquareWell{-3, 1});
  const auto osc = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6}).truncate(12);
  for (const Potential* q : {&well, &osc}) {
    const double R = q->support_bound();
    for (double k : {0.3, 1.0, 2.7}) {
      const auto d = solve_psi(*q, k, R);
      const auto r = regular_solution(*q, k, R);
      const cplx u = r.u.back(), du = r.uprime.back();
      CHECK(std::abs(k * k * u * u + du * du - std::norm(d.jm)) < 1e-6);
      const cplx bridge = (std::conj(d.jm) * std::exp(I * (R * k - d.phi0)) -
                           d.jm * std::exp(-I * (R * k - d.phi0))) /
                          (2.0 * I * k);
      CHECK(std::abs(u - bridge) < 1e-6);
    }
  }
}

TEST_CASE("energy invariant of the regular solution beyond the support") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  const double k = 1.7;
  const double samples[] = {1.5, 3.0, 6.0};
  const auto r = regular_solution(q, k, 8.0, {}, samples);
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    if (r.grid[i] >= 1) {
      const double e = std::abs(k * k * r.u[i] * r.u[i] + r.uprime[i] * r.uprime[i]);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
  CHECK(hi - lo < 1e-6);
}

TEST_CASE("Weyl function") {
  const auto zero = make_potential(spec::Zero{});
  CHECK(std::abs(m_function(zero, I, 3) - cplx(-1)) < 1e-15);
  CHECK(std::abs(m_function(zero, {2, 0.5}, 3) - I * cplx(2, 0.5)) < 1e-14);
  const auto q = make_potential(spec::SquareWell{-3, 1});
  const cplx k{1, 0.2};
  const cplx m = oracle::well_jost_prime(k, 3) / oracle::well_jost(k, 3);
  CHECK(std::abs(m_function(q, k, 1) - m) < 1e-7);
  for (double t : {0.3, 1.0, 4.0}) {
    const double mu = spectral_density(q, t, 1);
    CHECK(std::abs(m_function(q, t, 1).imag() / kPi - mu) < 1e-6);
    CHECK(std::abs(kPi * mu - t / std::norm(solve_psi(q, t, 1).j)) < 1e-6);
  }
}

TEST_CASE("spectral density") {
  const auto zero = make_potential(spec::Zero{});
  CHECK(std::abs(spectral_density(zero, 1.7, 5) - 1.7 / kPi) < 1e-15);
  const auto q = make_potential(spec::SquareWell{-3, 1});
  const cplx jm = std::exp(I * 1.5) * oracle::well_jost(1.0, 3);
  CHECK(std::abs(spectral_density(q, 1.0, 1) - 1 / (kPi * std::norm(jm))) < 1e-8);
  const auto barrier = make_potential(spec::SquareWell{2, 1});
  for (int i = 1; i <= 60; ++i) {
    const double t = 0.05 * i;
    const auto d = solve_psi(barrier, t, 1);
    CHECK(spectral_density(barrier, t, 1) > 0);
    const double ratio = normalized_ratio(d);
    CHECK(ratio >= 1 - 1e-6);
    const auto s = scattering_ab(d);
    const double T = 1 / std::norm(s.a), r2 = std::norm(s.b / s.a);
    CHECK(std::abs(T + r2 - 1) < 1e-6);
    CHECK(std::abs(ratio - std::norm(s.a)) < 1e-8 * ratio);
  }
}

TEST_CASE("density R-doubling for a non-compact potential") {
  const auto q = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.7});
  const auto e = spectral_density_checked(q, 1.5, 40, 1e-3);
  CHECK(e.converged);
  CHECK(e.R_used >= 80);
  const auto w = make_potential(spec::SquareWell{-3, 1});
  const auto c = spectral_density_checked(w, 1.5, 2);
  CHECK(c.doubling_gap == 0);
  CHECK(c.R_used == 2);
}

TEST_CASE("bound states") {
  const auto zero = make_potential(spec::Zero{});
  CHECK(bound_states(zero, 1, BoundStateKind::line_glued).values.empty());
  CHECK(bound_states(zero, 1, BoundStateKind::halfline_dirichlet).values.empty());
  const auto barrier = make_potential(spec::SquareWell{2, 1});
  CHECK(bound_states(barrier, 1, BoundStateKind::line_glued).values.empty());
  CHECK(bound_states(barrier, 1, BoundStateKind::halfline_dirichlet).values.empty());

  const auto q = make_potential(spec::SquareWell{-4, 1});
  // Dirichlet: K cot K = -kappa, K = sqrt(4 - kappa^2)
  const double kappa = oracle::bisect(
      [](double x) {
        const double K = std::sqrt(4 - x * x);
        return K * std::cos(K) + x * std::sin(K);
      },
      1e-6, 2 - 1e-9);
  const auto dir = bound_states(q, 1, BoundStateKind::halfline_dirichlet);
  REQUIRE(dir.values.size() == 1);
  CHECK(std::abs(dir.values[0] - kappa) < 1e-9);
  CHECK_FALSE(dir.threshold_warning);
  // full line, well symmetric about 1/2: even state K tan(K/2) = xi
  const double xi = oracle::bisect(
      [](double x) {
        const double K = std::sqrt(4 - x * x);
        return K * std::sin(K / 2) - x * std::cos(K / 2);
      },
      1e-6, 2 - 1e-9);
  const auto line = bound_states(q, 1, BoundStateKind::line_glued);
  REQUIRE(line.values.size() == 1);
  CHECK(std::abs(line.values[0] - xi) < 1e-9);

  // a shallow well always binds on the line but not with a Dirichlet wall
  const auto shallow = make_potential(spec::SquareWell{-0.1, 1});
  CHECK(bound_states(shallow, 1, BoundStateKind::line_glued).values.size() == 1);
  CHECK(bound_states(shallow, 1, BoundStateKind::halfline_dirichlet).values.empty());
}

TEST_CASE("modified Blaschke product") {
  CHECK(BlaschkeProduct{}({1, 1}) == cplx(1));
  const cplx k{0.3, 1.2};
  double prev = 1e300;
  for (double xi = 0.4; xi > 1e-3; xi /= 2) {
    const double dev = std::abs(BlaschkeProduct{{xi}}(k) - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(std::abs(BlaschkeProduct{{0.5}}(I * 0.5)) < 1e-15);
}

TEST_CASE("generalized transform of the indicator, free case") {
  const auto zero = make_potential(spec::Zero{});
  ModelOptions mo;
  mo.delta = 1e-3;
  mo.kmax = 400;
  mo.panel = 1.0;
  const auto M = build_model(zero, mo);
  const auto f = sample_function([](double) { return cplx(1); }, 0, 1, 0.01);
  const auto t = generalized_transform(zero, f, M);
  for (Eigen::Index i = 0; i < M.k.size(); i += 97) {
    const double k = M.k(i);
    CHECK(std::abs(t.fb(i) - 2 * std::pow(std::sin(k / 2) / k, 2)) < 1e-12);
  }
  // (2/pi) int_K^inf (1 - cos k)^2 / k^2 dk ~ 3 / (pi K)
  const double tail = 3 / (kPi * mo.kmax);
  CHECK(std::abs(t.continuum + tail - 1) < 1e-4);
}

TEST_CASE("Plancherel with and without the point mass") {
  const auto zero = make_potential(spec::Zero{});
  ModelOptions mo;
  mo.delta = 1e-3;
  const auto M0 = build_model(zero, mo);
  const auto s = sample_function([](double x) { return cplx(std::sin(kPi * x)); }, 0, 1);
  CHECK(generalized_transform(zero, s, M0).defect < 1e-4);

  const auto q = make_potential(spec::SquareWell{-4, 1});
  const auto M = build_model(q, mo);
  REQUIRE(M.dirichlet_eigs.size() == 1);
  const auto f = sample_function([](double x) { return cplx(x * x * bump(x, 1, 0.25)); }, 0, 2.5);
  const auto t = generalized_transform(q, f, M);
  CHECK(t.defect < 1e-3);
  CHECK_FALSE(t.truncation_flag);
  // control: dropping the eigenvalue breaks the identity
  CHECK(std::abs(t.continuum - t.norm2) > 1e-3);
  CHECK(t.point_mass > 0.1 * t.norm2);
}

TEST_CASE("trace identity") {
  const auto zero = make_potential(spec::Zero{});
  const auto t0 = trace_identity_check(zero, 1);
  CHECK(t0.lhs_continuum == 0);
  CHECK(t0.lhs_points == 0);
  CHECK(t0.rhs == 0);
  for (double V : {-0.1, -4.0}) {
    const auto q = make_potential(spec::SquareWell{V, 1});
    const auto t = trace_identity_check(q, 1);
    CAPTURE(V);
    CHECK(t.rhs == doctest::Approx(V * V / 8).epsilon(1e-12));
    CHECK(std::abs(t.lhs_continuum + t.lhs_points - t.rhs) < 0.05 * t.rhs);
    CHECK(t.xis.size() == 1);
    CHECK_FALSE(t.tail_flag);
  }
}

TEST_CASE("multiplicative representation of am") {
  const auto zero = make_potential(spec::Zero{});
  CHECK(am_factorization(zero, {1, 1}, 1).am == cplx(1));
  const auto q = make_potential(spec::SquareWell{-0.1, 1});
  const auto f = am_factorization(q, {1, 1}, 1);
  CHECK(std::abs(f.am - f.direct) < 1e-3);
  CHECK_FALSE(f.inconclusive);
  const auto w = make_potential(spec::SquareWell{-4, 1});
  const auto g = am_factorization(w, {0.5, 0.7}, 1);
  CHECK(std::abs(g.am - g.direct) < 1e-3);
  // y^3 |am(iy) - 1| approaches int q^2 / 8
  double prev = 1e300;
  for (double y : {5.0, 10.0, 20.0}) {
    const cplx am = solve_psi(w, I * y, 1).am;
    const double dev = std::abs(y * y * y * std::abs(am - 1.0) - w.l2_moment() / 8);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("mu from the model matches Im m / pi") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  ModelOptions mo;
  mo.kmax = 10;
  const auto M = build_model(q, mo);
  for (Eigen::Index i = 0; i < M.k.size(); ++i)
    CHECK(std::abs(M.m(i).imag() / kPi - M.mu(i)) < 1e-6 * std::max(1.0, M.mu(i)));
  CHECK(M.mu.minCoeff() >= 0);
}

TEST_CASE("entropy bound") {
  // ln mu(t^2) >= ln(t / 4 pi) - L(t) and (1/pi) int t^2 L <= int q^2 / 8 give
  // int_I ln mu >= -C1 - C2 int q^2 with C1 = -int_I ln(t/4pi), C2 = pi/(8 t0^2)
  const double t0 = 0.5, t1 = 3;
  const double C1 = -((t1 * std::log(t1 / (4 * kPi)) - t1) - (t0 * std::log(t0 / (4 * kPi)) - t0));
  const double C2 = kPi / (8 * t0 * t0);
  for (double V : {-4.0, -3.0, 2.0, -0.1}) {
    const auto q = make_potential(spec::SquareWell{V, 1});
    const auto ns = quad::composite_gauss(t0, t1, {}, 0.1, 16);
    double s = 0;
    for (Eigen::Index i = 0; i < ns.x.size(); ++i)
      s += ns.w(i) * std::log(spectral_density(q, ns.x(i), 1));
    CHECK(s > -C1 - C2 * q.l2_moment());
  }
}

TEST_CASE("uniform bound on the local spectral energy") {
  // sup over s of int (E u^2 + u'^2)/(E^2 + 1) drho stays finite and stable
  const auto q = make_potential(spec::SquareWell{-3, 1});
  ModelOptions mo;
  mo.delta = 1e-3;
  mo.kmax = 100;
  mo.panel = 0.5;
  const auto M = build_model(q, mo);
  const double ss[] = {0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> vals(5, 0.0);
  for (Eigen::Index i = 0; i < M.k.size(); ++i) {
    const double k = M.k(i), E = k * k;
    const auto d = solve_psi(q, k, 1);
    for (int c = 0; c < 5; ++c) {
      const auto [j, dj] = d.solution_at(ss[c]);
      const double u = (std::conj(d.j) * j).imag() / k, du = (std::conj(d.j) * dj).imag() / k;
      vals[c] += M.drho(i) * (E * u * u + du * du) / (E * E + 1);
    }
  }
  for (std::size_t p = 0; p < M.dirichlet_eigs.size(); ++p) {
    const double kap = M.dirichlet_eigs[p], E = -kap * kap;
    const auto d = solve_psi(q, I * kap, 1);
    for (int c = 0; c < 5; ++c) {
      const auto [j, dj] = d.solution_at(ss[c]);
      const double u = j.real() / d.jprime0.real(), du = dj.real() / d.jprime0.real();
      vals[c] += M.point_weights[p] * (std::abs(E) * u * u + du * du) / (E * E + 1);
    }
  }
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  CHECK(std::isfinite(*hi));
  CHECK(*hi < 2 * *lo);
}

TEST_CASE("weak convergence probe") {
  auto testfn = [](double E) {
    if (E <= 0.25 || E >= 4) return 0.0;
    return std::exp(-1 / ((E - 0.25) * (4 - E)));
  };
  const auto zero = make_potential(spec::Zero{});
  const double R0[] = {1, 2};
  const auto z = weak_convergence_probe(zero, testfn, 0.25, 4, R0, 4);
  for (double s : z.s) CHECK(s == doctest::Approx(z.target).epsilon(1e-14));
  const auto q = make_potential(spec::SquareWell{-4, 1});
  const double R[] = {2, 4, 8};
  const auto w = weak_convergence_probe(q, testfn, 0.25, 4, R, 16);
  for (double s : w.s) CHECK(std::abs(s - w.target) < 1e-3 * w.target);
}

TEST_CASE("jm ratio convergence") {
  const auto zero = make_potential(spec::Zero{});
  const double R[] = {2, 4};
  for (double v : jm_ratio_convergence(zero, 0.5, 2, R)) CHECK(v == 0);
  const auto q = make_potential(spec::SquareWell{-3, 1});
  for (double v : jm_ratio_convergence(q, 0.5, 2, R)) CHECK(v < 1e-10);
  const auto osc = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.7});
  const double Rs[] = {10, 20, 40};
  const auto d = jm_ratio_convergence(osc, 0.5, 2, Rs, 160);
  CHECK(d[1] < d[0]);
  CHECK(d[2] < d[1]);
}
