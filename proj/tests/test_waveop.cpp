#include "doctest.h"

#include "wavescat/quadrature.hpp"
#include "wavescat/waveop.hpp"

#include <cmath>
#include <numbers>

using namespace wavescat;

namespace {

constexpr double kPi = std::numbers::pi;

bool nonincreasing(const std::vector<double>& v, int allowed = 0) {
  int bad = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) ++bad;
  return bad <= allowed;
}

SpectralModel waveop_model(const Potential& q, double R = 0) {
  ModelOptions mo;
  mo.R = R;
  mo.kmax = 8;
  mo.delta = 1e-3;
  mo.panel = 0.1;
  return build_model(q, mo);
}

std::vector<double> gaps(const WaveopConvergence& c) {
  std::vector<double> g;
  for (std::size_t i = 1; i < c.records.size(); ++i) g.push_back(c.records[i].cauchy_gap);
  return g;
}

// ||W(t) f||^2 over a window wide enough to hold all of it
double line_mass(const Potential& q, const BandLimited& f, double t, double half = 120) {
  const auto ns = quad::composite_gauss(t - half, t + half, {}, 0.25, 16);
  const auto W = apply_W(q, f, t, std::span<const double>(ns.x.data(), std::size_t(ns.x.size())));
  return (ns.w.array() * W.samples.array().abs2()).sum();
}

}  // namespace

TEST_CASE("multiplier closed forms") {
  const auto zero = make_potential(spec::Zero{});
  const auto well = make_potential(spec::SquareWell{-4, 1});
  for (double t : {0.0, 0.5, 3.0})
    for (double k : {0.3, 1.0, 2.5})
      CHECK(std::abs(multiplier(zero, t, k) - std::exp(cplx(0, k * t))) < 1e-14);
  for (double t : {1.0, 2.0, 17.0}) {
    CHECK(std::abs(multiplier(well, t, 1) - std::exp(cplx(0, t - 2))) < 1e-12);
    CHECK(std::abs(std::abs(multiplier(well, t, 0.05)) - 1) < 1e-15);
  }
  CHECK_THROWS_AS(multiplier(well, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(multiplier(well, 1, -1), std::invalid_argument);
}

TEST_CASE("omega values and decay") {
  CHECK(omega(make_potential(spec::Zero{}), 5) == 0);
  CHECK(omega(make_potential(spec::SquareWell{-4, 1}), 16) == doctest::Approx(1).epsilon(1e-12));
  const auto osc = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6});
  const double w2 = omega(osc, 1e2), w3 = omega(osc, 1e3), w4 = omega(osc, 1e4);
  CHECK(w3 < w2);
  CHECK(w4 < w3);
  CHECK_THROWS_AS(omega(osc, 0), std::invalid_argument);
}

TEST_CASE("apply_W at t = 0 against adaptive quadrature and free translation") {
  const auto q = make_potential(spec::Zero{});
  const auto f = bump_profile();
  const std::vector<double> xs{-3, 0, 0.7, 2, 5, 11};
  const auto W0 = apply_W(q, f, 0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const auto r = quad::adaptive(
        [&](double k) { return std::exp(cplx(0, -k * x)) * f.fhat(k); }, f.a, f.b, {1e-15, 1e-13});
    CHECK(std::abs(W0.samples(Eigen::Index(i)) - r.value / (2 * kPi)) < 1e-9);
  }
  std::vector<double> shifted;
  for (double x : xs) shifted.push_back(x + 7);
  const auto W7 = apply_W(q, f, 7, shifted);
  CHECK((W7.samples - W0.samples).cwiseAbs().maxCoeff() < 1e-10);

  BandLimited touching = f;
  touching.a = 0;
  CHECK_THROWS_AS(apply_W(q, touching, 1, xs), std::invalid_argument);
}

TEST_CASE("W(t) is unitary on the line") {
  const auto f = bump_profile();
  const double n2 = f.norm2();
  for (const auto& q : {make_potential(spec::Zero{}), make_potential(spec::SquareWell{-4, 1}),
                        make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6})})
    for (double t : {0.0, 20.0, 100.0}) CHECK(std::abs(line_mass(q, f, t) / n2 - 1) < 1e-3);
}

TEST_CASE("localization second moment stays under its bound") {
  const auto f = bump_profile();
  const auto free = localization_moment(make_potential(spec::Zero{}), f, 50);
  // without a potential the bound is Plancherel for (x - t) W f
  CHECK(free.moment == doctest::Approx(free.bound).epsilon(1e-6));
  for (const auto& q : {make_potential(spec::SquareWell{-4, 1}),
                        make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6})})
    for (double t : {10.0, 100.0}) {
      const auto m = localization_moment(q, f, t);
      CHECK(m.moment <= m.bound * (1 + 1e-6));
    }
}

TEST_CASE("decay hypothesis on samples") {
  CHECK(decay_hypothesis(make_potential(spec::SquareWell{-4, 1}), 100));
  CHECK(decay_hypothesis(make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6}), 140));
  CHECK(decay_hypothesis(make_potential(spec::OscillatoryDecay{1, 1, 0.51}), 1e4));
}

TEST_CASE("free wave operator: gaps fall off with the mirror term") {
  const auto q = make_potential(spec::Zero{});
  const auto f = bump_profile();
  const auto M = waveop_model(q);
  const WaveOperatorProbe P(q, f, M, 140);
  const std::vector<double> ts{10, 20, 40, 80};
  const auto c = waveop_convergence(P, q, ts);
  CHECK(c.hypothesis_ok);
  CHECK(std::isnan(c.records[0].cauchy_gap));
  const auto g = gaps(c);
  CHECK(nonincreasing(g));
  CHECK(g.back() < 1e-4);
  // part of W(10) f still lies at x < 0, off the half-line
  for (const auto& r : c.records)
    if (r.t >= 20) CHECK(r.zero_energy_mass < 1e-10);
  CHECK(std::abs(P.norm(P.limit_candidate()) - std::sqrt(f.norm2())) < 1e-6);

  // the surviving Cesaro mean is the integrated mirror term over T
  const double Ts[] = {20, 40, 80};
  const auto m = cesaro_gaps(P, Ts, 2.0);
  CHECK(m[1] * 40 == doctest::Approx(m[0] * 20).epsilon(0.01));
  CHECK(m[2] * 80 == doctest::Approx(m[0] * 20).epsilon(0.01));
}

TEST_CASE("square well: Cauchy gaps, zero-energy mass and Cesaro means decrease") {
  const auto q = make_potential(spec::SquareWell{-4, 1});
  const auto f = bump_profile();
  const auto M = waveop_model(q);
  REQUIRE(M.dirichlet_eigs.size() == 1);
  const WaveOperatorProbe P(q, f, M, 140);
  const std::vector<double> ts{10, 20, 40, 80};
  const auto c = waveop_convergence(P, q, ts);
  CHECK(nonincreasing(gaps(c)));
  for (const auto& r : c.records) CHECK(std::abs(r.norm / std::sqrt(f.norm2()) - 1) < 1e-3);
  CHECK(c.records.back().localization_tail < 0.05);

  const double z1 = P.zero_energy_mass(50, 0.04), z2 = P.zero_energy_mass(50, 0.02),
               z3 = P.zero_energy_mass(50, 0.01);
  CHECK(z2 < z1);
  CHECK(z3 < z2);

  const double Ts[] = {20, 40, 80};
  const auto m = cesaro_gaps(P, Ts, 2.0);
  CHECK(m[1] < m[0]);
  CHECK(m[2] < m[1]);
  CHECK(cesaro_gap(P, 20, 2.0) == doctest::Approx(m[0]).epsilon(1e-12));
}

TEST_CASE("oscillatory decay: gaps decrease and the mass stays near x = t") {
  const auto q = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6});
  const auto f = bump_profile();
  const auto M = waveop_model(q, 140);
  const WaveOperatorProbe P(q, f, M, 140);
  const std::vector<double> ts{10, 20, 40, 80};
  const auto c = waveop_convergence(P, q, ts);
  CHECK(c.hypothesis_ok);
  CHECK(nonincreasing(gaps(c)));
  CHECK(P.localization_tail(100) < 0.05);
  const double z1 = P.zero_energy_mass(50, 0.04), z2 = P.zero_energy_mass(50, 0.02),
               z3 = P.zero_energy_mass(50, 0.01);
  CHECK(z2 < z1);
  CHECK(z3 < z2);
}

TEST_CASE("Cesaro means decrease without the decay hypothesis") {
  const auto q = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.55});
  const auto f = bump_profile();
  const auto M = waveop_model(q, 140);
  const WaveOperatorProbe P(q, f, M, 140);
  const double Ts[] = {20, 40, 80};
  const auto m = cesaro_gaps(P, Ts, 2.0);
  CHECK(m[1] < m[0]);
  CHECK(m[2] < m[1]);
  const double bad[] = {20, 10};
  CHECK_THROWS_AS(cesaro_gaps(P, bad), std::invalid_argument);
}

TEST_CASE("partial integrals of W(t) f stay bounded under refinement") {
  const auto q = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6});
  const auto f = bump_profile();
  std::vector<double> coarse, fine;
  for (int i = 0; i <= 10; ++i) coarse.push_back(20.0 * i);
  for (int i = 0; i <= 20; ++i) fine.push_back(10.0 * i);
  const std::vector<double> ks{0.5, 1, 2, 3, 5};
  const double a = partial_integral_sup(q, f, 50, coarse, ks);
  const double b = partial_integral_sup(q, f, 50, fine, ks);
  CHECK(b >= a * (1 - 1e-12));
  CHECK(b < 1.05 * a);
}

TEST_CASE("principal value integral") {
  // elementary anchor: v.p. int_{1/2}^2 d xi / (xi - 1) = ln 2
  CHECK(std::abs(oscillatory_vp(0, 0) - std::log(2.0)) < 1e-12);

  // symmetric exclusion of a small interval around the pole
  for (auto [g, T] : {std::pair{3.0, 5.0}, std::pair{-20.0, 7.0}, std::pair{40.0, 40.0}}) {
    const double eps = 1e-7;
    auto h = [&](double xi) { return std::exp(cplx(0, (xi - 1) * g + T / xi)) / (xi - 1); };
    const auto l = quad::adaptive(h, 0.5, 1 - eps, {1e-13, 1e-12});
    const auto r = quad::adaptive(h, 1 + eps, 2, {1e-13, 1e-12});
    CHECK(std::abs(oscillatory_vp(g, T) - (l.value + r.value)) < 1e-5);
  }

  // gamma = 0: bounded along a wide T sweep
  for (double T : {10.0, 1e2, 1e3, 1e4}) CHECK(std::abs(oscillatory_vp(0, T)) < 4);
}

TEST_CASE("oscillatory bound probe is stable on local refinement") {
  std::vector<double> g1, g2, t1, t2;
  for (int i = -30; i <= 30; ++i) g1.push_back(2.0 * i);
  for (int i = -60; i <= 60; ++i) g2.push_back(1.0 * i);
  for (int i = 0; i <= 20; ++i) t1.push_back(4.0 * i);
  for (int i = 0; i <= 40; ++i) t2.push_back(2.0 * i);
  const auto a = oscillatory_bound_probe(g1, t1);
  const auto b = oscillatory_bound_probe(g2, t2);
  CHECK(b.max_abs >= a.max_abs);
  CHECK(b.max_abs < 1.05 * a.max_abs);
  CHECK(std::abs(oscillatory_vp(a.argmax.first, a.argmax.second)) == doctest::Approx(a.max_abs));
}

TEST_CASE("log grid layout") {
  const auto s = log_grid(10, 1000, 3, true);
  REQUIRE(s.size() == 7);
  CHECK(s[0] == doctest::Approx(-1000));
  CHECK(s[3] == 0);
  CHECK(s[5] == doctest::Approx(100));
  CHECK(log_grid(10, 1000, 3, false).size() == 4);
  CHECK_THROWS_AS(log_grid(0, 10, 3, true), std::invalid_argument);
}
