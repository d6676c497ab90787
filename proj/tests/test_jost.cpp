#include <doctest.h>

#include "oracles.hpp"
#include "wavescat/jost.hpp"

#include <cmath>

using namespace wavescat;

TEST_CASE("free Jost data") {
  const auto q = make_potential(spec::Zero{});
  for (cplx k : {cplx(1, 0), cplx(0.3, 2), cplx(-2, 0.1)}) {
    const auto d = solve_psi(q, k, 10, {.tol = 1e-10});
    CHECK(d.jm == cplx(1));
    CHECK(d.j == cplx(1));
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
      CHECK(d.psi1[i] == cplx(1));
      CHECK(d.psi2[i] == cplx(0));
    }
    const auto s = scattering_ab(d);
    CHECK(std::abs(s.a - 1.0) < 1e-15);
    CHECK(std::abs(s.b) < 1e-15);
    CHECK(std::abs(s.am - 1.0) < 1e-15);
  }
  CHECK(wronskian_check(q, 1.0, 5) < 1e-14);
  CHECK(djost_dR(q, 1.0, 3) == cplx(0));
}

TEST_CASE("closed-form square well") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  for (cplx k : {cplx(0.5), cplx(1), cplx(2), cplx(1, 0.5), cplx(0, 2), cplx(1, 0.2)}) {
    CAPTURE(k);
    const auto d = solve_psi(q, k, 1.0);
    CHECK(std::abs(d.j - oracle::well_jost(k, 3)) < 1e-7);
    CHECK(std::abs(d.jprime0 - oracle::well_jost_prime(k, 3)) < 1e-7);
    // jm = e^{-i phi0} j with phi0 = -3/(2k)
    const cplx jm = std::exp(cplx(0, 1) * 3.0 / (2.0 * k)) * oracle::well_jost(k, 3);
    CHECK(std::abs(d.jm - jm) < 1e-7 * std::max(1.0, std::abs(jm)));
  }
}

TEST_CASE("Jost data invariants") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  const auto d = solve_psi(q, {1.3, 0}, 1.0);
  CHECK(d.psi1.back() == cplx(1));
  CHECK(d.psi2.back() == cplx(0));
  const cplx psi2_0 = d.psi2.front();
  CHECK(std::abs(d.jm - (d.psi1.front() + std::exp(-2.0 * cplx(0, 1) * d.phi0) * psi2_0)) < 1e-14);
  CHECK(std::abs(d.j - std::exp(cplx(0, 1) * d.phi0) * d.jm) < 1e-13);
  const auto s = scattering_ab(d);
  CHECK(std::abs(std::norm(s.a) - std::norm(s.b) - 1) < 1e-8);
  CHECK(std::abs(d.j - (s.a + s.b)) < 1e-8);
  CHECK(std::abs(s.am - s.am_direct) < 1e-8);
  CHECK(d.residual <= 1e-10);

  const auto sm = scattering_ab(q, {-1.3, 0}, 1.0);
  CHECK(std::abs(std::abs(s.a) - std::abs(sm.a)) < 1e-8);
  CHECK(std::abs(sm.a - std::conj(s.a)) < 1e-8);
}

TEST_CASE("R independence beyond the support") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  for (cplx k : {cplx(0.7, 0), cplx(1, 0.5)}) {
    const cplx a = modified_jost(q, k, 1.0), b = modified_jost(q, k, 3.5);
    CHECK(std::abs(a - b) < 1e-9);
  }
}

TEST_CASE("dj/dR against finite differences") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  const double h = 1e-4;
  for (double k : {0.6, 1.0, 2.5}) {
    for (double R : {0.2, 0.5, 0.8}) {
      const cplx fd = (solve_psi(q, k, R + h).j - solve_psi(q, k, R - h).j) / (2 * h);
      const cplx an = djost_dR(q, k, R);
      CHECK(std::abs(fd - an) < 1e-5);
    }
  }
  CHECK(djost_dR(q, 1.0, 2.0) == cplx(0));
}

TEST_CASE("Wronskian") {
  const auto well = make_potential(spec::SquareWell{-3, 1});
  CHECK(wronskian_check(well, 1.0, 1.0) < 1e-7);
  const auto osc = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6});
  CHECK(wronskian_check(osc, 2.0, 40) < 1e-6);
}

TEST_CASE("large imaginary k asymptotics of am") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  const double target = q.l2_moment() / 8;
  double prev = 1e300;
  for (double y : {10.0, 20.0, 40.0}) {
    const cplx k{0, y};
    const cplx am = scattering_ab(q, k, 1.0).am_direct;
    const double dev = std::abs(k * k * k * (am - 1.0) + target / cplx(0, 1));
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("iteration count bounded uniformly in R for Im k > 0") {
  const auto q = make_potential(spec::OscillatoryDecay{0.5, 1.5, 0.6});
  int worst = 0;
  for (double R : {10.0, 20.0, 40.0, 80.0})
    worst = std::max(worst, solve_psi(q, {0.8, 0.8}, R).iteration_count);
  CHECK(worst < 60);
}

TEST_CASE("invalid wavenumbers") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  CHECK_THROWS_AS(solve_psi(q, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_psi(q, {1, -0.1}, 1.0), std::invalid_argument);
}

TEST_CASE("interpolated solution matches the closed form inside the well") {
  const auto q = make_potential(spec::SquareWell{-3, 1});
  const cplx k{1.2, 0.3}, I{0, 1};
  const auto d = solve_psi(q, k, 1.0);
  const cplx kap = oracle::well_kappa(k, 3);
  for (double x : {0.0, 0.137, 0.5, 0.91}) {
    const cplx e = std::exp(I * k);
    const cplx j = e * (std::cos(kap * (x - 1)) + I * k / kap * std::sin(kap * (x - 1)));
    const cplx dj = e * (-kap * std::sin(kap * (x - 1)) + I * k * std::cos(kap * (x - 1)));
    const auto [jj, djj] = d.solution_at(x);
    CHECK(std::abs(jj - j) < 1e-8);
    CHECK(std::abs(djj - dj) < 1e-8);
  }
}
