#pragma once

#include "wavescat/potential.hpp"

#include <utility>
#include <vector>

namespace wavescat {

struct JostOptions {
  double tol = 1e-10;
  int order = 16;                // Chebyshev-Lobatto order per panel
  double max_panel = 0.25;
  double panel_mass = 4.0;       // bound on int |q| / (2|k|) over one panel
  double phase_per_panel = 3.0;  // bound on (|k| + local frequency) * h and sqrt|q| h
  int max_iterations = 200;
  double small_k_cutoff = 1e-3;
};

/// Solution of the backward Psi-system together with the scalars derived
/// from it. Besides psi1, psi2 the Z-variables z1 = e^{i phi} psi1 and
/// chi = e^{-2ikb} e^{-i phi} psi2 (b the right end of the node's panel) are
/// kept; they stay bounded where e^{i phi} does not.
struct JostData {
  cplx k;
  double R = 0;
  std::vector<double> grid;
  std::vector<cplx> psi1, psi2, phi;
  cplx phi0, jm, j, jprime0, a, b, am;
  int iteration_count = 0;
  double residual = 0;

  /// j(x) and j'(x); e^{ikx} beyond R.
  std::pair<cplx, cplx> solution_at(double x) const;

  /// j and j' at every stored grid node.
  std::vector<std::pair<cplx, cplx>> solution_on_grid() const;

  std::vector<double> panel_edges;  // ascending, panel p spans [edges[p], edges[p+1]]
  std::vector<cplx> z1, chi;
  int nodes_per_panel = 0;
};

JostData solve_psi(const Potential& q, cplx k, double R, const JostOptions& opt = {});

cplx modified_jost(const Potential& q, cplx k, double R, const JostOptions& opt = {});

struct Scattering {
  cplx a, b, am;
  cplx am_direct;  // psi1(0)
};

/// a and b from the continuation j = a e^{ikx} + b e^{-ikx} to x < 0.
Scattering scattering_ab(const Potential& q, cplx k, double R, const JostOptions& opt = {});
Scattering scattering_ab(const JostData& d);

/// d/dR j(k, R) for real k.
cplx djost_dR(const Potential& q, double k, double R, const JostOptions& opt = {});

/// max over the grid of |j' conj(j) - j conj(j)' - 2ik| for real k.
double wronskian_check(const Potential& q, double k, double R, const JostOptions& opt = {});
double wronskian_check(const JostData& d);

/// Effective truncation radius: the support bound when finite, else R.
double effective_radius(const Potential& q, double R);

}  // namespace wavescat
