#pragma once

#include "wavescat/jost.hpp"
#include "wavescat/potential.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace wavescat {

struct RegularSolution {
  cplx k;
  std::vector<double> grid;
  std::vector<cplx> u, uprime;
  int steps = 0;
};

struct RegularOptions {
  double tol = 1e-10;  // local error per step
  double h0 = 1e-2;
  double h_min = 1e-12;
};

/// -u'' + q u = k^2 u, u(0) = 0, u'(0) = 1, by adaptive RK4 with step
/// doubling. Requested sample points are always on the output grid; past a
/// finite support the solution is continued in closed form.
RegularSolution regular_solution(const Potential& q, cplx k, double xmax,
                                 const RegularOptions& opt = {},
                                 std::span<const double> samples = {});

/// m_R(k^2) = j'(0) / j(0).
cplx m_function(const Potential& q, cplx k, double R, const JostOptions& opt = {});

/// mu(k^2) = k / (pi |j_m(k, R)|^2) for real k > 0.
double spectral_density(const Potential& q, double k, double R, const JostOptions& opt = {});

struct DensityEstimate {
  double mu = 0;
  double doubling_gap = 0;
  double R_used = 0;
  bool converged = true;
};

/// spectral_density with R doubled until two values agree to rel_tol
/// (immediate for compact q with R past the support).
DensityEstimate spectral_density_checked(const Potential& q, double k, double R,
                                         double rel_tol = 1e-5, int max_doublings = 4);

/// Normalised ratio |m + it|^2 / (4 pi t mu) at real t > 0; equals |a|^2.
double normalized_ratio(const JostData& d);

enum class BoundStateKind { halfline_dirichlet, line_glued };

struct BoundStateOptions {
  double delta = 1e-3;
  int scan = 400;
  double tol = 1e-10;
};

struct BoundStates {
  std::vector<double> values;  // decreasing
  bool threshold_warning = false;
};

/// Roots y of a(iy) (line_glued) or j(iy) (halfline_dirichlet), both real
/// on the positive imaginary axis.
BoundStates bound_states(const Potential& q, double R, BoundStateKind which,
                         const BoundStateOptions& opt = {});

/// prod_j (k - i xi_j)/(k + i xi_j) exp(2 i xi_j / k).
struct BlaschkeProduct {
  std::vector<double> xis;
  cplx operator()(cplx k) const;
};

struct ModelOptions {
  double R = 0;          // 0: support bound of q
  double delta = 0.05;
  double kmax = 40;
  double panel = 0.25;   // k-panel width
  int per_panel = 16;
  double grade = 0.5;    // graded panels on [delta, grade]
  JostOptions jost = {};
  bool bound_states = true;
};

/// Stationary spectral data on a Gauss-Legendre k-grid. drho(i) is the
/// quadrature weight of dρ = mu dE = 2k mu dk at node k(i).
struct SpectralModel {
  Eigen::VectorXd k, w, mu, drho;
  Eigen::VectorXcd m, jm, j;
  std::vector<double> bound_xis;       // line_glued
  std::vector<double> dirichlet_eigs;  // kappa_j, eigenvalue -kappa_j^2
  std::vector<double> point_weights;   // 1 / ||u(., i kappa_j)||^2
  bool threshold_warning = false;
  double R_used = 0, delta = 0, kmax = 0;
};

SpectralModel build_model(const Potential& q, const ModelOptions& opt = {});

/// u(x_c, k_r) for every model node k_r and sample x_c, through
/// u = Im(conj j(0) j(x)) / k.
Eigen::MatrixXd regular_matrix(const Potential& q, const SpectralModel& model,
                               std::span<const double> xs, const JostOptions& opt = {},
                               Eigen::MatrixXd* derivative = nullptr);

/// u(x_c, i kappa_j) = j(x_c) / j'(0) for each Dirichlet eigenvalue.
Eigen::MatrixXd eigenfunction_matrix(const Potential& q, const SpectralModel& model,
                                     std::span<const double> xs, const JostOptions& opt = {},
                                     Eigen::MatrixXd* derivative = nullptr);

/// Quadrature representation of a function on [0, inf).
struct SampledFunction {
  Eigen::VectorXd x, w;
  Eigen::VectorXcd f;
  double norm2() const { return (w.array() * f.array().abs2()).sum(); }
};

/// Sample g on composite Gauss-Legendre nodes over [a, b].
SampledFunction sample_function(const std::function<cplx(double)>& g, double a, double b,
                                double panel = 0.05, int per_panel = 16);

struct TransformPair {
  Eigen::VectorXcd fb;      // f-breve on the model's k-grid
  Eigen::VectorXcd points;  // int f u(., i kappa_j)
  double norm2 = 0;         // ||f||^2
  double continuum = 0;     // int |f-breve|^2 drho over the grid
  double point_mass = 0;    // sum of point-mass contributions
  double defect = 0;        // |continuum + point_mass - norm2|
  bool truncation_flag = false;
};

/// f-breve(k) = int f u(., k) for the model grid and Dirichlet eigenvalues.
/// U and E may be passed when already computed for f.x.
TransformPair generalized_transform(const Potential& q, const SampledFunction& f,
                                    const SpectralModel& model,
                                    const Eigen::MatrixXd* U = nullptr,
                                    const Eigen::MatrixXd* E = nullptr);

struct TraceOptions {
  double delta = 1e-3;
  double kmax = 60;
  double panel = 0.25;
};

struct TraceCheck {
  double lhs_continuum = 0;  // includes the tail estimate beyond kmax
  double lhs_points = 0;
  double rhs = 0;
  double tail_bound = 0;
  bool tail_flag = false;
  std::vector<double> xis;
};

TraceCheck trace_identity_check(const Potential& q, double R, const TraceOptions& opt = {});

struct Factorization {
  cplx am;
  cplx direct;
  double tail_bound = 0;
  bool inconclusive = false;
};

/// a_m(k) = B_m(k) exp((1/(pi i k)) int_0^inf t^2 L(t) / (t^2 - k^2) dt),
/// L = log of the normalised ratio.
Factorization am_factorization(const Potential& q, cplx k, double R,
                               const TraceOptions& opt = {});

struct WeakProbe {
  std::vector<double> s;
  double target = 0;
};

/// s(R) = int testfn(E) pi |j_m(k, R)|^2 drho(E) against int testfn(E) sqrt(E) dE,
/// with drho from a model at R_model; testfn supported in [E1, E2].
WeakProbe weak_convergence_probe(const Potential& q, const std::function<double(double)>& testfn,
                                 double E1, double E2, std::span<const double> Rlist,
                                 double R_model);

/// int_I |j_m(k,R)/j_m(k,R_ref) - 1|^2 dk for R in Rlist; R_ref defaults to
/// 2 max(Rlist).
std::vector<double> jm_ratio_convergence(const Potential& q, double k1, double k2,
                                         std::span<const double> Rlist, double R_ref = 0);

}  // namespace wavescat
