#pragma once

#include "wavescat/potential.hpp"
#include "wavescat/spectral.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace wavescat {

/// Snapshot of y and y_t on a grid starting at x = 0. `w` holds quadrature
/// weights for the grid (trapezoid on uniform grids); `yx` is filled when the
/// solver knows the spatial derivative.
struct FieldState {
  Eigen::VectorXd x, w;
  Eigen::VectorXcd y, yt, yx;
  double t = 0;
  double excluded_mass = 0;
  bool excluded_flag = false;
  double scheme_energy = 0;  // leapfrog only: its conserved discrete energy
};

enum class PsiMode { given, minus_i_sqrtH_of_phi, zero };

/// Initial data y(., 0) = phi, y_t(., 0) = psi, both negligible past `support`.
struct CauchyData {
  std::function<cplx(double)> phi;
  std::function<cplx(double)> psi;
  PsiMode psi_mode = PsiMode::zero;
  double support = 0;
  double panel = 0.05;  // sampling panel for the transforms
};

/// Uniform grid on [0, X] with trapezoid weights; X is rounded up to a
/// multiple of dx.
FieldState uniform_grid(double X, double dx);

/// Generalized transforms of the data on a model.
struct SpectralCoefficients {
  Eigen::VectorXcd phi, psi;                // on the model k-grid
  Eigen::VectorXcd phi_points, psi_points;  // per Dirichlet eigenvalue
  double norm2 = 0;          // ||phi||^2 + ||psi||^2 for given psi
  double excluded_mass = 0;  // missing from the grid, mostly [0, delta^2)
  double bound_mass = 0;     // weight of the bound-state components
  bool excluded_flag = false;
};

SpectralCoefficients spectral_coefficients(const Potential& q, const CauchyData& data,
                                           const SpectralModel& model);

/// Same from quadrature samples; `psi` must share the nodes of `phi` and is
/// only read for PsiMode::given.
SpectralCoefficients spectral_coefficients(const Potential& q, const SampledFunction& phi,
                                           const SampledFunction* psi, PsiMode mode,
                                           const SpectralModel& model);

/// ||y(t)||^2 by Parseval from the coefficients.
double spectral_mass(const SpectralModel& model, const SpectralCoefficients& c, double t,
                     bool project = true);

/// Eigenfunction expansion of the solution on a fixed output grid. The
/// matrices are built once, so each time costs one matrix-vector product.
class SpectralSynthesizer {
 public:
  SpectralSynthesizer(const Potential& q, const SpectralModel& model, const FieldState& grid,
                      bool with_derivative = true);

  /// With `project` the bound-state components are dropped; otherwise they
  /// evolve with cosh and sinh.
  FieldState state(const SpectralCoefficients& c, double t, bool project = true) const;

  const FieldState& grid() const { return grid_; }

 private:
  const SpectralModel* model_;
  FieldState grid_;
  Eigen::MatrixXd U_, Ux_, E_, Ex_;  // one row per output point
};

/// Spectral synthesis at time t on `grid` (a uniform grid starting at 0 by
/// default covering support + t + 5).
FieldState evolve_spectral(const Potential& q, const CauchyData& data, double t,
                           const SpectralModel& model, const FieldState* grid = nullptr);

/// Leapfrog for y_tt = y_xx - q y with y(0) = y(X) = 0 and cell-averaged q.
/// The grid spans support + t + 5; psi_mode minus_i_sqrtH_of_phi is rejected.
FieldState evolve_fdtd(const Potential& q, const CauchyData& data, double t, double dx,
                       double dt);

/// Leapfrog from a sampled initial state on a uniform grid starting at 0.
/// The caller is responsible for the grid being long enough.
FieldState evolve_fdtd(const Potential& q, const FieldState& initial, double t, double dt);

/// Richardson combination (4 y_{dx/2} - y_dx) / 3 of two leapfrog runs with
/// dt = cfl dx, returned on the coarse grid.
FieldState evolve_fdtd_extrapolated(const Potential& q, const CauchyData& data, double t,
                                    double dx, double cfl = 0.9);

/// int |y_t|^2 + |y_x|^2 + q |y|^2 over the state grid; y_x by fourth-order
/// central differences when the state does not carry it, and the q term by
/// cubic interpolation of y on uniform grids.
double energy(const Potential& q, const FieldState& state);

/// sum w |y|^2.
double field_mass(const FieldState& state);

/// int_{t - sqrt t}^{t + sqrt t} |y(x, t)|^2 dx.
double ballistic_mass(const FieldState& state);

/// mu_f(x) = (1/(pi i)) int k f-breve(k) e^{ikx} e^{-(i/2k) int q} / j_m(k) dk
/// at each x in `xs`, with the model's j = e^{i phi(0)} j_m.
Eigen::VectorXcd asymptotic_profile(const Potential& q, const SpectralCoefficients& c,
                                    const SpectralModel& model, std::span<const double> xs);

Eigen::VectorXcd asymptotic_profile(const Potential& q, const std::function<cplx(double)>& f,
                                    double support, const SpectralModel& model,
                                    std::span<const double> xs);

/// sup over the window of |y(T + x, T) - mu_f(x)| for each T, with data
/// phi = f, psi = -i sqrt(H) f projected onto the positive spectrum.
std::vector<double> convergence_test_ch1(const Potential& q, const std::function<cplx(double)>& f,
                                         double support, std::span<const double> Tlist,
                                         std::span<const double> xwindow,
                                         const SpectralModel& model);

/// k-panel width that resolves synthesis up to time t at positions <= x_max
/// for data supported in [0, support].
double synthesis_panel(double t, double x_max, double support);

}  // namespace wavescat
