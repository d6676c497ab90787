#pragma once

#include "wavescat/potential.hpp"
#include "wavescat/spectral.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace wavescat {

/// Transform f-hat_o of the odd continuation, given on (0, inf) and
/// supported in [a, b].
struct BandLimited {
  std::function<cplx(double)> fhat;
  double a = 1, b = 3;
  double phase_rate = 0;  // bound on |d arg fhat / dk|, sizes the quadrature panels

  /// ||f||^2 = (1/2pi) int |fhat|^2 dk.
  double norm2() const;
};

/// exp(-1/(1 - s^2)) e^{i k x0} with s mapping [a, b] onto [-1, 1].
BandLimited bump_profile(double a = 1, double b = 3, double x0 = 0);

/// M(t, k) = exp(ikt + (i/2k) int_0^t q).
cplx multiplier(const Potential& q, double t, double k);

/// omega(t) = int_0^t |q| / sqrt(t).
double omega(const Potential& q, double t);

struct ModifiedFreeState {
  double t = 0;
  Eigen::VectorXd x;
  Eigen::VectorXcd samples;  // [W(t) f](x)
};

/// [W(t)f](x) = (1/2pi) int_0^inf e^{-ikx} M(t, k) fhat(k) dk at each x (any
/// real x); Gauss panels are sized by the phase rate |t - x| + |Q|/(2a^2).
ModifiedFreeState apply_W(const Potential& q, const BandLimited& f, double t,
                          std::span<const double> xs);

/// Second moment int (x - t)^2 |[W(t)f](x)|^2 dx against the bound
/// (1/2pi) (||fhat'|| + (1/2) |int_0^t |q|| ||fhat / k^2||)^2.
struct MomentCheck {
  double moment = 0;
  double bound = 0;
};

MomentCheck localization_moment(const Potential& q, const BandLimited& f, double t,
                                double half_width = 80);

/// sup over pairs alpha < beta from `edges` and k in `ks` of
/// |int_alpha^beta e^{ixk} [W(t)f](x) dx|.
double partial_integral_sup(const Potential& q, const BandLimited& f, double t,
                            std::span<const double> edges, std::span<const double> ks);

/// Transforms of W(t) f on a fixed model. The x-quadrature covers [0, x_max]
/// and the regular solutions on it are computed once.
class WaveOperatorProbe {
 public:
  WaveOperatorProbe(const Potential& q, const BandLimited& f, const SpectralModel& model,
                    double x_max, double x_panel = 0.5);

  /// e^{-ikt} times the generalized transform of W(t) f on the model grid;
  /// bound-state components are dropped.
  Eigen::VectorXcd evolved_transform(double t) const;

  /// conj(j_m(k)) fhat(k) / (2ik).
  Eigen::VectorXcd limit_candidate() const;

  /// L2(drho) norm over the model grid.
  double norm(const Eigen::VectorXcd& v) const;

  /// drho-mass of the transform of W(t) f over E in [0, delta].
  double zero_energy_mass(double t, double delta) const;

  /// Fraction of ||f||^2 carried by W(t) f outside |x - t| < sqrt(t omega(t)).
  double localization_tail(double t) const;

  const SpectralModel& model() const { return *model_; }
  double x_max() const { return x_max_; }

 private:
  Eigen::VectorXcd transform(double t) const;

  const Potential* q_;
  BandLimited f_;
  const SpectralModel* model_;
  double x_max_;
  Eigen::VectorXd x_, w_;
  Eigen::MatrixXd U_;  // model nodes x quadrature nodes
};

struct WaveopRecord {
  double t = 0;
  double cauchy_gap = 0;  // distance to the previous t; NaN for the first
  double norm = 0;        // L2(drho) norm of the evolved transform
  double zero_energy_mass = 0;
  double localization_tail = 0;
};

struct WaveopConvergence {
  std::vector<WaveopRecord> records;
  bool hypothesis_ok = true;  // |q| <= C (1 + x)^{-1/2} on samples
};

/// Cauchy gaps of e^{-it sqrt(H_1)} W(t) f along tlist, measured in the
/// spectral representation. `delta` is the energy cutoff of the zero-energy
/// mass column.
WaveopConvergence waveop_convergence(const Potential& q, const BandLimited& f,
                                     std::span<const double> tlist, const SpectralModel& model,
                                     double delta = 0.01);

/// Same on an existing probe.
WaveopConvergence waveop_convergence(const WaveOperatorProbe& probe, const Potential& q,
                                     std::span<const double> tlist, double delta = 0.01);

/// (1/T) int_0^T ||e^{-it sqrt(H_1)} W(t) f - G(f)||^2 dt by Gauss-Legendre
/// in t with panels of width `t_panel`.
double cesaro_gap(const WaveOperatorProbe& probe, double T, double t_panel = 1.0);

/// Cesaro means for increasing Ts, sharing one sweep over [0, max T].
std::vector<double> cesaro_gaps(const WaveOperatorProbe& probe, std::span<const double> Ts,
                                double t_panel = 1.0);

double cesaro_gap(const Potential& q, const BandLimited& f, double T, const SpectralModel& model);

/// True when sup |q| sqrt(1 + x) over [R/2, R] does not exceed its sup over
/// [0, R/2].
bool decay_hypothesis(const Potential& q, double R);

/// v.p. int_{1/2}^2 e^{i(xi - 1) gamma} e^{i T / xi} / (xi - 1) d xi.
cplx oscillatory_vp(double gamma, double T);

struct OscillatoryBound {
  double max_abs = 0;
  std::pair<double, double> argmax{0, 0};
};

OscillatoryBound oscillatory_bound_probe(std::span<const double> gamma_grid,
                                         std::span<const double> T_grid);

/// {0} together with +-g for n log-spaced g in [g_min, g_max] (or + only).
std::vector<double> log_grid(double g_min, double g_max, int n, bool symmetric);

}  // namespace wavescat
