#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wavescat {

using cplx = std::complex<double>;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when a numerical procedure fails to reach its tolerance.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DecayTag { compact, l1, l2_oscillatory, l2_monotone };

std::string to_string(DecayTag tag);

namespace spec {
struct Zero {};
/// q = depth on [0, width), zero beyond.
struct SquareWell {
  double depth = 0;
  double width = 1;
};
/// Piecewise-linear through (x, q) samples, zero past the last sample.
struct Sampled {
  std::vector<std::pair<double, double>> grid;
};
/// q(x) = c cos(x^a) / (1 + x)^b.
struct OscillatoryDecay {
  double c = 1;
  double a = 1;
  double b = 1;
};
}  // namespace spec

using PotentialSpec =
    std::variant<spec::Zero, spec::SquareWell, spec::Sampled, spec::OscillatoryDecay>;

/// Immutable real potential on the half-line, optionally truncated at R.
class Potential {
 public:
  Potential();

  double operator()(double x) const;

  /// Value at x taken from inside [lo, hi]; used at discontinuities so a
  /// panel sees the limit from its own side.
  double value_within(double x, double lo, double hi) const;

  double support_bound() const { return support_; }
  DecayTag decay_tag() const { return tag_; }
  double l2_moment() const { return l2_; }
  bool is_zero() const { return zero_; }
  bool is_compact() const { return support_ < kInf; }

  /// Interior points where q or q' may jump.
  std::span<const double> breakpoints() const { return breaks_; }

  /// Upper bound on |q| over [lo, hi].
  double sup_abs(double lo, double hi) const;

  /// Local angular frequency of the oscillation of q near x (0 if none).
  double local_frequency(double x) const;

  /// L2 decay envelope: |q(x)| <= envelope(x).
  double envelope(double x) const;

  /// q(x) chi_{x<R}.
  Potential truncate(double R) const;

  const PotentialSpec& spec() const { return *spec_; }
  double truncation() const { return cut_; }

 private:
  friend Potential make_potential(const PotentialSpec&);

  double raw(double x) const;

  std::shared_ptr<const PotentialSpec> spec_;
  double cut_ = kInf;
  double support_ = 0;
  DecayTag tag_ = DecayTag::compact;
  double l2_ = 0;
  bool zero_ = true;
  std::vector<double> breaks_;
};

Potential make_potential(const PotentialSpec& s);

/// phi(x, k, R) = (2k)^{-1} int_x^R q.
cplx phase(const Potential& q, double x, cplx k, double R);

/// int_0^T q (or int_0^T |q| when `absolute`).
double conditional_integral(const Potential& q, double T, bool absolute = false);

/// int_a^b q (or |q|) with panels cut at breakpoints and oscillation zeros.
double integrate_potential(const Potential& q, double a, double b, bool absolute = false,
                           double rel_tol = 1e-10);

}  // namespace wavescat
