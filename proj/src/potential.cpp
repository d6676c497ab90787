#include "wavescat/potential.hpp"

#include "wavescat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavescat {

std::string to_string(DecayTag tag) {
  switch (tag) {
    case DecayTag::compact: return "compact";
    case DecayTag::l1: return "l1";
    case DecayTag::l2_oscillatory: return "l2_oscillatory";
    case DecayTag::l2_monotone: return "l2_monotone";
  }
  return "unknown";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Zeros of cos(x^a) inside (lo, hi): x_n = ((n + 1/2) pi)^{1/a}.
std::vector<double> oscillation_zeros(const spec::OscillatoryDecay& s, double lo,
                                      double hi) {
  std::vector<double> out;
  const double pi = std::numbers::pi;
  const double first = std::ceil(std::pow(std::max(lo, 0.0), s.a) / pi - 0.5);
  for (double n = std::max(first, 0.0);; n += 1) {
    const double x = std::pow((n + 0.5) * pi, 1.0 / s.a);
    if (x >= hi) break;
    if (x > lo) out.push_back(x);
  }
  return out;
}

double sampled_value(const spec::Sampled& s, double x) {
  const auto& g = s.grid;
  if (g.empty() || x > g.back().first) return 0;
  if (x <= g.front().first) return g.front().second;
  auto it = std::upper_bound(g.begin(), g.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  const auto& [x1, q1] = *it;
  const auto& [x0, q0] = *(it - 1);
  return q0 + (q1 - q0) * (x - x0) / (x1 - x0);
}

// int_X^inf c^2 cos^2(x^a) (1+x)^{-2b} dx from the mean part plus two
// integration-by-parts terms of the oscillating part.
double oscillatory_l2_tail(const spec::OscillatoryDecay& s, double X) {
  const double c2 = s.c * s.c, a = s.a, b = s.b;
  const double mean = 0.5 * c2 * std::pow(1 + X, 1 - 2 * b) / (2 * b - 1);
  auto G = [&](double x) { return std::pow(1 + x, -2 * b) * std::pow(x, 1 - a) / (2 * a); };
  auto dG = [&](double x) {
    return (-2 * b * std::pow(1 + x, -2 * b - 1) * std::pow(x, 1 - a) +
            (1 - a) * std::pow(1 + x, -2 * b) * std::pow(x, -a)) /
           (2 * a);
  };
  const double ph = 2 * std::pow(X, a);
  const double osc = -std::sin(ph) * G(X) -
                     std::cos(ph) * dG(X) / (2 * a * std::pow(X, a - 1));
  return mean + 0.5 * c2 * osc;
}

constexpr double kOscL2Cutoff = 1000.0;

}  // namespace

Potential::Potential() : spec_(std::make_shared<const PotentialSpec>(spec::Zero{})) {}

double Potential::raw(double x) const {
  return std::visit(
      overloaded{
          [](const spec::Zero&) { return 0.0; },
          [x](const spec::SquareWell& w) { return x < w.width ? w.depth : 0.0; },
          [x](const spec::Sampled& s) { return sampled_value(s, x); },
          [x](const spec::OscillatoryDecay& o) {
            return o.c * std::cos(std::pow(x, o.a)) / std::pow(1 + x, o.b);
          },
      },
      *spec_);
}

double Potential::operator()(double x) const {
  if (zero_ || x < 0 || x >= cut_) return 0;
  return raw(x);
}

double Potential::value_within(double x, double lo, double hi) const {
  const double eps = 1e-13 * std::max(1.0, std::abs(hi));
  return (*this)(std::clamp(x, lo + eps, hi - eps));
}

double Potential::sup_abs(double lo, double hi) const {
  if (zero_ || lo >= cut_) return 0;
  hi = std::min(hi, cut_);
  return std::visit(
      overloaded{
          [](const spec::Zero&) { return 0.0; },
          [lo](const spec::SquareWell& w) { return lo < w.width ? std::abs(w.depth) : 0.0; },
          [&](const spec::Sampled& s) {
            double m = std::max(std::abs(sampled_value(s, lo)), std::abs(sampled_value(s, hi)));
            for (const auto& [x, v] : s.grid)
              if (x >= lo && x <= hi) m = std::max(m, std::abs(v));
            return m;
          },
          [lo](const spec::OscillatoryDecay& o) {
            return std::abs(o.c) / std::pow(1 + std::max(lo, 0.0), o.b);
          },
      },
      *spec_);
}

double Potential::local_frequency(double x) const {
  if (zero_ || x >= cut_) return 0;
  if (const auto* o = std::get_if<spec::OscillatoryDecay>(spec_.get()))
    return o->a * std::pow(std::max(x, 1e-3), o->a - 1);
  return 0;
}

double Potential::envelope(double x) const { return sup_abs(x, x); }

Potential Potential::truncate(double R) const {
  if (!(R > 0)) throw std::invalid_argument("truncate: R must be positive");
  Potential out = *this;
  out.cut_ = std::min(cut_, R);
  out.support_ = std::min(support_, R);
  out.tag_ = DecayTag::compact;
  std::erase_if(out.breaks_, [&](double x) { return x >= out.support_; });
  if (!out.zero_) {
    out.l2_ = quad::adaptive_piecewise([&](double x) { double v = out(x); return v * v; },
                                       0.0, out.support_, out.breaks_, {1e-14, 1e-12}, 0.25)
                  .value;
  }
  return out;
}

Potential make_potential(const PotentialSpec& s) {
  Potential p;
  p.spec_ = std::make_shared<const PotentialSpec>(s);
  std::visit(
      overloaded{
          [&](const spec::Zero&) {
            p.zero_ = true;
            p.support_ = 0;
            p.tag_ = DecayTag::compact;
            p.l2_ = 0;
          },
          [&](const spec::SquareWell& w) {
            if (!(w.width > 0)) throw std::invalid_argument("square_well: width must be positive");
            if (!std::isfinite(w.depth)) throw std::invalid_argument("square_well: depth must be finite");
            p.zero_ = w.depth == 0;
            p.support_ = p.zero_ ? 0 : w.width;
            p.tag_ = DecayTag::compact;
            p.l2_ = w.depth * w.depth * w.width;
            if (!p.zero_) p.breaks_ = {w.width};
          },
          [&](const spec::Sampled& smp) {
            const auto& g = smp.grid;
            if (g.empty()) throw std::invalid_argument("sampled: empty grid");
            for (std::size_t i = 0; i < g.size(); ++i) {
              if (g[i].first < 0 || !std::isfinite(g[i].first) || !std::isfinite(g[i].second))
                throw std::invalid_argument("sampled: samples must be finite with x >= 0");
              if (i > 0 && !(g[i].first > g[i - 1].first))
                throw std::invalid_argument("sampled: x must be strictly increasing (row " +
                                            std::to_string(i + 1) + ")");
            }
            p.zero_ = std::all_of(g.begin(), g.end(), [](const auto& s) { return s.second == 0; });
            p.support_ = p.zero_ ? 0 : g.back().first;
            p.tag_ = DecayTag::compact;
            double l2 = g.front().second * g.front().second * g.front().first;
            for (std::size_t i = 0; i + 1 < g.size(); ++i) {
              const double h = g[i + 1].first - g[i].first, a = g[i].second, b = g[i + 1].second;
              l2 += h * (a * a + a * b + b * b) / 3;
              if (g[i].first > 0) p.breaks_.push_back(g[i].first);
            }
            if (g.size() > 1 && g.back().first > 0) p.breaks_.push_back(g.back().first);
            p.l2_ = l2;
          },
          [&](const spec::OscillatoryDecay& o) {
            if (!(o.a > 0)) throw std::invalid_argument("oscillatory_decay: a must be positive");
            if (!(o.b > 0.5))
              throw std::invalid_argument("oscillatory_decay: b must exceed 1/2 for q in L2");
            p.zero_ = o.c == 0;
            p.support_ = p.zero_ ? 0 : kInf;
            p.tag_ = p.zero_ ? DecayTag::compact : (o.b > 1 ? DecayTag::l1 : DecayTag::l2_oscillatory);
            if (!p.zero_) {
              auto zeros = oscillation_zeros(o, 0.0, kOscL2Cutoff);
              const auto body = quad::adaptive_piecewise(
                  [&](double x) { double v = p.raw(x); return v * v; }, 0.0, kOscL2Cutoff, zeros,
                  {1e-15, 1e-12});
              p.l2_ = body.value + oscillatory_l2_tail(o, kOscL2Cutoff);
              if (!std::isfinite(p.l2_) || !body.converged)
                throw NumericalError("oscillatory_decay: l2 moment did not converge");
            }
          },
      },
      s);
  return p;
}

double integrate_potential(const Potential& q, double a, double b, bool absolute,
                           double rel_tol) {
  if (q.is_zero() || a == b) return 0;
  const double sign = b < a ? -1 : 1;
  const double lo = std::min(a, b), hi = std::min(std::max(a, b), q.truncation());
  if (hi <= lo) return 0;
  std::vector<double> breaks(q.breakpoints().begin(), q.breakpoints().end());
  if (const auto* o = std::get_if<spec::OscillatoryDecay>(&q.spec())) {
    auto z = oscillation_zeros(*o, lo, hi);
    breaks.insert(breaks.end(), z.begin(), z.end());
  }
  auto f = [&](double x) {
    const double v = q(x);
    return absolute ? std::abs(v) : v;
  };
  quad::AdaptiveOptions opt{1e-15, rel_tol};
  // rounding in cos(x^a) grows with the phase; without this the adaptive
  // rule chases noise down to its depth limit far out
  if (const auto* o = std::get_if<spec::OscillatoryDecay>(&q.spec()))
    opt.abs_tol *= std::max(1.0, std::abs(o->c) * std::pow(hi, o->a) / 100);
  return sign * quad::adaptive_piecewise(f, lo, hi, breaks, opt, 1.0).value;
}

double conditional_integral(const Potential& q, double T, bool absolute) {
  if (!(T > 0)) throw std::invalid_argument("conditional_integral: T must be positive");
  return integrate_potential(q, 0.0, T, absolute, 1e-12);
}

cplx phase(const Potential& q, double x, cplx k, double R) {
  if (k == cplx(0)) throw std::invalid_argument("phase: k = 0");
  if (x > R) throw std::invalid_argument("phase: requires x <= R");
  return integrate_potential(q, x, R, false, 1e-12) / (2.0 * k);
}

}  // namespace wavescat
