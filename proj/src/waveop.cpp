#include "wavescat/waveop.hpp"

#include "wavescat/parallel.hpp"
#include "wavescat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wavescat {

namespace {

constexpr double kPi = std::numbers::pi;

// (e^{iz} - 1) / z
cplx expm1_ratio(double z) {
  if (std::abs(z) < 1e-4) return cplx(-z / 2, 1 - z * z / 6);
  const double s = std::sin(0.5 * z);
  return cplx(-2 * s * s, std::sin(z)) / z;
}

template <typename F>
cplx integrate_panels(F&& f, double a, double b, int panels) {
  const auto& rule = quad::gauss(16);
  const double h = (b - a) / panels;
  cplx sum = 0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    sum += quad::apply_rule(rule, f, lo, p + 1 == panels ? b : lo + h);
  }
  return sum;
}

double band_integral(const BandLimited& f, const std::function<double(double)>& g) {
  return quad::adaptive([&](double k) { return g(k); }, f.a, f.b).value;
}

}  // namespace

double BandLimited::norm2() const {
  return quad::adaptive([this](double k) { return std::norm(fhat(k)); }, a, b).value / (2 * kPi);
}

BandLimited bump_profile(double a, double b, double x0) {
  if (!(a > 0) || !(b > a)) throw std::invalid_argument("bump_profile: need 0 < a < b");
  BandLimited f;
  f.a = a;
  f.b = b;
  f.phase_rate = std::abs(x0);
  f.fhat = [a, b, x0](double k) -> cplx {
    const double s = (2 * k - a - b) / (b - a);
    if (std::abs(s) >= 1) return 0;
    return std::exp(-1 / (1 - s * s)) * std::exp(cplx(0, k * x0));
  };
  return f;
}

cplx multiplier(const Potential& q, double t, double k) {
  if (!(k > 0)) throw std::invalid_argument("multiplier: k must be positive");
  if (!(t >= 0)) throw std::invalid_argument("multiplier: t must be nonnegative");
  const double Q = t > 0 ? conditional_integral(q, t) : 0;
  return std::exp(cplx(0, k * t + Q / (2 * k)));
}

double omega(const Potential& q, double t) {
  if (!(t > 0)) throw std::invalid_argument("omega: t must be positive");
  return std::abs(conditional_integral(q, t, true)) / std::sqrt(t);
}

ModifiedFreeState apply_W(const Potential& q, const BandLimited& f, double t,
                          std::span<const double> xs) {
  if (!(f.a > 0)) throw std::invalid_argument("apply_W: support must stay away from k = 0");
  if (!(t >= 0)) throw std::invalid_argument("apply_W: t must be nonnegative");
  const double Q = t > 0 ? conditional_integral(q, t) : 0;
  ModifiedFreeState s;
  s.t = t;
  s.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), Eigen::Index(xs.size()));
  s.samples.resize(s.x.size());
  const double len = f.b - f.a;
  parallel_for(xs.size(), [&](std::size_t i) {
    const double x = xs[i];
    const double rate = std::abs(t - x) + f.phase_rate + std::abs(Q) / (2 * f.a * f.a);
    const int panels = std::max(6, int(std::ceil(len * rate / 12)));
    auto integrand = [&](double k) {
      return std::exp(cplx(0, k * (t - x) + Q / (2 * k))) * f.fhat(k);
    };
    s.samples(Eigen::Index(i)) = integrate_panels(integrand, f.a, f.b, panels) / (2 * kPi);
  });
  return s;
}

MomentCheck localization_moment(const Potential& q, const BandLimited& f, double t,
                                double half_width) {
  const auto ns = quad::composite_gauss(t - half_width, t + half_width, {}, 0.5, 16);
  std::span<const double> xs(ns.x.data(), std::size_t(ns.x.size()));
  const auto W = apply_W(q, f, t, xs);
  MomentCheck m;
  for (Eigen::Index i = 0; i < ns.x.size(); ++i)
    m.moment += ns.w(i) * (ns.x(i) - t) * (ns.x(i) - t) * std::norm(W.samples(i));
  const double h = 1e-5 * (f.b - f.a);
  const double d1 = std::sqrt(band_integral(f, [&](double k) {
    const double lo = std::max(f.a, k - h), hi = std::min(f.b, k + h);
    return std::norm((f.fhat(hi) - f.fhat(lo)) / (hi - lo));
  }));
  const double d2 = std::sqrt(band_integral(f, [&](double k) { return std::norm(f.fhat(k)) / std::pow(k, 4); }));
  const double mass = t > 0 ? std::abs(conditional_integral(q, t, true)) : 0;
  m.bound = std::pow(d1 + 0.5 * mass * d2, 2) / (2 * kPi);
  return m;
}

double partial_integral_sup(const Potential& q, const BandLimited& f, double t,
                            std::span<const double> edges, std::span<const double> ks) {
  std::vector<double> e(edges.begin(), edges.end());
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  if (e.size() < 2) throw std::invalid_argument("partial_integral_sup: need two edges");
  const auto ns = quad::composite_gauss(e.front(), e.back(), e, 0.25, 16);
  const auto W = apply_W(q, f, t, std::span<const double>(ns.x.data(), std::size_t(ns.x.size())));
  std::vector<double> best(ks.size(), 0);
  parallel_for(ks.size(), [&](std::size_t ik) {
    // prefix integrals at each edge; nodes never sit on an edge
    std::vector<cplx> prefix{0};
    cplx acc = 0;
    std::size_t next = 1;
    for (Eigen::Index i = 0; i < ns.x.size(); ++i) {
      while (next < e.size() && ns.x(i) > e[next]) {
        prefix.push_back(acc);
        ++next;
      }
      acc += ns.w(i) * std::exp(cplx(0, ks[ik] * ns.x(i))) * W.samples(i);
    }
    while (prefix.size() < e.size()) prefix.push_back(acc);
    double m = 0;
    for (std::size_t a = 0; a < prefix.size(); ++a)
      for (std::size_t b = a + 1; b < prefix.size(); ++b) m = std::max(m, std::abs(prefix[b] - prefix[a]));
    best[ik] = m;
  });
  return *std::max_element(best.begin(), best.end());
}

WaveOperatorProbe::WaveOperatorProbe(const Potential& q, const BandLimited& f,
                                     const SpectralModel& model, double x_max, double x_panel)
    : q_(&q), f_(f), model_(&model), x_max_(x_max) {
  if (!(f.a > 0)) throw std::invalid_argument("WaveOperatorProbe: support must stay away from k = 0");
  if (!(x_max > 0)) throw std::invalid_argument("WaveOperatorProbe: x_max must be positive");
  const auto br = q.breakpoints();
  const auto ns = quad::composite_gauss(0, x_max, std::vector<double>(br.begin(), br.end()),
                                        x_panel, 16);
  x_ = ns.x;
  w_ = ns.w;
  U_ = regular_matrix(q, model, std::span<const double>(x_.data(), std::size_t(x_.size())));
}

Eigen::VectorXcd WaveOperatorProbe::transform(double t) const {
  const auto W = apply_W(*q_, f_, t, std::span<const double>(x_.data(), std::size_t(x_.size())));
  const Eigen::VectorXcd wf = w_.cast<cplx>().cwiseProduct(W.samples);
  const Eigen::VectorXd re = U_ * wf.real(), im = U_ * wf.imag();
  Eigen::VectorXcd out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

Eigen::VectorXcd WaveOperatorProbe::evolved_transform(double t) const {
  const Eigen::VectorXd& k = model_->k;
  Eigen::VectorXcd v = transform(t);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= std::exp(cplx(0, -k(i) * t));
  return v;
}

Eigen::VectorXcd WaveOperatorProbe::limit_candidate() const {
  const Eigen::VectorXd& k = model_->k;
  Eigen::VectorXcd g(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    const double kk = k(i);
    g(i) = (kk >= f_.a && kk <= f_.b)
               ? std::conj(model_->jm(i)) * f_.fhat(kk) / cplx(0, 2 * kk)
               : cplx(0);
  }
  return g;
}

double WaveOperatorProbe::norm(const Eigen::VectorXcd& v) const {
  return std::sqrt((model_->drho.array() * v.array().abs2()).sum());
}

double WaveOperatorProbe::zero_energy_mass(double t, double delta) const {
  const Eigen::VectorXcd v = transform(t);
  double m = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (model_->k(i) * model_->k(i) <= delta) m += model_->drho(i) * std::norm(v(i));
  return m;
}

double WaveOperatorProbe::localization_tail(double t) const {
  const double total = f_.norm2();
  if (!(t > 0) || total == 0) return 1;
  const double r = std::sqrt(t * omega(*q_, t));
  if (r == 0) return 1;
  const auto ns = quad::composite_gauss(t - r, t + r, {}, 0.25, 16);
  const auto W = apply_W(*q_, f_, t, std::span<const double>(ns.x.data(), std::size_t(ns.x.size())));
  const double inside = (ns.w.array() * W.samples.array().abs2()).sum();
  return std::max(0.0, 1 - inside / total);
}

bool decay_hypothesis(const Potential& q, double R) {
  if (q.is_compact() || q.is_zero()) return true;
  if (!(R > 0)) throw std::invalid_argument("decay_hypothesis: R must be positive");
  double s1 = 0, s2 = 0;
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double x = R * i / n;
    const double v = q.envelope(x) * std::sqrt(1 + x);
    (x <= 0.5 * R ? s1 : s2) = std::max(x <= 0.5 * R ? s1 : s2, v);
  }
  return s2 <= s1 * (1 + 1e-12);
}

WaveopConvergence waveop_convergence(const WaveOperatorProbe& probe, const Potential& q,
                                     std::span<const double> tlist, double delta) {
  WaveopConvergence out;
  out.hypothesis_ok = decay_hypothesis(q, probe.x_max());
  Eigen::VectorXcd prev;
  for (std::size_t i = 0; i < tlist.size(); ++i) {
    const double t = tlist[i];
    if (i > 0 && !(t > tlist[i - 1]))
      throw std::invalid_argument("waveop_convergence: tlist must increase");
    const Eigen::VectorXcd v = probe.evolved_transform(t);
    WaveopRecord r;
    r.t = t;
    r.cauchy_gap = i == 0 ? std::numeric_limits<double>::quiet_NaN() : probe.norm(v - prev);
    r.norm = probe.norm(v);
    double zm = 0;
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (probe.model().k(j) * probe.model().k(j) <= delta)
        zm += probe.model().drho(j) * std::norm(v(j));
    r.zero_energy_mass = zm;
    r.localization_tail = t > 0 ? probe.localization_tail(t) : 1;
    out.records.push_back(r);
    prev = v;
  }
  return out;
}

WaveopConvergence waveop_convergence(const Potential& q, const BandLimited& f,
                                     std::span<const double> tlist, const SpectralModel& model,
                                     double delta) {
  if (tlist.empty()) return {};
  const WaveOperatorProbe probe(q, f, model, tlist.back() + 60);
  return waveop_convergence(probe, q, tlist, delta);
}

std::vector<double> cesaro_gaps(const WaveOperatorProbe& probe, std::span<const double> Ts,
                                double t_panel) {
  if (Ts.empty()) return {};
  for (std::size_t i = 0; i < Ts.size(); ++i)
    if (!(Ts[i] > 0) || (i > 0 && !(Ts[i] > Ts[i - 1])))
      throw std::invalid_argument("cesaro_gap: T must be positive and increasing");
  const Eigen::VectorXcd G = probe.limit_candidate();
  std::vector<double> out;
  double acc = 0, lo = 0;
  for (double T : Ts) {
    const auto ts = quad::composite_gauss(lo, T, {}, t_panel, 8);
    for (Eigen::Index i = 0; i < ts.x.size(); ++i) {
      const double n = probe.norm(probe.evolved_transform(ts.x(i)) - G);
      acc += ts.w(i) * n * n;
    }
    out.push_back(acc / T);
    lo = T;
  }
  return out;
}

double cesaro_gap(const WaveOperatorProbe& probe, double T, double t_panel) {
  const double Ts[] = {T};
  return cesaro_gaps(probe, Ts, t_panel).front();
}

double cesaro_gap(const Potential& q, const BandLimited& f, double T, const SpectralModel& model) {
  const WaveOperatorProbe probe(q, f, model, T + 60);
  return cesaro_gap(probe, T);
}

cplx oscillatory_vp(double gamma, double T) {
  // v.p. int dxi / (xi - 1) over [1/2, 2] is ln 2; the remainder is regular:
  // (h(xi) - h(1)) / (xi - 1) = h(1) (e^{i Delta} - 1) / Delta (gamma - T / xi)
  const double rate = std::abs(gamma) + 4 * std::abs(T);
  const int panels = std::max(16, int(std::ceil(1.5 * rate / 3)));
  auto regular = [&](double xi) {
    const double delta = (xi - 1) * (gamma - T / xi);
    return expm1_ratio(delta) * (gamma - T / xi);
  };
  const cplx h1 = std::exp(cplx(0, T));
  const cplx left = integrate_panels(regular, 0.5, 1.0, (panels + 2) / 3);
  const cplx right = integrate_panels(regular, 1.0, 2.0, panels - (panels + 2) / 3);
  return h1 * (left + right + std::log(2.0));
}

OscillatoryBound oscillatory_bound_probe(std::span<const double> gamma_grid,
                                         std::span<const double> T_grid) {
  const std::size_t ng = gamma_grid.size(), nt = T_grid.size();
  std::vector<double> vals(ng * nt);
  parallel_for(ng * nt, [&](std::size_t idx) {
    vals[idx] = std::abs(oscillatory_vp(gamma_grid[idx / nt], T_grid[idx % nt]));
  });
  OscillatoryBound out;
  for (std::size_t idx = 0; idx < vals.size(); ++idx)
    if (vals[idx] > out.max_abs) {
      out.max_abs = vals[idx];
      out.argmax = {gamma_grid[idx / nt], T_grid[idx % nt]};
    }
  return out;
}

std::vector<double> log_grid(double g_min, double g_max, int n, bool symmetric) {
  if (!(g_min > 0) || !(g_max >= g_min) || n < 1)
    throw std::invalid_argument("log_grid: need 0 < g_min <= g_max and n >= 1");
  std::vector<double> out{0.0};
  for (int i = 0; i < n; ++i) {
    const double g = n == 1 ? g_min : g_min * std::pow(g_max / g_min, double(i) / (n - 1));
    out.push_back(g);
    if (symmetric) out.push_back(-g);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace wavescat
