// Command-line front end: one subcommand per toolkit operation, CSV or JSON
// on stdout or into --out.
//
// Exit codes: 0 ok, 1 failure, 2 invalid configuration or usage,
// 3 numerical-quality warning (result still emitted).

#include "wavescat/acceptance.hpp"
#include "wavescat/config.hpp"
#include "wavescat/det2.hpp"
#include "wavescat/emit.hpp"
#include "wavescat/evolution.hpp"
#include "wavescat/jost.hpp"
#include "wavescat/parallel.hpp"
#include "wavescat/spectral.hpp"
#include "wavescat/waveop.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <variant>

using namespace wavescat;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kWarning = 3 };

struct Result {
  std::variant<Table, json> body;
  std::vector<std::string> warnings;
  std::string text;  // plain-text rendering used when --format is not given
};

Table json_to_table(const json& j) {
  const json rows = j.is_array() ? j : json::array({j});
  Table t;
  for (const auto& row : rows) {
    if (!row.is_object()) throw ConfigError("--format csv: output is not a list of records");
    if (t.columns.empty())
      for (const auto& [k, v] : row.items())
        if (v.is_number() || v.is_boolean() || v.is_null()) t.columns.push_back(k);
    if (t.columns.empty()) throw ConfigError("--format csv: output has no scalar fields");
    std::vector<double> r;
    for (const auto& c : t.columns) {
      const json& v = row.at(c);
      if (v.is_number()) r.push_back(v.get<double>());
      else if (v.is_boolean()) r.push_back(v.get<bool>() ? 1 : 0);
      else if (v.is_null()) r.push_back(std::numeric_limits<double>::quiet_NaN());
      else throw ConfigError("--format csv: field '" + c + "' is not a scalar");
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

json table_to_json(const Table& t) {
  json out = json::array();
  for (const auto& row : t.rows) {
    json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
    out.push_back(std::move(r));
  }
  return out;
}

std::string render(const Result& r, const std::string& format, std::string& ext) {
  if (format.empty() && !r.text.empty()) {
    ext = "txt";
    return r.text;
  }
  const bool table = std::holds_alternative<Table>(r.body);
  const std::string f = format.empty() ? (table ? "csv" : "json") : format;
  ext = f;
  if (f == "csv") return to_csv(table ? std::get<Table>(r.body) : json_to_table(std::get<json>(r.body)));
  return to_json(table ? table_to_json(std::get<Table>(r.body)) : std::get<json>(r.body));
}

double radius(const Potential& q, double R) {
  if (R > 0) return R;
  if (!q.is_compact()) throw ConfigError("--R is required for a non-compact potential");
  return q.support_bound() > 0 ? q.support_bound() : 1.0;
}

json record(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

// ------------------------------------------------------------- commands

struct Common {
  std::string potential;
  double R = 0;
};

Result cmd_jost(const Common& c, double kre, double kim, double tol) {
  const auto q = potential_from_config(load_config(c.potential));
  const double R = radius(q, c.R);
  JostOptions opt;
  opt.tol = tol;
  const auto d = solve_psi(q, {kre, kim}, R, opt);
  const auto s = scattering_ab(d);
  json j;
  j["k_re"] = kre;
  j["k_im"] = kim;
  j["R"] = R;
  put_complex(j, "jm", d.jm);
  put_complex(j, "j", d.j);
  put_complex(j, "jprime0", d.jprime0);
  put_complex(j, "a", s.a);
  put_complex(j, "b", s.b);
  put_complex(j, "am", s.am);
  j["iterations"] = d.iteration_count;
  j["residual"] = d.residual;
  Result r{j, {}};
  if (d.residual > tol) r.warnings.push_back("Picard residual above tolerance");
  return r;
}

Result cmd_det2(const Common& c, double kre, double kim, int nodes) {
  const auto q = potential_from_config(load_config(c.potential));
  const auto d = det2_modified_jost(q, {kre, kim}, radius(q, c.R), nodes);
  json j;
  put_complex(j, "jm", d.jm);
  j["nodes_used"] = d.nodes_used;
  j["doubling_gap"] = d.doubling_gap;
  j["converged"] = d.converged;
  Result r{j, {}};
  if (!d.converged) r.warnings.push_back("det2 node doubling did not converge");
  return r;
}

Result cmd_spectral(const Common& c, double kmin, double kmax, int knum) {
  const auto q = potential_from_config(load_config(c.potential));
  const double R = radius(q, c.R);
  if (!(kmax > kmin) || knum < 1) throw ConfigError("need kmin < kmax and knum >= 1");
  Table t{{"k", "E", "mu", "m_re", "m_im"}, {}};
  Result r{Table{}, {}};
  bool converged = true;
  for (int i = 0; i < knum; ++i) {
    const double k = knum == 1 ? kmin : kmin + (kmax - kmin) * i / (knum - 1);
    const auto mu = spectral_density_checked(q, k, R);
    converged = converged && mu.converged;
    const cplx m = m_function(q, k, R);
    t.rows.push_back({k, k * k, mu.mu, m.real(), m.imag()});
  }
  r.body = t;
  if (!converged) r.warnings.push_back("spectral density did not settle under R doubling");
  return r;
}

Result cmd_bound_states(const Common& c, const std::string& which) {
  const auto q = potential_from_config(load_config(c.potential));
  BoundStateKind kind;
  if (which == "line_glued") kind = BoundStateKind::line_glued;
  else if (which == "halfline_dirichlet") kind = BoundStateKind::halfline_dirichlet;
  else throw ConfigError("--which must be line_glued or halfline_dirichlet");
  const auto b = bound_states(q, radius(q, c.R), kind);
  json a = json::array();
  for (double xi : b.values) a.push_back({{"xi", xi}, {"E", -xi * xi}});
  Result r{a, {}};
  if (b.threshold_warning) r.warnings.push_back("a root may sit below the scan threshold");
  return r;
}

Result cmd_trace(const Common& c) {
  const auto q = potential_from_config(load_config(c.potential));
  const auto t = trace_identity_check(q, radius(q, c.R));
  json j;
  j["lhs_continuum"] = t.lhs_continuum;
  j["lhs_points"] = t.lhs_points;
  j["rhs"] = t.rhs;
  j["tail_bound"] = t.tail_bound;
  j["tail_flag"] = t.tail_flag;
  j["xis"] = record(t.xis);
  Result r{j, {}};
  if (t.tail_flag) r.warnings.push_back("continuum tail beyond kmax is not negligible");
  return r;
}

struct EvolveOptions {
  std::string data;
  double t = 0;
  std::string method = "spectral";
  double dx = 0.01, dt = 0, kmax = 40, delta = 2e-3;
  bool project = false;
};

Result cmd_evolve(const Common& c, const EvolveOptions& o) {
  const auto q = potential_from_config(load_config(c.potential));
  const auto d = data_from_config(load_config(o.data));
  FieldState s;
  Result r{Table{}, {}};
  if (o.method == "fdtd") {
    if (d.psi_mode == PsiMode::minus_i_sqrtH_of_phi)
      throw ConfigError("--method fdtd needs psi = zero");
    s = evolve_fdtd(q, d, o.t, o.dx, o.dt > 0 ? o.dt : 0.9 * o.dx);
  } else if (o.method == "spectral") {
    const double X = d.support + o.t + 5;
    ModelOptions mo;
    mo.R = c.R;
    mo.kmax = o.kmax;
    mo.delta = o.delta;
    mo.panel = synthesis_panel(o.t, X, d.support);
    const auto M = build_model(q, mo);
    const auto coef = spectral_coefficients(q, d, M);
    s = SpectralSynthesizer(q, M, uniform_grid(X, o.dx)).state(coef, o.t, o.project);
    if (coef.excluded_flag) r.warnings.push_back("data mass outside the model k-grid exceeds 1%");
  } else {
    throw ConfigError("--method must be spectral or fdtd");
  }
  Table t{{"x", "y_re", "y_im", "yt_re", "yt_im"}, {}};
  for (Eigen::Index i = 0; i < s.x.size(); ++i)
    t.rows.push_back({s.x(i), s.y(i).real(), s.y(i).imag(), s.yt(i).real(), s.yt(i).imag()});
  r.body = t;
  return r;
}

Result cmd_ch1(const Common& c, const std::string& data, const std::string& Tlist, double window,
               double kmax, double delta) {
  const auto q = potential_from_config(load_config(c.potential));
  const auto d = data_from_config(load_config(data));
  const auto Ts = parse_list(Tlist, "--Tlist");
  const double Tmax = *std::max_element(Ts.begin(), Ts.end());
  const double Tmin = *std::min_element(Ts.begin(), Ts.end());
  if (!(Tmin > 0)) throw ConfigError("--Tlist: times must be positive");
  if (window <= 0) window = std::min(9.0, 0.9 * Tmin);
  ModelOptions mo;
  mo.R = c.R;
  mo.kmax = kmax;
  mo.delta = delta;
  mo.panel = synthesis_panel(Tmax, Tmax + window, d.support);
  const auto M = build_model(q, mo);
  std::vector<double> xs;
  const int n = int(std::round(20 * window));
  for (int i = -n; i <= n; ++i) xs.push_back(window * i / n);
  const auto e = convergence_test_ch1(q, d.phi, d.support, Ts, xs, M);
  json a = json::array();
  for (std::size_t i = 0; i < Ts.size(); ++i) a.push_back({{"T", Ts[i]}, {"sup_error", e[i]}});
  return {a, {}};
}

Result cmd_waveop(const Common& c, const std::string& fhat, const std::string& tlist, double kmax,
                  double delta, double zero_delta) {
  const auto q = potential_from_config(load_config(c.potential));
  const auto f = fhat_from_config(load_config(fhat));
  const auto ts = parse_list(tlist, "--tlist");
  const double x_max = ts.back() + 60;
  ModelOptions mo;
  mo.R = c.R > 0 ? c.R : (q.is_compact() ? 0 : x_max);
  mo.kmax = kmax;
  mo.delta = delta;
  mo.panel = 0.1;
  const auto M = build_model(q, mo);
  const WaveOperatorProbe P(q, f, M, x_max);
  const auto w = waveop_convergence(P, q, ts, zero_delta);
  json a = json::array();
  for (const auto& rec : w.records) {
    json j;
    j["t"] = rec.t;
    j["cauchy_gap"] = std::isnan(rec.cauchy_gap) ? json(nullptr) : json(rec.cauchy_gap);
    j["norm"] = rec.norm;
    j["zero_energy_mass"] = rec.zero_energy_mass;
    j["localization_tail"] = rec.localization_tail;
    a.push_back(std::move(j));
  }
  Result r{a, {}};
  if (!w.hypothesis_ok) r.warnings.push_back("|q| <= C (1 + x)^(-1/2) fails on samples");
  return r;
}

Result cmd_probe_osc(double gmax, double Tmax, int n) {
  if (!(gmax > 0) || !(Tmax > 0)) throw ConfigError("--gamma-max and --T-max must be positive");
  const auto g = log_grid(std::min(10.0, gmax), gmax, n, true);
  const auto T = log_grid(std::min(10.0, Tmax), Tmax, n, false);
  const auto b = oscillatory_bound_probe(g, T);
  json j;
  j["max_abs"] = b.max_abs;
  j["argmax"] = {{"gamma", b.argmax.first}, {"T", b.argmax.second}};
  j["vp_at_0_0"] = std::abs(oscillatory_vp(0, 0));
  return {j, {}};
}

Result cmd_verify(const std::string& criteria, bool& failed) {
  std::vector<int> ids;
  if (!criteria.empty())
    for (double v : parse_list(criteria, "--criteria")) {
      if (v != std::round(v) || v < 1 || v > kCriteria) throw ConfigError("--criteria: ids are 1..12");
      ids.push_back(int(v));
    }
  json a = json::array();
  std::string text;
  for (const auto& r : run_acceptance(ids)) {
    text += format_result(r) + "\n";
    failed = failed || !r.passed;
    a.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail},
                 {"seconds", r.seconds}, {"budget", r.budget}});
  }
  return {a, {}, text};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavescat: half-line scattering and wave-evolution toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir, format;
  unsigned threads = 0;
  bool seedless = false;
  app.add_option("--out", out_dir, "write <command>.<csv|json> into this directory");
  app.add_option("--format", format, "csv or json (default per command); csv keeps scalar fields")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "worker threads (0: hardware)");
  app.add_flag("--seedless", seedless, "run twice and require byte-identical output");

  Common common;
  auto add_potential = [&](CLI::App* s, bool need_R_flag = true) {
    s->add_option("--potential", common.potential, "potential config file or inline k=v;k=v")
        ->required();
    if (need_R_flag)
      s->add_option("--R", common.R, "truncation radius")->check(CLI::PositiveNumber);
  };

  std::function<Result()> run;
  bool verify_failed = false;
  double kre = 0, kim = 0, tol = 1e-10, kmin = 0.1, kmax = 5, delta = 2e-3, window = 0;
  double zero_delta = 0.01, gamma_max = 1e3, T_max = 1e4;
  int nodes = 128, knum = 50, n_grid = 32;
  std::string which = "line_glued", data, fhat, Tlist = "10,20,40", tlist = "10,20,40,80", criteria;
  EvolveOptions ev;

  auto* jost = app.add_subcommand("jost", "Jost data at one wavenumber");
  add_potential(jost);
  jost->add_option("--k-re", kre)->required();
  jost->add_option("--k-im", kim);
  jost->add_option("--tol", tol)->check(CLI::PositiveNumber);
  jost->callback([&] { run = [&] { return cmd_jost(common, kre, kim, tol); }; });

  auto* det2 = app.add_subcommand("det2", "modified Jost function by the determinant route");
  add_potential(det2);
  det2->add_option("--k-re", kre)->required();
  det2->add_option("--k-im", kim);
  det2->add_option("--nodes", nodes)->check(CLI::PositiveNumber);
  det2->callback([&] { run = [&] { return cmd_det2(common, kre, kim, nodes); }; });

  auto* spc = app.add_subcommand("spectral", "spectral density and m-function samples");
  add_potential(spc);
  spc->add_option("--kmin", kmin)->check(CLI::PositiveNumber);
  spc->add_option("--kmax", kmax)->check(CLI::PositiveNumber);
  spc->add_option("--knum", knum)->check(CLI::PositiveNumber);
  spc->callback([&] { run = [&] { return cmd_spectral(common, kmin, kmax, knum); }; });

  auto* bs = app.add_subcommand("bound-states", "bound states on the imaginary axis");
  add_potential(bs);
  bs->add_option("--which", which)->check(CLI::IsMember({"line_glued", "halfline_dirichlet"}));
  bs->callback([&] { run = [&] { return cmd_bound_states(common, which); }; });

  auto* tc = app.add_subcommand("trace-check", "trace identity");
  add_potential(tc);
  tc->callback([&] { run = [&] { return cmd_trace(common); }; });

  auto* evolve = app.add_subcommand("evolve", "solve the wave equation to time t");
  add_potential(evolve);
  evolve->add_option("--data", ev.data, "initial data config")->required();
  evolve->add_option("--t", ev.t)->required()->check(CLI::NonNegativeNumber);
  evolve->add_option("--method", ev.method)->check(CLI::IsMember({"spectral", "fdtd"}));
  evolve->add_option("--dx", ev.dx)->check(CLI::PositiveNumber);
  evolve->add_option("--dt", ev.dt)->check(CLI::PositiveNumber);
  evolve->add_option("--kmax", ev.kmax)->check(CLI::PositiveNumber);
  evolve->add_option("--delta", ev.delta)->check(CLI::PositiveNumber);
  evolve->add_flag("--project", ev.project, "drop bound-state components");
  evolve->callback([&] { run = [&] { return cmd_evolve(common, ev); }; });

  auto* ch1 = app.add_subcommand("ch1-test", "distance to the asymptotic profile along T");
  add_potential(ch1);
  ch1->add_option("--data", data)->required();
  ch1->add_option("--Tlist", Tlist);
  ch1->add_option("--window", window, "half width of the x-window around T (default min(9, 0.9 min T))")
      ->check(CLI::PositiveNumber);
  ch1->add_option("--kmax", kmax)->check(CLI::PositiveNumber);
  ch1->add_option("--delta", delta)->check(CLI::PositiveNumber);
  ch1->callback([&] {
    if (!ch1->count("--kmax")) kmax = 40;
    run = [&] { return cmd_ch1(common, data, Tlist, window, kmax, delta); };
  });

  auto* wo = app.add_subcommand("waveop", "Cauchy gaps of the modified wave operator");
  add_potential(wo);
  wo->add_option("--fhat", fhat, "band-limited profile config")->required();
  wo->add_option("--tlist", tlist);
  wo->add_option("--kmax", kmax)->check(CLI::PositiveNumber);
  wo->add_option("--delta", delta)->check(CLI::PositiveNumber);
  wo->add_option("--zero-delta", zero_delta, "energy cutoff of the zero-energy mass")
      ->check(CLI::PositiveNumber);
  wo->callback([&] {
    if (!wo->count("--kmax")) kmax = 8;
    if (!wo->count("--delta")) delta = 1e-3;
    run = [&] { return cmd_waveop(common, fhat, tlist, kmax, delta, zero_delta); };
  });

  auto* po = app.add_subcommand("probe-osc", "sup of the oscillatory principal value integral");
  po->add_option("--gamma-max", gamma_max)->check(CLI::PositiveNumber);
  po->add_option("--T-max", T_max)->check(CLI::PositiveNumber);
  po->add_option("--n", n_grid, "log-grid points per axis")->check(CLI::PositiveNumber);
  po->callback([&] { run = [&] { return cmd_probe_osc(gamma_max, T_max, n_grid); }; });

  auto* va = app.add_subcommand("verify-all", "acceptance suite as a pass/fail table");
  va->add_option("--criteria", criteria, "comma-separated subset of 1..12");
  va->callback([&] { run = [&] { return cmd_verify(criteria, verify_failed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  if (threads) set_thread_count(threads);

  try {
    Result r = run();
    std::string ext;
    const std::string text = render(r, format, ext);
    if (seedless) {
      std::string ext2;
      if (render(run(), format, ext2) != text) {
        std::fprintf(stderr, "error: output differs between identical runs\n");
        return kFailure;
      }
    }
    if (out_dir.empty()) {
      std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
      std::filesystem::create_directories(out_dir);
      write_atomic(std::filesystem::path(out_dir) / (app.get_subcommands().front()->get_name() + "." + ext),
                   text);
    }
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (verify_failed) return kFailure;
    return r.warnings.empty() ? kOk : kWarning;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
}
