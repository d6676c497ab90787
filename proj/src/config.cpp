#include "wavescat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wavescat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool to_number(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data() + (t[0] == '+' ? 1 : 0);
  const auto [p, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && p == t.data() + t.size() && std::isfinite(out);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void KeyValues::restrict_to(const std::vector<std::string>& allowed) const {
  for (const auto& [key, e] : entries)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(source + ":" + std::to_string(e.line) + ": unknown key '" + key + "'");
}

void KeyValues::fail(const std::string& key, const std::string& what) const {
  const auto it = entries.find(key);
  const std::string where = it == entries.end() ? source : source + ":" + std::to_string(it->second.line);
  throw ConfigError(where + ": " + what);
}

std::string KeyValues::text(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) fail(key, "missing key '" + key + "'");
  return it->second.value;
}

std::string KeyValues::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double KeyValues::number(const std::string& key) const {
  double v = 0;
  if (!to_number(text(key), v)) fail(key, "'" + key + "' is not a number: '" + text(key) + "'");
  return v;
}

double KeyValues::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

KeyValues parse_key_values(const std::string& text, const std::string& source, char separator) {
  KeyValues kv;
  kv.source = source;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw, separator)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    const std::string where = source + ":" + std::to_string(line) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value, got '" + s + "'");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (kv.entries.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    kv.entries[key] = {value, line};
  }
  return kv;
}

KeyValues load_config(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return parse_key_values(read_file(arg), arg);
  if (arg.find('=') == std::string::npos)
    throw ConfigError(arg + ": no such file, and not an inline key=value config");
  return parse_key_values(arg, "<inline>", ';');
}

spec::Sampled load_sampled_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  spec::Sampled s;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    const auto comma = t.find(',');
    double x = 0, v = 0;
    const bool ok = comma != std::string::npos && to_number(t.substr(0, comma), x) &&
                    to_number(t.substr(comma + 1), v);
    if (!ok) {
      if (s.grid.empty() && line == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(line) + ": expected 'x,q', got '" + t + "'");
    }
    if (!s.grid.empty() && !(x > s.grid.back().first))
      throw ConfigError(path + ":" + std::to_string(line) + ": x must increase");
    s.grid.emplace_back(x, v);
  }
  if (s.grid.size() < 2) throw ConfigError(path + ": need at least two samples");
  return s;
}

Potential potential_from_config(const KeyValues& kv) {
  const std::string kind = kv.text("kind");
  PotentialSpec sp;
  if (kind == "zero") {
    kv.restrict_to({"kind", "truncate"});
    sp = spec::Zero{};
  } else if (kind == "square_well") {
    kv.restrict_to({"kind", "depth", "width", "truncate"});
    const double w = kv.number("width", 1);
    if (!(w > 0)) kv.fail("width", "width must be positive");
    sp = spec::SquareWell{kv.number("depth"), w};
  } else if (kind == "oscillatory_decay") {
    kv.restrict_to({"kind", "c", "a", "b", "truncate"});
    sp = spec::OscillatoryDecay{kv.number("c"), kv.number("a"), kv.number("b")};
  } else if (kind == "sampled") {
    kv.restrict_to({"kind", "file", "points", "truncate"});
    if (kv.has("file") == kv.has("points")) kv.fail("kind", "sampled needs exactly one of file, points");
    if (kv.has("file")) {
      std::filesystem::path p = kv.text("file");
      if (p.is_relative() && kv.source != "<inline>")
        p = std::filesystem::path(kv.source).parent_path() / p;
      sp = load_sampled_csv(p.string());
    } else {
      // "x:q x:q ..."
      spec::Sampled s;
      std::istringstream in(kv.text("points"));
      std::string tok;
      while (in >> tok) {
        const auto c = tok.find(':');
        double x = 0, v = 0;
        if (c == std::string::npos || !to_number(tok.substr(0, c), x) || !to_number(tok.substr(c + 1), v))
          kv.fail("points", "bad sample '" + tok + "', expected x:q");
        s.grid.emplace_back(x, v);
      }
      sp = s;
    }
  } else {
    kv.fail("kind", "unknown potential kind '" + kind + "'");
  }
  Potential q;
  try {
    q = make_potential(sp);
  } catch (const std::invalid_argument& e) {
    kv.fail("kind", e.what());
  }
  if (kv.has("truncate")) {
    const double R = kv.number("truncate");
    if (!(R > 0)) kv.fail("truncate", "truncate must be positive");
    q = q.truncate(R);
  }
  return q;
}

CauchyData data_from_config(const KeyValues& kv) {
  const std::string kind = kv.text("kind");
  CauchyData d;
  if (kind == "bump") {
    kv.restrict_to({"kind", "center", "width", "power", "psi"});
    const double c = kv.number("center"), w = kv.number("width"), p = kv.number("power", 6);
    if (!(w > 0) || c - w < 0) kv.fail("width", "bump must lie in x >= 0 with positive width");
    if (!(p >= 1)) kv.fail("power", "power must be at least 1");
    d.phi = [=](double x) -> cplx {
      const double s = (x - c) / w;
      return std::abs(s) >= 1 ? 0.0 : std::pow(1 - s * s, p);
    };
    d.support = c + w;
  } else if (kind == "gaussian") {
    kv.restrict_to({"kind", "center", "sigma", "k0", "psi"});
    const double c = kv.number("center"), s = kv.number("sigma"), k0 = kv.number("k0", 0);
    if (!(s > 0)) kv.fail("sigma", "sigma must be positive");
    d.phi = [=](double x) -> cplx {
      return std::exp(-0.5 * (x - c) * (x - c) / (s * s)) * std::cos(k0 * x);
    };
    d.support = c + 8 * s;
  } else {
    kv.fail("kind", "unknown data kind '" + kind + "'");
  }
  const std::string psi = kv.text("psi", "zero");
  if (psi == "zero")
    d.psi_mode = PsiMode::zero;
  else if (psi == "minus_i_sqrtH")
    d.psi_mode = PsiMode::minus_i_sqrtH_of_phi;
  else
    kv.fail("psi", "psi must be zero or minus_i_sqrtH");
  return d;
}

BandLimited fhat_from_config(const KeyValues& kv) {
  const std::string kind = kv.text("kind", "bump");
  if (kind != "bump") kv.fail("kind", "unknown fhat kind '" + kind + "'");
  kv.restrict_to({"kind", "a", "b", "x0"});
  const double a = kv.number("a", 1), b = kv.number("b", 3);
  if (!(a > 0) || !(b > a)) kv.fail(kv.has("a") ? "a" : "b", "need 0 < a < b");
  return bump_profile(a, b, kv.number("x0", 0));
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    double v = 0;
    if (!to_number(tok, v)) throw ConfigError(what + ": bad number '" + trim(tok) + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

}  // namespace wavescat
