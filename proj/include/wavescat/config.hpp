#pragma once

#include "wavescat/evolution.hpp"
#include "wavescat/potential.hpp"
#include "wavescat/waveop.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavescat {

/// Invalid configuration; the message starts with "source:line: ".
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// `key = value` lines; '#' starts a comment. Inline configs separate
/// entries with ';' and count entries as lines.
struct KeyValues {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source;
  std::map<std::string, Entry> entries;

  /// Throws ConfigError naming the first key outside `allowed`.
  void restrict_to(const std::vector<std::string>& allowed) const;
  bool has(const std::string& key) const { return entries.count(key) > 0; }
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

KeyValues parse_key_values(const std::string& text, const std::string& source, char separator = '\n');

/// A path to an existing file is read; anything else is parsed inline.
KeyValues load_config(const std::string& arg);

/// kind = zero | square_well (depth, width) | sampled (file or points) |
/// oscillatory_decay (c, a, b); optional truncate = R.
Potential potential_from_config(const KeyValues& kv);

/// Rows "x,q" with an optional header; errors name the CSV line.
spec::Sampled load_sampled_csv(const std::string& path);

/// kind = bump (center, width, power) | gaussian (center, sigma, k0);
/// psi = zero | minus_i_sqrtH.
CauchyData data_from_config(const KeyValues& kv);

/// kind = bump (a, b, x0).
BandLimited fhat_from_config(const KeyValues& kv);

/// "10,20,40" -> {10, 20, 40}; throws ConfigError on junk.
std::vector<double> parse_list(const std::string& s, const std::string& what);

}  // namespace wavescat
