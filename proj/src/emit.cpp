#include "wavescat/emit.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace wavescat {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  // snprintf follows LC_NUMERIC; the toolkit never changes it, but be safe
  for (char* p = buf; *p; ++p)
    if (*p == ',') *p = '.';
  return buf;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw std::logic_error("to_csv: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + number(row[i]);
    out += '\n';
  }
  return out;
}

std::string to_json(const nlohmann::json& j) { return j.dump(2) + '\n'; }

void put_complex(nlohmann::json& j, const std::string& name, cplx z) {
  j[name + "_re"] = z.real();
  j[name + "_im"] = z.imag();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::system_error(errno, std::generic_category(), tmp);
    out << content;
    out.flush();
    if (!out) throw std::system_error(errno, std::generic_category(), tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::system_error(ec, path.string());
  }
}

}  // namespace wavescat
