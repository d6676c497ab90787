#pragma once

#include "wavescat/potential.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace wavescat {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Header row, '.' decimal point, 12 significant digits.
std::string to_csv(const Table& t);

/// Two-space indented JSON with a trailing newline; NaN becomes null.
std::string to_json(const nlohmann::json& j);

/// j[name + "_re"], j[name + "_im"].
void put_complex(nlohmann::json& j, const std::string& name, cplx z);

/// Writes through a temporary in the same directory and renames it over
/// `path`. I/O errors are thrown with the system message.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace wavescat
