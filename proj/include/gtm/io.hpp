#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace gtm {

/// %.17g: round-trips every double.
std::string format_number(double v);

/// CSV with an optional `#` reference line followed by a header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& columns, const std::string& reference = "");

  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

void write_json(std::ostream& out, const nlohmann::json& value);

/// Opens `path` for writing, creating parent directories.
std::ofstream open_output(const std::filesystem::path& path);

/// GTM_OUTPUT_DIR if set, else the current directory.
std::filesystem::path default_output_dir();

/// Relative paths are taken relative to default_output_dir().
std::filesystem::path resolve_output_path(const std::string& output);

}  // namespace gtm
