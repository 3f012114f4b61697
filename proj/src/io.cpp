#include "gtm/io.hpp"

#include "gtm/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace gtm {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& columns, const std::string& reference)
    : out_(out), columns_(columns.size()) {
  if (!reference.empty()) out_ << "# " << reference << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::invalid_argument("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
}

void write_json(std::ostream& out, const nlohmann::json& value) { out << value.dump(2) << '\n'; }

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

std::filesystem::path default_output_dir() {
  if (const char* dir = std::getenv("GTM_OUTPUT_DIR"); dir && *dir) return dir;
  return std::filesystem::current_path();
}

std::filesystem::path resolve_output_path(const std::string& output) {
  std::filesystem::path p(output);
  return p.is_absolute() ? p : default_output_dir() / p;
}

}  // namespace gtm
