#pragma once

#include "gtm/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gtm {

enum class EmitFormat { csv, json };

enum class ValueKind { real, integer, text };

struct KeySpec {
  std::string name;
  ValueKind kind = ValueKind::real;
  bool required = false;
  std::string fallback;  // default expression; empty means no default
  std::string help;
};

/// Subcommands that take key/value parameters.
const std::vector<std::string>& subcommand_names();

/// Accepted keys of a subcommand, excluding the common keys `output` and
/// `format`. Throws ConfigError for an unknown subcommand.
const std::vector<KeySpec>& subcommand_keys(const std::string& subcommand);

using Assignments = std::vector<std::pair<std::string, std::string>>;

/// Reads `key = value` lines; `#` starts a comment, `[section]` headers are
/// ignored and values may be quoted.
Assignments read_config_file(const std::filesystem::path& path);

/// Splits "key=value".
std::pair<std::string, std::string> split_assignment(const std::string& text);

struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> expressions;  // every key after defaults, as written
  std::map<std::string, double> numbers;           // real and integer keys
  std::map<std::string, std::string> texts;        // text keys
  std::string output;                              // empty: standard output
  std::uint64_t seed = 1;
  EmitFormat format = EmitFormat::csv;

  bool has(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
};

/// Merges file values with flags (flags win), applies defaults and evaluates
/// every numeric expression. Keys may reference other numeric keys.
RunConfig parse_config(const std::string& subcommand, const Assignments& flags,
                       const std::optional<std::filesystem::path>& file = std::nullopt);

/// Same, from already merged assignments.
RunConfig parse_assignments(const std::string& subcommand, const Assignments& assignments);

/// Evaluates a set of expressions that may reference each other by key.
std::map<std::string, double> evaluate_all(const std::map<std::string, std::string>& expressions);

}  // namespace gtm
