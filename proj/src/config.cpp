#include "gtm/config.hpp"

#include "gtm/expression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

namespace gtm {

namespace {

using K = ValueKind;

const std::map<std::string, std::vector<KeySpec>>& key_table() {
  static const std::map<std::string, std::vector<KeySpec>> table = {
      {"potential",
       {{"mu", K::real, true, "", "kick strength"},
        {"eta", K::real, true, "", "channel spacing"},
        {"points", K::integer, false, "4096", "samples on [0, 2pi)"}}},
      {"simulate",
       {{"mu", K::real, true, "", "kick strength"},
        {"eta", K::real, true, "", "channel spacing"},
        {"beta", K::real, false, "0", "initial momentum p0 for fixed sampling"},
        {"sampling", K::text, false, "fixed", "fixed | uniform (p0 uniform in (-eta/2, eta/2))"},
        {"model", K::text, false, "gtm", "gtm | standard"},
        {"size", K::integer, false, "100000", "ensemble size"},
        {"kicks", K::integer, false, "10000", "number of kicks"},
        {"seed", K::integer, false, "1", "random seed"},
        {"window", K::integer, false, "100", "trailing average window in kicks"},
        {"ratio", K::real, false, "1.1", "spacing ratio of recorded times"}}},
      {"histogram",
       {{"mu", K::real, true, "", "kick strength"},
        {"eta", K::real, true, "", "channel spacing"},
        {"beta", K::real, false, "0", "initial momentum p0 for fixed sampling"},
        {"sampling", K::text, false, "uniform", "fixed | uniform"},
        {"size", K::integer, false, "100000", "ensemble size"},
        {"kicks", K::integer, false, "10000", "number of kicks"},
        {"seed", K::integer, false, "1", "random seed"},
        {"window", K::integer, false, "100", "trailing kicks accumulated"}}},
      {"portrait",
       {{"mu", K::real, true, "", "kick strength"},
        {"eta", K::real, true, "", "channel spacing"},
        {"theta0", K::real, false, "1", "initial angle"},
        {"p0", K::real, false, "0", "initial momentum"},
        {"orbits", K::integer, false, "1", "orbits, started at p0 + i*eta/orbits"},
        {"steps", K::integer, false, "10000", "steps per orbit"}}},
      {"resonance",
       {{"mu", K::real, true, "", "kick strength"},
        {"P", K::integer, true, "", "numerator of lambda/2pi"},
        {"Q", K::integer, true, "", "denominator of lambda/2pi"},
        {"r", K::integer, false, "0", "beta = r*lambda"},
        {"s", K::integer, false, "1", "eta = s*lambda"},
        {"theta0", K::real, false, "0.1", "lattice origin"},
        {"mode", K::text, false, "cycle", "cycle | census"},
        {"N0", K::integer, false, "0", "initial N for mode=cycle"},
        {"M0", K::integer, false, "0", "initial M for mode=cycle"},
        {"samples", K::integer, false, "0", "sampled census size; 0 is exhaustive"},
        {"seed", K::integer, false, "1", "random seed for sampled census"}}},
      {"pf",
       {{"mu", K::real, true, "", "kick strength"},
        {"eta", K::real, true, "", "channel spacing"},
        {"beta", K::real, false, "0", "quasi-momentum"},
        {"G", K::integer, false, "1024", "angle grid size (power of two)"},
        {"N_band", K::integer, false, "256", "band half-width"},
        {"steps", K::integer, false, "1000", "number of steps"},
        {"initial", K::text, false, "uniform", "uniform | gaussian | cell"},
        {"theta_c", K::real, false, "pi", "bump center"},
        {"width", K::real, false, "0.5", "gaussian width in cells"},
        {"n0", K::integer, false, "0", "initial band"},
        {"ordering", K::text, false, "printed", "printed | factorized"},
        {"every", K::integer, false, "1", "record every this many steps"},
        {"emit", K::text, false, "summary", "summary | harmonics | bands"}}},
      {"lattice",
       {{"model", K::text, false, "gtm", "gtm | qkr-tan | qkr-half"},
        {"mu", K::real, true, "", "kick strength"},
        {"eta", K::real, false, "", "channel spacing (gtm)"},
        {"hbar", K::real, false, "", "Planck constant (qkr tables); defaults to eta"},
        {"beta", K::real, false, "0", "quasi-momentum"},
        {"omega", K::real, false, "0", "quasi-energy"},
        {"cutoff", K::integer, false, "", "harmonic cutoff; 4096 for gtm, 32 for qkr"},
        {"emit", K::text, false, "table", "table | decay-n | decay-k | onsite | diagnostic"},
        {"n_first", K::integer, false, "0", "onsite table first n"},
        {"n_last", K::integer, false, "15", "onsite table last n"},
        {"k_first", K::integer, false, "0", "onsite table first k"},
        {"k_last", K::integer, false, "15", "onsite table last k"},
        {"length", K::integer, false, "10000", "diagnostic slice length"}}},
  };
  return table;
}

bool is_common_key(const std::string& key) { return key == "output" || key == "format"; }

const KeySpec* find_key(const std::vector<KeySpec>& keys, const std::string& name) {
  for (const auto& k : keys)
    if (k.name == name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

class Evaluator {
 public:
  Evaluator(std::function<bool(const std::string&)> numeric, const std::map<std::string, std::string>& text)
      : numeric_(std::move(numeric)), text_(text) {}

  double value(const std::string& key) {
    if (auto it = done_.find(key); it != done_.end()) return it->second;
    if (active_.count(key)) throw ConfigError("key '" + key + "': circular reference");
    active_.insert(key);
    const std::string& expr = text_.at(key);
    double v = 0.0;
    try {
      v = evaluate_expression(expr, [this](std::string_view name) -> std::optional<double> {
        const std::string n(name);
        if (!text_.count(n) || !numeric_(n)) return std::nullopt;
        return value(n);
      });
    } catch (const ExpressionError& e) {
      throw ConfigError("key '" + key + "' = '" + expr + "': " + e.what());
    }
    active_.erase(key);
    done_[key] = v;
    return v;
  }

 private:
  std::function<bool(const std::string&)> numeric_;
  const std::map<std::string, std::string>& text_;
  std::map<std::string, double> done_;
  std::set<std::string> active_;
};

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, keys] : key_table()) n.push_back(name);
    return n;
  }();
  return names;
}

const std::vector<KeySpec>& subcommand_keys(const std::string& subcommand) {
  const auto& table = key_table();
  auto it = table.find(subcommand);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
  return it->second;
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
  std::string key = trim(text.substr(0, eq));
  if (key.empty()) throw ConfigError("missing key in '" + text + "'");
  return {key, unquote(trim(text.substr(eq + 1)))};
}

Assignments read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  Assignments out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // a '#' inside quotes is kept
    bool quoted = false;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == quote) quoted = false;
      } else if (c == '"' || c == '\'') {
        quoted = true;
        quote = c;
      } else if (c == '#') {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    try {
      out.push_back(split_assignment(line));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

RunConfig parse_config(const std::string& subcommand, const Assignments& flags,
                       const std::optional<std::filesystem::path>& file) {
  Assignments merged;
  if (file) merged = read_config_file(*file);
  merged.insert(merged.end(), flags.begin(), flags.end());
  return parse_assignments(subcommand, merged);
}

RunConfig parse_assignments(const std::string& subcommand, const Assignments& assignments) {
  const auto& keys = subcommand_keys(subcommand);
  RunConfig cfg;
  cfg.subcommand = subcommand;

  std::map<std::string, std::string> given;  // later assignments win
  for (const auto& [key, value] : assignments) {
    if (is_common_key(key)) {
      if (key == "output") {
        cfg.output = value;
      } else if (value == "csv") {
        cfg.format = EmitFormat::csv;
      } else if (value == "json") {
        cfg.format = EmitFormat::json;
      } else {
        throw ConfigError("key 'format': expected csv or json, got '" + value + "'");
      }
      continue;
    }
    if (!find_key(keys, key)) throw ConfigError("unknown key '" + key + "' for subcommand '" + subcommand + "'");
    given[key] = value;
  }

  for (const auto& spec : keys) {
    if (given.count(spec.name)) continue;
    if (spec.required) throw ConfigError("missing required key '" + spec.name + "' for subcommand '" + subcommand + "'");
    if (!spec.fallback.empty()) given[spec.name] = spec.fallback;
  }
  cfg.expressions = given;

  Evaluator eval(
      [&keys](const std::string& n) {
        const KeySpec* spec = find_key(keys, n);
        return spec && spec->kind != ValueKind::text;
      },
      given);
  for (const auto& spec : keys) {
    auto it = given.find(spec.name);
    if (it == given.end()) continue;
    if (spec.kind == ValueKind::text) {
      cfg.texts[spec.name] = it->second;
      continue;
    }
    const double v = eval.value(spec.name);
    if (spec.kind == ValueKind::integer) {
      if (std::abs(v - std::round(v)) > 1e-9 * std::max(1.0, std::abs(v)) || std::abs(v) > 9.0e18)
        throw ConfigError("key '" + spec.name + "' = '" + it->second + "': expected an integer");
      cfg.numbers[spec.name] = std::round(v);
    } else {
      cfg.numbers[spec.name] = v;
    }
  }
  if (cfg.numbers.count("seed")) {
    const double s = cfg.numbers["seed"];
    if (s < 0.0) throw ConfigError("key 'seed': must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  return cfg;
}

std::map<std::string, double> evaluate_all(const std::map<std::string, std::string>& expressions) {
  Evaluator eval([](const std::string&) { return true; }, expressions);
  std::map<std::string, double> out;
  for (const auto& [key, expr] : expressions) out[key] = eval.value(key);
  return out;
}

bool RunConfig::has(const std::string& key) const { return numbers.count(key) || texts.count(key); }

double RunConfig::real(const std::string& key) const {
  auto it = numbers.find(key);
  if (it == numbers.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::int64_t RunConfig::integer(const std::string& key) const { return std::llround(real(key)); }

const std::string& RunConfig::text(const std::string& key) const {
  auto it = texts.find(key);
  if (it == texts.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

}  // namespace gtm
