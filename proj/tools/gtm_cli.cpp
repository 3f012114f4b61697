#include "gtm/commands.hpp"
#include "gtm/config.hpp"
#include "gtm/errors.hpp"
#include "gtm/io.hpp"
#include "gtm/recipes.hpp"
#include "gtm/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace {

constexpr int exit_config = 2;
constexpr int exit_budget = 3;

struct ParamCommand {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;  // per-key flags
  std::vector<std::string> sets;              // --set key=value
  std::string config_file;
  std::string output;
  std::string format;
};

void add_param_command(CLI::App& root, const std::string& name, const std::string& description,
                       std::map<std::string, ParamCommand>& commands) {
  ParamCommand& cmd = commands[name];
  cmd.app = root.add_subcommand(name, description);
  for (const auto& key : gtm::subcommand_keys(name)) {
    std::string help = key.help;
    if (!key.fallback.empty()) help += " [" + key.fallback + "]";
    if (key.required) help += " (required)";
    cmd.app->add_option("--" + key.name, cmd.values[key.name], help);
  }
  cmd.app->add_option("-c,--config", cmd.config_file, "TOML-style key = value file; flags override it");
  cmd.app->add_option("--set", cmd.sets, "extra key=value assignment");
  cmd.app->add_option("-o,--output", cmd.output, "output file (default: standard output)");
  cmd.app->add_option("--format", cmd.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

int run_param_command(const std::string& name, const ParamCommand& cmd) {
  gtm::Assignments flags;
  for (const auto& s : cmd.sets) flags.push_back(gtm::split_assignment(s));
  for (const auto& key : gtm::subcommand_keys(name)) {
    const CLI::Option* opt = cmd.app->get_option("--" + key.name);
    if (opt->count() > 0) flags.emplace_back(key.name, cmd.values.at(key.name));
  }
  if (!cmd.output.empty()) flags.emplace_back("output", cmd.output);
  if (!cmd.format.empty()) flags.emplace_back("format", cmd.format);

  std::optional<std::filesystem::path> file;
  if (!cmd.config_file.empty()) file = cmd.config_file;
  const gtm::RunConfig cfg = gtm::parse_config(name, flags, file);

  if (cfg.output.empty() || cfg.output == "-") {
    gtm::run_subcommand(cfg, std::cout);
  } else {
    const auto path = gtm::resolve_output_path(cfg.output);
    auto out = gtm::open_output(path);
    gtm::run_subcommand(cfg, out);
    std::cerr << "wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauge-transformed kicked rotor: simulations, resonances, P-F propagation and lattice tables"};
  app.set_version_flag("--version", std::string("gtm ") + gtm::version);
  app.require_subcommand(1);

  std::map<std::string, ParamCommand> commands;
  add_param_command(app, "potential", "piecewise-linear potential V and kick V' on a grid", commands);
  add_param_command(app, "simulate", "ensemble energy growth <p^2>(t)", commands);
  add_param_command(app, "histogram", "momentum distribution over the last kicks", commands);
  add_param_command(app, "portrait", "orbits on the phase-space torus", commands);
  add_param_command(app, "resonance", "exact integer dynamics at commensurate parameters", commands);
  add_param_command(app, "pf", "Perron-Frobenius propagation of a phase-space density", commands);
  add_param_command(app, "lattice", "tight-binding coupling tables and on-site disorder", commands);

  CLI::App* recipe = app.add_subcommand("recipe", "reproduce a figure and write a manifest");
  std::string recipe_name, manifest, out_dir;
  std::vector<std::string> recipe_sets;
  bool list = false;
  recipe->add_option("name", recipe_name, "fig1 | fig2 | fig3 | fig4 | pf-spread | resonance-demo");
  recipe->add_option("--manifest", manifest, "re-run the recipe recorded in this manifest");
  recipe->add_option("--out-dir", out_dir, "base output directory (default: $GTM_OUTPUT_DIR or .)");
  recipe->add_option("--set", recipe_sets, "override a recipe parameter, key=value");
  recipe->add_flag("--list", list, "list recipes and their default parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    for (const auto& [name, cmd] : commands)
      if (cmd.app->parsed()) return run_param_command(name, cmd);

    if (list) {
      for (const auto& name : gtm::recipe_names()) {
        std::cout << name;
        for (const auto& [key, value] : gtm::recipe_defaults(name)) std::cout << ' ' << key << '=' << value;
        std::cout << '\n';
      }
      return 0;
    }
    const std::filesystem::path base = out_dir.empty() ? gtm::default_output_dir() : std::filesystem::path(out_dir);
    gtm::RecipeResult result;
    if (!manifest.empty()) {
      if (!recipe_name.empty() || !recipe_sets.empty())
        throw gtm::ConfigError("--manifest cannot be combined with a recipe name or --set");
      result = gtm::rerun_manifest(manifest, base);
    } else {
      if (recipe_name.empty()) throw gtm::ConfigError("recipe: give a recipe name or --manifest");
      gtm::Assignments overrides;
      for (const auto& s : recipe_sets) overrides.push_back(gtm::split_assignment(s));
      result = gtm::run_recipe(recipe_name, overrides, base);
    }
    for (const auto& f : result.outputs) std::cerr << "wrote " << f.string() << '\n';
    std::cerr << "wrote " << result.manifest.string() << " (" << result.wall_time << " s)\n";
    return 0;
  } catch (const gtm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const gtm::NumericalBudgetError& e) {
    std::cerr << "numerical budget exceeded: " << e.what() << '\n';
    return exit_budget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
