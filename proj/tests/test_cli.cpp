#include "gtm/commands.hpp"
#include "gtm/config.hpp"
#include "gtm/expression.hpp"
#include "gtm/io.hpp"
#include "gtm/recipes.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

using namespace gtm;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gtm_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args, const fs::path& out_file) {
  const std::string cmd = std::string(GTM_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("expressions") {
  CHECK(evaluate_expression("pi/gm") == doctest::Approx(1.9416110387255).epsilon(1e-13));
  CHECK(std::abs(evaluate_expression("pi/gm") - 1.9416110387255) < 1e-12);
  CHECK(evaluate_expression("2^3^2") == 512.0);
  CHECK(evaluate_expression("-2^2") == -4.0);
  CHECK(evaluate_expression("(1 + 2) * 3 - 4 / 8") == 8.5);
  CHECK(evaluate_expression("sqrt(16) + sin(0) + cos(0)") == 5.0);
  CHECK(evaluate_expression("sqrt2 * sqrt2") == doctest::Approx(2.0));
  CHECK(evaluate_expression("sqrt3") == doctest::Approx(std::sqrt(3.0)));
  CHECK(evaluate_expression("gm") == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-16));
  CHECK(evaluate_expression("1e-3 * 2") == 0.002);
  CHECK(evaluate_expression("x + 1", [](std::string_view n) -> std::optional<double> {
          if (n == "x") return 2.0;
          return std::nullopt;
        }) == 3.0);

  auto position_of = [](const std::string& text) -> long {
    try {
      evaluate_expression(text);
    } catch (const ExpressionError& e) {
      return static_cast<long>(e.position());
    }
    return -1;
  };
  CHECK(position_of("pi/gmx") == 3);
  CHECK(position_of("1 + ") == 4);
  CHECK(position_of("(1 + 2") == 6);
  CHECK(position_of("1 $ 2") == 2);
  CHECK(position_of("1/0") >= 0);
  CHECK(position_of("sqrt(-1)") >= 0);
  CHECK(position_of("2 3") == 2);
  CHECK_THROWS_WITH_AS(evaluate_expression("pi/gmx"), doctest::Contains("unknown name 'gmx' at position 3"),
                       ExpressionError);
}

TEST_CASE("parameter resolution") {
  const RunConfig cfg = parse_assignments("pf", {{"mu", "3"}, {"eta", "pi/gm"}, {"beta", "eta/2"}});
  CHECK(std::abs(cfg.real("eta") - 1.9416110387255) < 1e-12);
  CHECK(std::abs(cfg.real("beta") - 0.97080551936) < 1e-10);
  CHECK(cfg.integer("G") == 1024);
  CHECK(cfg.integer("N_band") == 256);
  CHECK(cfg.text("initial") == "uniform");
  CHECK(cfg.expressions.at("beta") == "eta/2");
  CHECK(cfg.format == EmitFormat::csv);

  CHECK_THROWS_WITH_AS(parse_assignments("pf", {{"mu", "3"}}), doctest::Contains("missing required key 'eta'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_assignments("pf", {{"mu", "3"}, {"eta", "1"}, {"x", "1"}}),
                       doctest::Contains("unknown key 'x'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_assignments("pf", {{"mu", "3"}, {"eta", "pi/gmx"}}),
                       doctest::Contains("key 'eta' = 'pi/gmx': unknown name 'gmx' at position 3"), ConfigError);
  CHECK_THROWS_AS(parse_assignments("pf", {{"mu", "eta"}, {"eta", "mu"}}), ConfigError);
  CHECK_THROWS_AS(parse_assignments("pf", {{"mu", "3"}, {"eta", "1"}, {"G", "10.5"}}), ConfigError);
  CHECK_THROWS_AS(parse_assignments("pf", {{"mu", "3"}, {"eta", "1"}, {"format", "xml"}}), ConfigError);
  CHECK_THROWS_AS(parse_assignments("nonsense", {}), ConfigError);
  CHECK_THROWS_AS(split_assignment("novalue"), ConfigError);

  const auto all = evaluate_all({{"a", "2*b"}, {"b", "pi"}});
  CHECK(all.at("a") == doctest::Approx(2 * pi));
}

TEST_CASE("config files and flag precedence") {
  const fs::path dir = scratch_dir("config");
  const fs::path file = dir / "run.toml";
  {
    std::ofstream f(file);
    f << "# ensemble run\n[simulate]\nmu = 3\neta = \"pi/gm\"  # golden\nbeta = 'eta/2'\nkicks = 100\n\n";
  }
  const Assignments a = read_config_file(file);
  REQUIRE(a.size() == 4);
  CHECK(a[1].second == "pi/gm");
  CHECK(a[2].second == "eta/2");

  const RunConfig cfg = parse_config("simulate", {{"kicks", "50"}, {"size", "10"}}, file);
  CHECK(cfg.integer("kicks") == 50);
  CHECK(cfg.integer("size") == 10);
  CHECK(std::abs(cfg.real("beta") - 0.97080551936) < 1e-10);

  {
    std::ofstream f(dir / "bad.toml");
    f << "mu 3\n";
  }
  CHECK_THROWS_AS(read_config_file(dir / "bad.toml"), ConfigError);
  CHECK_THROWS_AS(read_config_file(dir / "missing.toml"), ConfigError);
}

TEST_CASE("emitted csv") {
  const RunConfig cfg = parse_assignments("potential", {{"mu", "3"}, {"eta", "1.2"}, {"points", "8"}});
  std::ostringstream out;
  run_subcommand(cfg, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# gtm potential", 0) == 0);
  CHECK(line.find("eta=1.2") != std::string::npos);
  std::getline(in, line);
  CHECK(line == "theta,V,dV");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 2);
  }
  CHECK(rows == 8);
  CHECK(format_number(0.1) == "0.10000000000000001");

  const RunConfig js = parse_assignments("resonance", {{"mu", "3"}, {"P", "1"}, {"Q", "3"}, {"format", "json"}});
  std::ostringstream jout;
  run_subcommand(js, jout);
  const auto parsed = nlohmann::json::parse(jout.str());
  CHECK(parsed.contains("T"));
  CHECK(parsed.contains("L"));
}

TEST_CASE("recipes re-run from their manifests byte for byte") {
  const fs::path dir = scratch_dir("recipes");
  const std::map<std::string, Assignments> small = {
      {"fig1", {{"points", "512"}}},
      {"fig2", {{"size", "200"}, {"kicks", "64"}, {"window", "4"}}},
      {"fig4", {{"size", "200"}, {"kicks", "64"}, {"window", "4"}}},
      {"pf-spread", {{"G", "128"}, {"N_band", "64"}, {"steps", "20"}}},
      {"resonance-demo", {{"size", "100"}, {"kicks", "200"}}},
  };
  for (const auto& [name, overrides] : small) {
    const RecipeResult first = run_recipe(name, overrides, dir / "a");
    const RecipeResult again = rerun_manifest(first.manifest, dir / "b");
    REQUIRE(first.outputs.size() == again.outputs.size());
    for (std::size_t i = 0; i < first.outputs.size(); ++i) {
      CHECK(first.outputs[i].filename() == again.outputs[i].filename());
      CHECK_MESSAGE(slurp(first.outputs[i]) == slurp(again.outputs[i]), name << ": " << first.outputs[i]);
    }
    const auto manifest = nlohmann::json::parse(slurp(first.manifest));
    CHECK(manifest.at("recipe") == name);
    CHECK(manifest.contains("evaluated"));
    CHECK(manifest.contains("version"));
  }
  CHECK_THROWS_AS(run_recipe("fig9", {}, dir), ConfigError);
  CHECK_THROWS_AS(run_recipe("fig1", {{"nope", "1"}}, dir), ConfigError);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch_dir("exit");
  const fs::path log = dir / "log.txt";
  CHECK(run_cli("--version", log) == 0);
  CHECK(slurp(log).find("gtm 1.0.0") != std::string::npos);
  CHECK(run_cli("potential --mu 3 --eta pi/gm --points 16 -o " + (dir / "v.csv").string(), log) == 0);
  CHECK(slurp(dir / "v.csv").find("theta,V,dV") != std::string::npos);
  CHECK(run_cli("potential --mu 3 --set eta=1.2 --points 4", log) == 0);

  CHECK(run_cli("potential --mu 3", log) == 2);
  CHECK(slurp(log).find("missing required key 'eta'") != std::string::npos);
  CHECK(run_cli("potential --mu 3 --eta pi/gmx", log) == 2);
  CHECK(slurp(log).find("position 3") != std::string::npos);
  CHECK(run_cli("potential --mu 3 --eta 1 --bogus 2", log) == 2);
  CHECK(run_cli("frobnicate", log) == 2);
  CHECK(run_cli("recipe fig9", log) == 2);

  // too few bands for the spreading density
  CHECK(run_cli("pf --mu 3 --eta pi/gm --G 64 --N_band 4 --steps 50", log) == 3);

  const std::string env = "GTM_OUTPUT_DIR=" + (dir / "env").string() + " ";
  const std::string cmd = env + GTM_CLI_PATH + " potential --mu 3 --eta 1 --points 4 -o rel.csv > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "env" / "rel.csv"));
}
