#include "gtm/recipes.hpp"

#include "gtm/io.hpp"
#include "gtm/pf.hpp"
#include "gtm/stats.hpp"
#include "gtm/version.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>

namespace gtm {

namespace {

using nlohmann::json;
using Params = std::map<std::string, double>;
namespace fs = std::filesystem;

const std::map<std::string, std::map<std::string, std::string>>& recipe_table() {
  static const std::map<std::string, std::map<std::string, std::string>> table = {
      {"fig1", {{"mu", "3"}, {"eta", "1.2"}, {"points", "4096"}}},
      {"fig2",
       {{"mu", "3"},
        {"eta", "pi/gm"},
        {"p0_a", "eta/2"},
        {"p0_b", "eta/sqrt2"},
        {"p0_c", "pi/sqrt3"},
        {"size", "100000"},
        {"kicks", "10000"},
        {"seed", "1"},
        {"window", "100"},
        {"ratio", "1.1"}}},
      {"fig3",
       {{"mu", "4"},
        {"eta", "pi/gm"},
        {"p0_a", "eta/2"},
        {"p0_b", "eta/sqrt2"},
        {"p0_c", "pi/sqrt3"},
        {"size", "100000"},
        {"kicks", "10000"},
        {"seed", "1"},
        {"window", "100"},
        {"ratio", "1.1"}}},
      {"fig4",
       {{"mu", "4"}, {"eta", "pi/gm"}, {"size", "100000"}, {"kicks", "10000"}, {"seed", "1"}, {"window", "100"}}},
      {"pf-spread",
       {{"mu", "3"}, {"eta", "pi/gm"}, {"beta", "eta/sqrt2"}, {"G", "1024"}, {"N_band", "256"}, {"steps", "1000"}}},
      {"resonance-demo",
       {{"mu", "3"},
        {"P", "1"},
        {"Q", "3"},
        {"r", "0"},
        {"s", "1"},
        {"size", "20000"},
        {"kicks", "10000"},
        {"seed", "1"},
        {"ratio", "1.1"}}},
  };
  return table;
}

std::int64_t as_integer(const Params& p, const std::string& key) {
  const double v = p.at(key);
  if (v != std::round(v)) throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<std::int64_t>(v);
}

EnsembleSpec spec_from(const Params& p) {
  EnsembleSpec spec;
  spec.size = static_cast<std::size_t>(as_integer(p, "size"));
  spec.kicks = as_integer(p, "kicks");
  spec.seed = static_cast<std::uint64_t>(as_integer(p, "seed"));
  if (p.count("window")) spec.window = as_integer(p, "window");
  if (p.count("ratio")) spec.record_ratio = p.at("ratio");
  if (spec.size < 1 || spec.kicks < 1 || spec.window < 1 || spec.window > spec.kicks)
    throw ConfigError("recipe: need size >= 1, kicks >= 1 and 1 <= window <= kicks");
  return spec;
}

struct Context {
  std::string name;
  fs::path dir;
  std::vector<fs::path> outputs;

  std::ofstream open(const std::string& file) {
    outputs.push_back(dir / file);
    return open_output(dir / file);
  }
  std::string reference() const { return "recipe " + name + ", parameters in manifest.json"; }
};

void fig1(const Params& p, Context& ctx) {
  const ChannelPotential pot = build_potential(p.at("mu"), p.at("eta"));
  const std::int64_t points = as_integer(p, "points");
  auto out = ctx.open("fig1_potential.csv");
  CsvWriter csv(out, {"theta", "V", "dV", "V_smooth"}, ctx.reference());
  for (std::int64_t i = 0; i < points; ++i) {
    const double theta = two_pi * static_cast<double>(i) / static_cast<double>(points);
    csv.row({theta, potential_value(pot, theta), kick_impulse(pot, theta), pot.mu() * (1.0 - std::cos(theta))});
  }
}

void energy_figure(const Params& p, Context& ctx, const std::string& file) {
  const ChannelPotential pot = build_potential(p.at("mu"), p.at("eta"));
  EnsembleSpec spec = spec_from(p);
  std::vector<EnergySeries> curves;
  for (const char* key : {"p0_a", "p0_b", "p0_c"}) {
    spec.p0_mode = InitialMomentum::fixed;
    spec.p0 = p.at(key);
    curves.push_back(simulate_ensemble(pot, spec));
  }
  spec.p0_mode = InitialMomentum::uniform_cell;
  curves.push_back(simulate_ensemble(pot, spec));

  auto out = ctx.open(file);
  CsvWriter csv(out, {"t", "log2_t", "p2_a", "p2_b", "p2_c", "p2_averaged"}, ctx.reference());
  const auto& times = curves.front().times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = static_cast<double>(times[i]);
    const double l = t > 0.0 ? std::log(t) : 0.0;
    std::vector<double> row{t, l * l};
    for (const auto& c : curves) row.push_back(c.windowed_mean_p2(static_cast<Eigen::Index>(i)));
    csv.row(row);
  }
}

void fig4(const Params& p, Context& ctx) {
  const ChannelPotential pot = build_potential(p.at("mu"), p.at("eta"));
  EnsembleSpec spec = spec_from(p);
  spec.p0_mode = InitialMomentum::uniform_cell;
  const MomentumHistogram h = momentum_distribution(pot, spec);
  auto out = ctx.open("fig4_momentum.csv");
  CsvWriter csv(out, {"p", "probability"}, ctx.reference());
  for (std::size_t i = 0; i < h.centers.size(); ++i) csv.row({h.centers[i], h.probabilities[i]});
}

void pf_recipe(const Params& p, Context& ctx) {
  const ChannelPotential pot = build_potential(p.at("mu"), p.at("eta"));
  const int G = static_cast<int>(as_integer(p, "G"));
  const int N = static_cast<int>(as_integer(p, "N_band"));
  const std::int64_t steps = as_integer(p, "steps");
  std::vector<std::int64_t> snaps{0};
  for (std::int64_t t = 1; t <= steps; t *= 10) snaps.push_back(t);
  if (snaps.back() != steps) snaps.push_back(steps);
  const PfSpread s = pf_spread(pot, p.at("beta"), G, N, steps, snaps);

  {
    auto out = ctx.open("pf_spread.csv");
    CsvWriter csv(out, {"t", "norm_drift", "harmonic_pn", "band_pn", "boundary_fraction"}, ctx.reference());
    for (std::size_t i = 0; i < s.time.size(); ++i)
      csv.row({s.time[i], s.norm_drift[i], s.harmonic_pn[i], s.band_pn[i], s.boundary_fraction[i]});
  }
  auto out = ctx.open("pf_harmonics.csv");
  std::vector<std::string> cols{"k"};
  for (const auto& [t, v] : s.harmonics) cols.push_back("P_t" + std::to_string(t));
  CsvWriter csv(out, cols, ctx.reference());
  for (int i = 0; i < G; ++i) {
    std::vector<double> row{static_cast<double>(i - G / 2)};
    for (const auto& [t, v] : s.harmonics) row.push_back(v(i));
    csv.row(row);
  }
}

void resonance_recipe(const Params& p, Context& ctx) {
  EnsembleSpec spec = spec_from(p);
  const std::int64_t P = as_integer(p, "P"), Q = as_integer(p, "Q");
  const std::int64_t r = as_integer(p, "r"), s = as_integer(p, "s");
  const ResonanceDemo d = resonance_demo(p.at("mu"), P, Q, r, s, spec);

  {
    json j;
    j["predicted_mean_c2"] = d.predicted_mean_c2;
    j["fitted_coefficient"] = d.fitted_coefficient;
    j["relative_error"] = d.relative_error();
    j["exponent"] = d.exponent;
    j["ballistic_fraction"] = d.ballistic_fraction;
    json cycles = json::array();
    for (const auto& [key, count] : d.period_winding)
      cycles.push_back({{"T", key.first}, {"L", key.second}, {"trajectories", count}});
    j["cycles"] = cycles;
    auto out = ctx.open("resonance_cycles.json");
    write_json(out, j);
  }
  auto out = ctx.open("resonance_energy.csv");
  CsvWriter csv(out, {"t", "mean_p2", "predicted_c2_t2"}, ctx.reference());
  for (std::size_t i = 0; i < d.series.times.size(); ++i) {
    const double t = static_cast<double>(d.series.times[i]);
    csv.row({t, d.series.mean_p2(static_cast<Eigen::Index>(i)), d.predicted_mean_c2 * t * t});
  }
}

using Runner = std::function<void(const Params&, Context&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"fig1", fig1},
      {"fig2", [](const Params& p, Context& c) { energy_figure(p, c, "fig2_energy.csv"); }},
      {"fig3", [](const Params& p, Context& c) { energy_figure(p, c, "fig3_energy.csv"); }},
      {"fig4", fig4},
      {"pf-spread", pf_recipe},
      {"resonance-demo", resonance_recipe},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, d] : recipe_table()) n.push_back(name);
    return n;
  }();
  return names;
}

std::map<std::string, std::string> recipe_defaults(const std::string& name) {
  auto it = recipe_table().find(name);
  if (it == recipe_table().end()) throw ConfigError("unknown recipe '" + name + "'");
  return it->second;
}

RecipeResult run_recipe(const std::string& name, const Assignments& overrides, const fs::path& base_dir) {
  std::map<std::string, std::string> expressions = recipe_defaults(name);
  for (const auto& [key, value] : overrides) {
    if (!expressions.count(key)) throw ConfigError("unknown key '" + key + "' for recipe '" + name + "'");
    expressions[key] = value;
  }
  const Params params = evaluate_all(expressions);

  Context ctx{name, base_dir / name, {}};
  fs::create_directories(ctx.dir);
  const auto start = std::chrono::steady_clock::now();
  runners().at(name)(params, ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["recipe"] = name;
  manifest["parameters"] = expressions;
  json evaluated;
  for (const auto& [key, v] : params) evaluated[key] = v;
  manifest["evaluated"] = evaluated;
  manifest["seed"] = params.count("seed") ? as_integer(params, "seed") : 0;
  manifest["version"] = version;
  manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION);
  manifest["wall_time_seconds"] = wall;
  json files = json::array();
  for (const auto& f : ctx.outputs) files.push_back(f.filename().string());
  manifest["outputs"] = files;

  RecipeResult result;
  result.directory = ctx.dir;
  result.manifest = ctx.dir / "manifest.json";
  result.outputs = ctx.outputs;
  result.wall_time = wall;
  auto out = open_output(result.manifest);
  write_json(out, manifest);
  return result;
}

RecipeResult rerun_manifest(const fs::path& manifest, const fs::path& base_dir) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot read manifest '" + manifest.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed manifest '" + manifest.string() + "': " + e.what());
  }
  if (!j.contains("recipe") || !j.contains("parameters"))
    throw ConfigError("manifest '" + manifest.string() + "' lacks recipe or parameters");
  Assignments params;
  for (const auto& [key, value] : j["parameters"].items()) params.emplace_back(key, value.get<std::string>());
  return run_recipe(j["recipe"].get<std::string>(), params, base_dir);
}

PfSpread pf_spread(const ChannelPotential& pot, double beta, int grid, int band_halfwidth, std::int64_t steps,
                   const std::vector<std::int64_t>& snapshots) {
  PerronFrobenius u(pot, beta, grid, band_halfwidth);
  PFField field = uniform_band_field(grid, band_halfwidth, 0);
  const double norm0 = field.norm_squared();
  PfSpread s;
  for (std::int64_t t = 0; t <= steps; ++t) {
    if (t > 0) u.step(field);
    const HarmonicDistribution h = harmonic_distribution(field, static_cast<double>(t));
    s.time.push_back(static_cast<double>(t));
    s.norm_drift.push_back(field.norm_squared() - norm0);
    s.harmonic_pn.push_back(participation_number(h.probability));
    s.band_pn.push_back(participation_number(band_distribution(field)));
    s.boundary_fraction.push_back(u.boundary_fraction(field));
    for (std::int64_t snap : snapshots)
      if (snap == t) s.harmonics[t] = h.probability;
  }
  return s;
}

double ResonanceDemo::relative_error() const {
  return predicted_mean_c2 != 0.0 ? std::abs(fitted_coefficient - predicted_mean_c2) / predicted_mean_c2 : INFINITY;
}

ResonanceDemo resonance_demo(double mu, std::int64_t P, std::int64_t Q, std::int64_t r, std::int64_t s,
                             const EnsembleSpec& spec_in) {
  const double lambda = two_pi * static_cast<double>(P) / static_cast<double>(Q);
  const ChannelPotential pot = build_potential(mu, static_cast<double>(s) * lambda);
  EnsembleSpec spec = spec_in;
  spec.p0_mode = InitialMomentum::fixed;
  spec.p0 = static_cast<double>(r) * lambda;

  ResonanceDemo d;
  CompensatedSum<double> c2;
  std::int64_t ballistic = 0;
  for (std::size_t i = 0; i < spec.size; ++i) {
    const PhasePoint x0 = initial_point(spec, pot.eta(), i);
    const ResonanceParams params = make_resonance(pot, P, Q, r, s, x0.theta);
    const TorusCycle cycle = find_cycle(params, r, 0);
    const double c = ballistic_coefficient(cycle, params);
    c2.add(c * c);
    if (cycle.L != 0) ++ballistic;
    ++d.period_winding[{cycle.T, cycle.L}];
  }
  d.predicted_mean_c2 = c2.value() / static_cast<double>(spec.size);
  d.ballistic_fraction = static_cast<double>(ballistic) / static_cast<double>(spec.size);

  d.series = simulate_ensemble(pot, spec);
  const double t1 = static_cast<double>(spec.kicks);
  const double t0 = t1 / 10.0;
  d.exponent = growth_exponent(d.series, t0, t1, EnergyColumn::raw);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < d.series.times.size(); ++i) {
    const double t = static_cast<double>(d.series.times[i]);
    if (t >= t0 && t <= t1) {
      x.push_back(t);
      y.push_back(d.series.mean_p2(static_cast<Eigen::Index>(i)));
    }
  }
  const Eigen::VectorXd coef = fit_polynomial(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                                              Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())), 2);
  d.fitted_coefficient = coef(2);
  return d;
}

}  // namespace gtm
