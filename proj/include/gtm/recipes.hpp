#pragma once

#include "gtm/config.hpp"
#include "gtm/dynamics.hpp"
#include "gtm/potential.hpp"
#include "gtm/resonance.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gtm {

const std::vector<std::string>& recipe_names();

/// Default parameter expressions of a recipe.
std::map<std::string, std::string> recipe_defaults(const std::string& name);

struct RecipeResult {
  std::filesystem::path directory;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> outputs;
  double wall_time = 0.0;
};

/// Runs a recipe into `base_dir / name` and writes manifest.json next to its
/// CSV/JSON outputs. Overrides must name keys of recipe_defaults().
RecipeResult run_recipe(const std::string& name, const Assignments& overrides, const std::filesystem::path& base_dir);

/// Re-runs the recipe recorded in a manifest into `base_dir / name`.
RecipeResult rerun_manifest(const std::filesystem::path& manifest, const std::filesystem::path& base_dir);

struct PfSpread {
  std::vector<double> time;
  std::vector<double> norm_drift;   // ‖Ψ_t‖² - ‖Ψ_0‖²
  std::vector<double> harmonic_pn;  // participation number of P(k, t)
  std::vector<double> band_pn;      // participation number of the band marginal
  std::vector<double> boundary_fraction;
  std::map<std::int64_t, Eigen::VectorXd> harmonics;  // P(k, t) at snapshot times, row k + G/2
};

/// Evolves Ψ0 = uniform on band 0 for `steps` P-F steps.
PfSpread pf_spread(const ChannelPotential& pot, double beta, int grid, int band_halfwidth, std::int64_t steps,
                   const std::vector<std::int64_t>& snapshots = {});

struct ResonanceDemo {
  EnergySeries series;
  double predicted_mean_c2 = 0.0;  // over the ensemble's own initial angles
  double fitted_coefficient = 0.0;  // t² coefficient over the last decade
  double exponent = 0.0;            // log-log slope over the last decade
  double ballistic_fraction = 0.0;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> period_winding;  // (T, L) → trajectories

  double relative_error() const;
};

/// Ensemble at η = sλ, p0 = rλ on the GTM, compared with the cycle of the
/// integer map through each trajectory's starting angle.
ResonanceDemo resonance_demo(double mu, std::int64_t P, std::int64_t Q, std::int64_t r, std::int64_t s,
                             const EnsembleSpec& spec);

}  // namespace gtm
