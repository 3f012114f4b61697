#pragma once

#include "gtm/potential.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace gtm {

struct PhasePoint {
  double theta = 0.0;  // [0, 2π)
  double p = 0.0;
};

/// Trajectory state with the conserved quasi-momentum split off:
/// p = beta + n·η, beta ∈ [0, η).
struct ReducedState {
  double theta = 0.0;
  std::int64_t n = 0;
  double beta = 0.0;

  double momentum(double eta) const { return beta + static_cast<double>(n) * eta; }
};

/// Splits p into (n, beta) with beta = mod(p, η).
ReducedState reduce(const PhasePoint& s, double eta);

/// One kick then one free rotation: p' = p + V'(θ), θ' = θ + p' (mod 2π).
PhasePoint step(const ChannelPotential& pot, const PhasePoint& s);

/// Exact inverse of step().
PhasePoint step_inverse(const ChannelPotential& pot, const PhasePoint& s);

/// n' = n + j(θ), θ' = θ + β + n'·η (mod 2π).
inline ReducedState step_reduced(const ChannelPotential& pot, const ReducedState& s) {
  ReducedState out = s;
  out.n += pot.channel(s.theta);
  out.theta = wrap_angle(s.theta + s.beta + static_cast<double>(out.n) * pot.eta());
  return out;
}

enum class InitialMomentum {
  fixed,         // every trajectory starts at p0
  uniform_cell,  // p0 uniform on (-η/2, η/2): averages over quasi-momentum
};

struct EnsembleSpec {
  std::size_t size = 100000;
  InitialMomentum p0_mode = InitialMomentum::fixed;
  double p0 = 0.0;
  std::uint64_t seed = 1;
  std::int64_t kicks = 10000;
  double record_ratio = 1.1;  // geometric spacing of recorded times
  std::int64_t window = 100;  // trailing average, in raw kicks
  std::size_t block_size = 4096;
  bool reverse_reduction = false;  // accumulate trajectories last-to-first
};

/// Initial condition of trajectory `index`; θ0 uniform on (0, 2π).
/// `cell` is the momentum cell width for uniform_cell sampling.
PhasePoint initial_point(const EnsembleSpec& spec, double cell, std::size_t index);

struct EnergySeries {
  std::vector<std::int64_t> times;    // recorded kick counts
  Eigen::VectorXd mean_p2;            // ⟨p²⟩ at recorded times
  Eigen::VectorXd windowed_mean_p2;   // trailing window average at recorded times
  Eigen::VectorXd per_kick;           // ⟨p²⟩ after every kick, index = t
  std::int64_t window = 1;

  /// Builds a series where the windowed and raw columns coincide.
  static EnergySeries from_samples(std::vector<std::int64_t> times, Eigen::VectorXd values);
};

/// Geometric grid 0, 1, ..., T with ratio `ratio`; always ends at T.
std::vector<std::int64_t> recording_times(std::int64_t kicks, double ratio);

EnergySeries simulate_ensemble(const ChannelPotential& pot, const EnsembleSpec& spec);

/// Same harness with the smooth kick V'(θ) = μ sin θ.
EnergySeries standard_map_baseline(double mu, const EnsembleSpec& spec, double cell = two_pi);

struct MomentumHistogram {
  std::vector<double> centers;
  std::vector<double> probabilities;
  double bin_width = 0.0;
  std::int64_t window = 0;  // number of trailing kicks accumulated
};

/// Histogram of p = β + nη over the last `spec.window` kicks. Bins have width
/// η on the η-lattice for fixed quasi-momentum and η/8 otherwise.
MomentumHistogram momentum_distribution(const ChannelPotential& pot, const EnsembleSpec& spec);

enum class EnergyColumn { raw, windowed };

/// Least-squares slope of log⟨p²⟩ against log t over recorded times in
/// [t_begin, t_end].
double growth_exponent(const EnergySeries& series, double t_begin, double t_end,
                       EnergyColumn column = EnergyColumn::windowed);

/// Full-map trajectory with unreduced momentum; length steps + 1.
std::vector<PhasePoint> trajectory(const ChannelPotential& pot, PhasePoint s0, std::int64_t steps);

/// Toral phase portrait: trajectory() with p reduced mod 2π.
std::vector<PhasePoint> orbit_trace(const ChannelPotential& pot, PhasePoint s0, std::int64_t steps);

}  // namespace gtm
