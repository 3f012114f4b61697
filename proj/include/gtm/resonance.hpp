#pragma once

#include "gtm/potential.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace gtm {

/// Commensurate case λ = 2πP/Q with η = sλ and β = rλ. On the lattice
/// p = Nλ, θ = θ0 + Mλ the GTM becomes the integer map
///   N' = N + Φ(M),  M' = M + N',   Φ(M) = λ⁻¹ V'(θ0 + Mλ) = s·j(θ0 + Mλ),
/// which is Q-periodic in both variables.
struct ResonanceParams {
  std::int64_t r = 0;
  std::int64_t s = 1;
  std::int64_t P = 1;
  std::int64_t Q = 1;
  double lambda = two_pi;
  double eta = two_pi;
  double beta = 0.0;
  double theta0 = 0.0;
  std::vector<std::int64_t> phi;  // Φ(0..Q-1)

  std::int64_t phi_at(std::int64_t M) const {
    std::int64_t m = M % Q;
    if (m < 0) m += Q;
    return phi[static_cast<std::size_t>(m)];
  }
};

/// Builds the Φ table. The potential's η must equal s·2πP/Q.
ResonanceParams make_resonance(const ChannelPotential& pot, std::int64_t P, std::int64_t Q, std::int64_t r,
                               std::int64_t s, double theta0);

/// Angle θ0 + Mλ reduced to [0, 2π) with the product taken mod Q exactly.
double lattice_angle(const ResonanceParams& params, std::int64_t M);

struct IntegerState {
  std::int64_t N = 0;
  std::int64_t M = 0;
  bool operator==(const IntegerState&) const = default;
};

/// Exact integer update; throws std::overflow_error on 64-bit overflow.
IntegerState integer_step(const ResonanceParams& params, IntegerState x);
IntegerState integer_step_inverse(const ResonanceParams& params, IntegerState x);

struct TorusCycle {
  std::int64_t T = 0;  // period on the Q×Q torus
  std::int64_t K = 0;  // angle winding: M_T = M0 + K·Q
  std::int64_t L = 0;  // momentum winding: N_T = N0 + L·Q
  IntegerState start;
};

TorusCycle find_cycle(const ResonanceParams& params, std::int64_t N0, std::int64_t M0);

/// Average momentum gain per kick, L·Q·λ/T.
double ballistic_coefficient(const TorusCycle& cycle, const ResonanceParams& params);

struct CycleCensus {
  std::int64_t states = 0;            // states examined
  std::int64_t ballistic_states = 0;  // L ≠ 0
  std::int64_t cycles = 0;            // distinct cycles (exhaustive mode)
  double ballistic_fraction = 0.0;
  double mean_c2 = 0.0;
  double max_abs_c = 0.0;
  std::int64_t max_period = 0;
  std::int64_t max_abs_L = 0;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> period_winding;  // (T, L) → states
};

/// Exhaustive census over all Q² torus states.
CycleCensus cycle_census(const ResonanceParams& params);

/// Census over `count` uniformly sampled torus states.
CycleCensus cycle_census(const ResonanceParams& params, std::int64_t count, std::uint64_t seed);

}  // namespace gtm
