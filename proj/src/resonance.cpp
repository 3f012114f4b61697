#include "gtm/resonance.hpp"

#include "gtm/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gtm {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("resonance: integer overflow");
  return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_sub_overflow(a, b, &out)) throw std::overflow_error("resonance: integer overflow");
  return out;
}

std::int64_t mod(std::int64_t a, std::int64_t q) {
  const std::int64_t m = a % q;
  return m < 0 ? m + q : m;
}

}  // namespace

double lattice_angle(const ResonanceParams& params, std::int64_t M) {
  const auto k = static_cast<std::int64_t>(static_cast<__int128>(mod(M, params.Q)) * params.P % params.Q);
  const long double turn = static_cast<long double>(k) / static_cast<long double>(params.Q);
  const long double angle =
      static_cast<long double>(params.theta0) + turn * 2.0L * std::numbers::pi_v<long double>;
  return wrap_angle(static_cast<double>(angle));
}

ResonanceParams make_resonance(const ChannelPotential& pot, std::int64_t P, std::int64_t Q, std::int64_t r,
                               std::int64_t s, double theta0) {
  if (Q < 1) throw std::invalid_argument("resonance: Q must be positive");
  if (P < 1) throw std::invalid_argument("resonance: P must be positive");
  if (s < 1) throw std::invalid_argument("resonance: s must be positive");
  if (r < 0 || r >= s) throw std::invalid_argument("resonance: r must lie in [0, s) so that beta < eta");
  if (std::gcd(P, Q) != 1) throw std::invalid_argument("resonance: P and Q must be coprime");
  if (std::gcd(r, s) != 1) throw std::invalid_argument("resonance: r and s must be coprime");

  ResonanceParams rp;
  rp.P = P;
  rp.Q = Q;
  rp.r = r;
  rp.s = s;
  rp.lambda = two_pi * static_cast<double>(P) / static_cast<double>(Q);
  rp.eta = static_cast<double>(s) * rp.lambda;
  rp.beta = static_cast<double>(r) * rp.lambda;
  rp.theta0 = wrap_angle(theta0);
  if (std::abs(pot.eta() - rp.eta) > 1e-12 * rp.eta)
    throw std::invalid_argument("resonance: potential eta " + std::to_string(pot.eta()) +
                                " differs from s*2*pi*P/Q = " + std::to_string(rp.eta));
  rp.phi.resize(static_cast<std::size_t>(Q));
  for (std::int64_t M = 0; M < Q; ++M)
    rp.phi[static_cast<std::size_t>(M)] = s * pot.channel(lattice_angle(rp, M));
  return rp;
}

IntegerState integer_step(const ResonanceParams& params, IntegerState x) {
  x.N = checked_add(x.N, params.phi_at(x.M));
  x.M = checked_add(x.M, x.N);
  return x;
}

IntegerState integer_step_inverse(const ResonanceParams& params, IntegerState x) {
  x.M = checked_sub(x.M, x.N);
  x.N = checked_sub(x.N, params.phi_at(x.M));
  return x;
}

TorusCycle find_cycle(const ResonanceParams& params, std::int64_t N0, std::int64_t M0) {
  const std::int64_t Q = params.Q;
  const IntegerState start{N0, M0};
  const std::int64_t limit = Q * Q;
  IntegerState x = start;
  for (std::int64_t t = 1; t <= limit; ++t) {
    x = integer_step(params, x);
    if (mod(x.N - N0, Q) == 0 && mod(x.M - M0, Q) == 0) {
      TorusCycle c;
      c.T = t;
      c.L = (x.N - N0) / Q;
      c.K = (x.M - M0) / Q;
      c.start = start;
      return c;
    }
  }
  throw std::logic_error("find_cycle: no return within Q^2 steps");
}

double ballistic_coefficient(const TorusCycle& cycle, const ResonanceParams& params) {
  return static_cast<double>(cycle.L) * static_cast<double>(params.Q) * params.lambda /
         static_cast<double>(cycle.T);
}

namespace {

void tally(CycleCensus& census, const TorusCycle& c, const ResonanceParams& params, std::int64_t weight) {
  const double coef = ballistic_coefficient(c, params);
  census.states += weight;
  if (c.L != 0) census.ballistic_states += weight;
  census.mean_c2 += coef * coef * static_cast<double>(weight);
  census.max_abs_c = std::max(census.max_abs_c, std::abs(coef));
  census.max_period = std::max(census.max_period, c.T);
  census.max_abs_L = std::max(census.max_abs_L, std::abs(c.L));
  census.period_winding[{c.T, c.L}] += weight;
}

void finish(CycleCensus& census) {
  if (census.states > 0) {
    census.ballistic_fraction =
        static_cast<double>(census.ballistic_states) / static_cast<double>(census.states);
    census.mean_c2 /= static_cast<double>(census.states);
  }
}

}  // namespace

CycleCensus cycle_census(const ResonanceParams& params) {
  const std::int64_t Q = params.Q;
  if (Q > 20000) throw std::invalid_argument("cycle_census: Q too large for exhaustive mode; sample instead");
  std::vector<char> seen(static_cast<std::size_t>(Q * Q), 0);
  CycleCensus census;
  for (std::int64_t n = 0; n < Q; ++n) {
    for (std::int64_t m = 0; m < Q; ++m) {
      if (seen[static_cast<std::size_t>(n * Q + m)]) continue;
      const TorusCycle c = find_cycle(params, n, m);
      IntegerState x{n, m};
      for (std::int64_t t = 0; t < c.T; ++t) {
        seen[static_cast<std::size_t>(x.N * Q + x.M)] = 1;
        x = integer_step(params, x);
        x.N = mod(x.N, Q);
        x.M = mod(x.M, Q);
      }
      ++census.cycles;
      tally(census, c, params, c.T);
    }
  }
  finish(census);
  return census;
}

CycleCensus cycle_census(const ResonanceParams& params, std::int64_t count, std::uint64_t seed) {
  CycleCensus census;
  for (std::int64_t i = 0; i < count; ++i) {
    auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
    const auto q = static_cast<std::uint64_t>(params.Q);
    const auto n = static_cast<std::int64_t>(rng() % q);
    const auto m = static_cast<std::int64_t>(rng() % q);
    tally(census, find_cycle(params, n, m), params, 1);
  }
  finish(census);
  return census;
}

}  // namespace gtm
