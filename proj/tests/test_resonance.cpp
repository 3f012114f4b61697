#include "gtm/dynamics.hpp"
#include "gtm/resonance.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

using namespace gtm;

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t q) {
  const std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

ResonanceParams setup(double mu, std::int64_t P, std::int64_t Q, std::int64_t r, std::int64_t s, double theta0) {
  const double eta = static_cast<double>(s) * two_pi * static_cast<double>(P) / static_cast<double>(Q);
  return make_resonance(build_potential(mu, eta), P, Q, r, s, theta0);
}

// Φ evaluated directly from sin, independent of the lattice-angle reduction
std::int64_t phi_direct(double mu, std::int64_t P, std::int64_t Q, std::int64_t s, double theta0, std::int64_t M) {
  const double lambda = two_pi * static_cast<double>(P) / static_cast<double>(Q);
  const double eta = static_cast<double>(s) * lambda;
  const double angle = theta0 + two_pi * static_cast<double>(floor_mod(M * P, Q)) / static_cast<double>(Q);
  return s * static_cast<std::int64_t>(std::trunc(mu * std::sin(angle) / eta));
}

// (T, K, L) of every torus state by plain iteration of the unwrapped map
std::map<std::pair<std::int64_t, std::int64_t>, std::tuple<std::int64_t, std::int64_t, std::int64_t>>
enumerate_cycles(double mu, std::int64_t P, std::int64_t Q, std::int64_t s, double theta0) {
  std::map<std::pair<std::int64_t, std::int64_t>, std::tuple<std::int64_t, std::int64_t, std::int64_t>> out;
  for (std::int64_t n0 = 0; n0 < Q; ++n0)
    for (std::int64_t m0 = 0; m0 < Q; ++m0) {
      std::int64_t N = n0, M = m0, t = 0;
      do {
        N += phi_direct(mu, P, Q, s, theta0, M);
        M += N;
        ++t;
      } while (floor_mod(N, Q) != n0 || floor_mod(M, Q) != m0);
      out[{n0, m0}] = {t, (M - m0) / Q, (N - n0) / Q};
    }
  return out;
}

}  // namespace

TEST_CASE("validation") {
  const auto pot = build_potential(3.0, two_pi / 3);
  CHECK_NOTHROW(make_resonance(pot, 1, 3, 0, 1, 0.1));
  CHECK_THROWS_AS(make_resonance(pot, 2, 6, 0, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_resonance(pot, 1, 3, 1, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_resonance(pot, 1, 4, 0, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_resonance(build_potential(3.0, 2 * two_pi / 3), 1, 3, 2, 4, 0.1), std::invalid_argument);
}

TEST_CASE("phi table: periodic, bounded and equal to the direct evaluation") {
  for (auto [mu, P, Q, s] : {std::tuple{3.0, 1L, 3L, 1L}, {7.0, 13L, 97L, 1L}, {11.0, 5L, 64L, 3L}}) {
    const ResonanceParams rp = setup(mu, P, Q, s > 1 ? 1 : 0, s, 0.1);
    const int J = build_potential(mu, rp.eta).max_channel();
    for (std::int64_t M = -3 * Q; M < 3 * Q; ++M) {
      CHECK(rp.phi_at(M) == rp.phi_at(M + Q));
      CHECK(std::abs(rp.phi_at(M)) <= s * J);
      CHECK(rp.phi_at(M) == phi_direct(mu, P, Q, s, 0.1, M));
    }
  }
}

TEST_CASE("flat potential: N is frozen and M advances by N") {
  const ResonanceParams rp = setup(1.0, 1, 3, 0, 1, 0.1);
  IntegerState x{5, 2};
  for (int t = 0; t < 20; ++t) {
    const IntegerState y = integer_step(rp, x);
    CHECK(y.N == 5);
    CHECK(y.M == x.M + 5);
    x = y;
  }
  const TorusCycle c = find_cycle(rp, 2, 1);
  CHECK(c.L == 0);
  const CycleCensus census = cycle_census(rp);
  CHECK(census.ballistic_states == 0);
  CHECK(census.states == 9);
}

TEST_CASE("single-site torus is ballistic") {
  const double theta0 = 1.2;
  const ResonanceParams rp = setup(20.0, 1, 1, 0, 1, theta0);
  const std::int64_t c0 = static_cast<std::int64_t>(std::trunc(20.0 * std::sin(theta0) / two_pi));
  REQUIRE(c0 != 0);
  IntegerState x{4, 0};
  for (std::int64_t t = 1; t <= 50; ++t) {
    x = integer_step(rp, x);
    CHECK(x.N == 4 + c0 * t);
  }
  const TorusCycle c = find_cycle(rp, 4, 0);
  CHECK(c.T == 1);
  CHECK(c.L == c0);
  CHECK(c.K == 4 + c0);
  CHECK(ballistic_coefficient(c, rp) == doctest::Approx(static_cast<double>(c0) * two_pi));
}

TEST_CASE("explicit inverse") {
  const ResonanceParams rp = setup(7.0, 13, 97, 0, 1, 0.37);
  IntegerState x{-40, 1234};
  const IntegerState x0 = x;
  for (int t = 0; t < 1000; ++t) x = integer_step(rp, x);
  for (int t = 0; t < 1000; ++t) x = integer_step_inverse(rp, x);
  CHECK(x == x0);
}

TEST_CASE("overflow is detected") {
  const ResonanceParams rp = setup(20.0, 1, 1, 0, 1, 1.2);
  IntegerState x{std::numeric_limits<std::int64_t>::max() - 1, 0};
  CHECK_THROWS_AS(integer_step(rp, x), std::overflow_error);
}

TEST_CASE("cycles agree with brute-force enumeration of the torus") {
  for (auto [mu, P, Q, s, theta0] :
       {std::tuple{3.0, 1L, 3L, 1L, 0.1}, {7.0, 13L, 97L, 1L, 0.37}, {5.0, 2L, 15L, 1L, 0.9}, {9.0, 3L, 40L, 2L, 0.2}}) {
    const ResonanceParams rp = setup(mu, P, Q, 1 % s, s, theta0);
    const auto oracle = enumerate_cycles(mu, P, Q, s, theta0);
    for (const auto& [state, tkl] : oracle) {
      const TorusCycle c = find_cycle(rp, state.first, state.second);
      CHECK(c.T == std::get<0>(tkl));
      CHECK(c.K == std::get<1>(tkl));
      CHECK(c.L == std::get<2>(tkl));
      CHECK(c.T <= Q * Q);
    }
    const CycleCensus census = cycle_census(rp);
    CHECK(census.states == Q * Q);
    std::int64_t ballistic = 0;
    for (const auto& [state, tkl] : oracle) ballistic += std::get<2>(tkl) != 0;
    CHECK(census.ballistic_states == ballistic);
  }
}

TEST_CASE("ballistic states at eta = 2pi/3") {
  // at theta0 = 0.1 the lattice angles see Φ = (0, 1, -1): no ballistic cycle until mu ≈ 4.6
  CHECK(cycle_census(setup(3.0, 1, 3, 0, 1, 0.1)).ballistic_fraction == 0.0);
  double threshold = 0.0;
  for (double mu = 3.0; mu < 12.0 && threshold == 0.0; mu += 0.05)
    if (cycle_census(setup(mu, 1, 3, 0, 1, 0.1)).ballistic_states > 0) threshold = mu;
  MESSAGE("theta0 = 0.1: first ballistic states at mu = " << threshold);
  CHECK(threshold > 4.5);
  CHECK(threshold < 4.7);

  // at mu = 3 a sizeable share of lattice origins carry ballistic cycles
  int ballistic = 0;
  for (int i = 0; i < 200; ++i) {
    const CycleCensus census = cycle_census(setup(3.0, 1, 3, 0, 1, two_pi * (i + 0.5) / 200));
    CHECK(census.states == 9);
    ballistic += census.ballistic_states > 0;
  }
  CHECK(ballistic > 50);
}

TEST_CASE("bijectivity on the torus for Q up to 200") {
  for (std::int64_t Q = 1; Q <= 200; ++Q) {
    std::int64_t P = 1 + (Q * 7) / 11;
    while (std::gcd(P, Q) != 1) ++P;
    const ResonanceParams rp = setup(5.5, P, Q, 0, 1, 0.3);
    std::vector<int> indegree(static_cast<std::size_t>(Q * Q), 0);
    for (std::int64_t n = 0; n < Q; ++n)
      for (std::int64_t m = 0; m < Q; ++m) {
        const IntegerState y = integer_step(rp, {n, m});
        ++indegree[static_cast<std::size_t>(floor_mod(y.N, Q) * Q + floor_mod(y.M, Q))];
      }
    bool permutation = true;
    for (int d : indegree) permutation = permutation && d == 1;
    CHECK_MESSAGE(permutation, "Q = " << Q);
  }
}

TEST_CASE("cycle consistency and translation commutation") {
  const ResonanceParams rp = setup(7.0, 13, 97, 0, 1, 0.37);
  const std::int64_t Q = rp.Q;
  for (std::int64_t n0 : {0L, 5L, 50L})
    for (std::int64_t m0 : {0L, 17L, 96L}) {
      const TorusCycle c = find_cycle(rp, n0, m0);
      IntegerState x{n0, m0};
      for (std::int64_t t = 0; t < std::min<std::int64_t>(c.T, 25); ++t) {
        x = integer_step(rp, x);
        // K depends on the unwrapped representative of the start state
        const TorusCycle again = find_cycle(rp, x.N, x.M);
        CHECK(again.T == c.T);
        CHECK(again.L == c.L);
      }
      const IntegerState y = integer_step(rp, {n0, m0});
      const IntegerState yn = integer_step(rp, {n0 + 3 * Q, m0});
      const IntegerState ym = integer_step(rp, {n0, m0 - 2 * Q});
      CHECK(yn.N == y.N + 3 * Q);
      CHECK(yn.M == y.M + 3 * Q);
      CHECK(ym.N == y.N);
      CHECK(ym.M == y.M - 2 * Q);
    }
}

TEST_CASE("integer orbits reproduce float reduced-map orbits") {
  for (auto [mu, P, Q, r, s, theta0] : {std::tuple{3.0, 1L, 3L, 0L, 1L, 0.1}, {7.0, 13L, 97L, 0L, 1L, 0.37},
                                        {6.0, 7L, 100L, 1L, 2L, 0.61}, {4.0, 1L, 89L, 0L, 1L, 2.0}}) {
    const ResonanceParams rp = setup(mu, P, Q, r, s, theta0);
    const auto pot = build_potential(mu, rp.eta);
    // p = Nλ = β + nη with β = rλ, η = sλ
    const std::int64_t n0 = 3;
    IntegerState x{r + s * n0, 0};
    ReducedState f{rp.theta0, n0, rp.beta};
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      x = integer_step(rp, x);
      f = step_reduced(pot, f);
      worst = std::max(worst, std::abs(static_cast<double>(x.N) * rp.lambda - f.momentum(rp.eta)));
      worst = std::max(worst, std::abs(std::remainder(lattice_angle(rp, x.M) - f.theta, two_pi)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("sampled census") {
  const ResonanceParams rp = setup(7.0, 13, 97, 0, 1, 0.37);
  const CycleCensus a = cycle_census(rp, 500, 9);
  const CycleCensus b = cycle_census(rp, 500, 9);
  CHECK(a.states == 500);
  CHECK(a.mean_c2 == b.mean_c2);
  CHECK(a.period_winding == b.period_winding);
  const CycleCensus full = cycle_census(rp);
  CHECK(std::abs(a.ballistic_fraction - full.ballistic_fraction) < 0.1);
}
