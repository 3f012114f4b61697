#include "gtm/dynamics.hpp"
#include "gtm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

using namespace gtm;

namespace {

constexpr double pi = std::numbers::pi;
const double golden_eta = pi / 1.6180339887498949;

double pmod(double p, double eta) {
  double r = std::fmod(p, eta);
  return r < 0.0 ? r + eta : r;
}

EnsembleSpec small_spec(std::size_t size, std::int64_t kicks) {
  EnsembleSpec s;
  s.size = size;
  s.kicks = kicks;
  s.window = std::min<std::int64_t>(10, kicks);
  return s;
}

}  // namespace

TEST_CASE("full map examples") {
  const auto flat = build_potential(1.0, 2.0);
  const PhasePoint fixed = step(flat, {1.7, 0.0});
  CHECK(fixed.theta == 1.7);
  CHECK(fixed.p == 0.0);

  const auto pot = build_potential(3.0, 1.2);
  const PhasePoint s = step(pot, {pi / 2, 0.0});
  CHECK(s.p == doctest::Approx(2.4).epsilon(1e-15));
  CHECK(s.theta == doctest::Approx(pi / 2 + 2.4).epsilon(1e-15));

  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const PhasePoint x{two_pi * rng.open_unit(), 20.0 * (rng.open_unit() - 0.5)};
    CHECK(std::abs(pmod(step(pot, x).p, 1.2) - pmod(x.p, 1.2)) < 1e-12);
  }
}

TEST_CASE("reduced map examples") {
  const auto pot = build_potential(3.0, 1.2);
  const ReducedState r = step_reduced(pot, {pi / 2, 0, 0.0});
  CHECK(r.n == 2);
  CHECK(r.theta == doctest::Approx(pi / 2 + 2.4).epsilon(1e-15));

  const auto flat = build_potential(1.0, 2.0);
  ReducedState x{0.3, 4, 0.7};
  for (int t = 0; t < 50; ++t) {
    const ReducedState y = step_reduced(flat, x);
    CHECK(y.n == 4);
    CHECK(y.theta == doctest::Approx(wrap_angle(x.theta + 0.7 + 8.0)).epsilon(1e-14));
    x = y;
  }

  const ReducedState split = reduce({1.0, -5.5}, 1.2);
  CHECK(split.beta >= 0.0);
  CHECK(split.beta < 1.2);
  CHECK(split.momentum(1.2) == doctest::Approx(-5.5).epsilon(1e-15));
}

TEST_CASE("reduced map reproduces the full map's channel trajectory") {
  const auto pot = build_potential(3.0, golden_eta);
  SplitMix64 rng(11);
  long mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const double beta = golden_eta * rng.open_unit();
    const std::int64_t n0 = static_cast<std::int64_t>(rng() % 21) - 10;
    ReducedState r{two_pi * rng.open_unit(), n0, beta};
    PhasePoint f{r.theta, r.momentum(golden_eta)};
    for (int t = 0; t < 1000; ++t) {
      r = step_reduced(pot, r);
      f = step(pot, f);
      if (std::llround((f.p - beta) / golden_eta) != r.n) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("quasi-momentum conservation over a long orbit") {
  const auto pot = build_potential(3.0, golden_eta);
  const double p0 = golden_eta / std::numbers::sqrt2;
  PhasePoint f{1.0, p0};
  ReducedState r = reduce(f, golden_eta);
  const double beta = r.beta;
  for (int t = 0; t < 1000000; ++t) {
    f = step(pot, f);
    r = step_reduced(pot, r);
  }
  CHECK(std::memcmp(&r.beta, &beta, sizeof beta) == 0);
  CHECK(std::abs(pmod(f.p, golden_eta) - pmod(p0, golden_eta)) < 1e-9);

  const auto trace = trajectory(pot, {1.0, p0}, 2000);
  for (const auto& x : trace) CHECK(std::abs(pmod(x.p, golden_eta) - pmod(p0, golden_eta)) < 1e-11);
}

TEST_CASE("time reversal") {
  const auto pot = build_potential(4.0, golden_eta);
  SplitMix64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint x0{two_pi * rng.open_unit(), 3.0 * rng.open_unit()};
    PhasePoint x = x0;
    for (int t = 0; t < 1000; ++t) x = step(pot, x);
    for (int t = 0; t < 1000; ++t) x = step_inverse(pot, x);
    CHECK(std::abs(std::remainder(x.theta - x0.theta, two_pi)) < 1e-6);
    CHECK(std::abs(x.p - x0.p) < 1e-6);
  }
}

TEST_CASE("trajectory and orbit trace") {
  const auto flat = build_potential(1.0, 2.0);
  const auto fixed = trajectory(flat, {2.0, 0.0}, 25);
  CHECK(fixed.size() == 26);
  for (const auto& x : fixed) {
    CHECK(x.theta == 2.0);
    CHECK(x.p == 0.0);
  }
  const auto pot = build_potential(3.0, 1.2);
  const auto trace = orbit_trace(pot, {0.4, 7.0}, 100);
  CHECK(trace.size() == 101);
  for (const auto& x : trace) {
    CHECK(x.p >= 0.0);
    CHECK(x.p < two_pi);
  }
}

TEST_CASE("recording grid") {
  const auto t = recording_times(10000, 1.1);
  CHECK(t.front() == 0);
  CHECK(t[1] == 1);
  CHECK(t.back() == 10000);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
  CHECK(recording_times(0, 1.1) == std::vector<std::int64_t>{0});
}

TEST_CASE("initial conditions") {
  EnsembleSpec spec;
  spec.p0_mode = InitialMomentum::uniform_cell;
  double lo = 1.0, hi = -1.0;
  for (std::size_t i = 0; i < 10000; ++i) {
    const PhasePoint x = initial_point(spec, golden_eta, i);
    CHECK(x.theta > 0.0);
    CHECK(x.theta < two_pi);
    lo = std::min(lo, x.p);
    hi = std::max(hi, x.p);
  }
  CHECK(lo > -golden_eta / 2);
  CHECK(hi < golden_eta / 2);
  CHECK(hi - lo > 0.99 * golden_eta);
}

TEST_CASE("ensemble with a flat potential keeps its energy") {
  const auto flat = build_potential(1.0, 2.0);
  EnsembleSpec spec = small_spec(500, 200);
  spec.p0 = 0.75;
  const EnergySeries s = simulate_ensemble(flat, spec);
  for (Eigen::Index i = 0; i < s.mean_p2.size(); ++i) CHECK(s.mean_p2(i) == doctest::Approx(0.5625).epsilon(1e-14));

  const MomentumHistogram h = momentum_distribution(flat, spec);
  int occupied = 0;
  for (std::size_t i = 0; i < h.probabilities.size(); ++i)
    if (h.probabilities[i] > 0.0) {
      ++occupied;
      CHECK(h.probabilities[i] == 1.0);
      CHECK(h.centers[i] == doctest::Approx(0.75).epsilon(1e-14));
    }
  CHECK(occupied == 1);
}

TEST_CASE("histograms are normalized") {
  const auto pot = build_potential(4.0, golden_eta);
  EnsembleSpec spec = small_spec(3000, 300);
  for (auto mode : {InitialMomentum::fixed, InitialMomentum::uniform_cell}) {
    spec.p0_mode = mode;
    spec.p0 = golden_eta / 2;
    const MomentumHistogram h = momentum_distribution(pot, spec);
    double total = 0.0;
    for (double p : h.probabilities) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(h.bin_width == doctest::Approx(mode == InitialMomentum::fixed ? golden_eta : golden_eta / 8));
  }
}

TEST_CASE("determinism and reduction order") {
  const auto pot = build_potential(3.0, golden_eta);
  EnsembleSpec spec = small_spec(10000, 500);
  spec.block_size = 1000;
  spec.p0_mode = InitialMomentum::uniform_cell;
  const EnergySeries a = simulate_ensemble(pot, spec);
  const EnergySeries b = simulate_ensemble(pot, spec);
  REQUIRE(a.per_kick.size() == b.per_kick.size());
  CHECK(std::memcmp(a.per_kick.data(), b.per_kick.data(), sizeof(double) * a.per_kick.size()) == 0);
  CHECK(std::memcmp(a.windowed_mean_p2.data(), b.windowed_mean_p2.data(),
                    sizeof(double) * a.windowed_mean_p2.size()) == 0);

  spec.reverse_reduction = true;
  const EnergySeries r = simulate_ensemble(pot, spec);
  const double rel = ((r.per_kick - a.per_kick).array().abs() / a.per_kick.array()).maxCoeff();
  CHECK(rel < 1e-10);

  spec.reverse_reduction = false;
  spec.seed = 2;
  const EnergySeries c = simulate_ensemble(pot, spec);
  CHECK(c.per_kick(500) != a.per_kick(500));
}

TEST_CASE("windowed mean covers the trailing kicks") {
  const auto pot = build_potential(3.0, golden_eta);
  EnsembleSpec spec = small_spec(200, 300);
  spec.window = 25;
  const EnergySeries s = simulate_ensemble(pot, spec);
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const auto t = s.times[i];
    const auto first = std::max<std::int64_t>(0, t - 24);
    CHECK(s.windowed_mean_p2(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(s.per_kick.segment(first, t - first + 1).mean()).epsilon(1e-13));
  }
}

TEST_CASE("growth exponent on synthetic series") {
  std::vector<std::int64_t> t = recording_times(10000, 1.1);
  Eigen::VectorXd quad(t.size()), lin(t.size()), flat(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = static_cast<double>(t[i]);
    quad(static_cast<Eigen::Index>(i)) = 0.37 * x * x;
    lin(static_cast<Eigen::Index>(i)) = 2.5 * x;
    flat(static_cast<Eigen::Index>(i)) = 4.0;
  }
  CHECK(growth_exponent(EnergySeries::from_samples(t, quad), 1000, 10000) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(growth_exponent(EnergySeries::from_samples(t, lin), 1000, 10000) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(growth_exponent(EnergySeries::from_samples(t, flat), 1000, 10000)) < 1e-12);
  CHECK_THROWS_AS(growth_exponent(EnergySeries::from_samples(t, lin), 5000, 5100), std::invalid_argument);
}

TEST_CASE("standard map baseline") {
  EnsembleSpec spec = small_spec(2000, 100);
  spec.p0 = 0.3;
  const EnergySeries still = standard_map_baseline(0.0, spec);
  for (Eigen::Index i = 0; i < still.mean_p2.size(); ++i) CHECK(still.mean_p2(i) == doctest::Approx(0.09));

  EnsembleSpec big;
  big.size = 100000;
  big.kicks = 1000;
  big.p0_mode = InitialMomentum::uniform_cell;
  const EnergySeries diffusive = standard_map_baseline(3.0, big);
  const double e = growth_exponent(diffusive, 100, 1000, EnergyColumn::raw);
  CHECK(e > 0.8);
  CHECK(e < 1.2);
}

TEST_CASE("fine channels track the smooth rotor at early times") {
  EnsembleSpec spec;
  spec.size = 20000;
  spec.kicks = 20;
  spec.window = 1;
  spec.p0_mode = InitialMomentum::uniform_cell;
  const auto fine = build_potential(3.0, 0.125);
  const EnergySeries g = simulate_ensemble(fine, spec);
  const EnergySeries k = standard_map_baseline(3.0, spec, 0.125);
  for (std::int64_t t = 1; t <= 20; ++t) CHECK(std::abs(g.per_kick(t) / k.per_kick(t) - 1.0) < 0.1);
}

TEST_CASE("ensemble input validation") {
  const auto pot = build_potential(3.0, 1.2);
  EnsembleSpec spec = small_spec(10, 10);
  spec.window = 11;
  CHECK_THROWS_AS(simulate_ensemble(pot, spec), std::invalid_argument);
  spec = small_spec(0, 10);
  CHECK_THROWS_AS(simulate_ensemble(pot, spec), std::invalid_argument);
}
