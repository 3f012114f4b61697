#include "gtm/dynamics.hpp"

#include "gtm/rng.hpp"
#include "gtm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gtm {

ReducedState reduce(const PhasePoint& s, double eta) {
  ReducedState r;
  r.theta = s.theta;
  const double q = std::floor(s.p / eta);
  r.n = static_cast<std::int64_t>(q);
  r.beta = s.p - q * eta;
  if (r.beta < 0.0) r.beta = 0.0;
  if (r.beta >= eta) {
    r.beta -= eta;
    r.n += 1;
  }
  return r;
}

PhasePoint step(const ChannelPotential& pot, const PhasePoint& s) {
  PhasePoint out;
  out.p = s.p + kick_impulse(pot, s.theta);
  out.theta = wrap_angle(s.theta + out.p);
  return out;
}

PhasePoint step_inverse(const ChannelPotential& pot, const PhasePoint& s) {
  PhasePoint out;
  out.theta = wrap_angle(s.theta - s.p);
  out.p = s.p - kick_impulse(pot, out.theta);
  return out;
}

PhasePoint initial_point(const EnsembleSpec& spec, double cell, std::size_t index) {
  auto rng = SplitMix64::stream(spec.seed, index);
  PhasePoint s;
  s.theta = two_pi * rng.open_unit();
  const double u = rng.open_unit();
  s.p = spec.p0_mode == InitialMomentum::fixed ? spec.p0 : cell * (u - 0.5);
  return s;
}

EnergySeries EnergySeries::from_samples(std::vector<std::int64_t> times, Eigen::VectorXd values) {
  if (static_cast<Eigen::Index>(times.size()) != values.size())
    throw std::invalid_argument("EnergySeries: times and values differ in length");
  EnergySeries s;
  s.times = std::move(times);
  s.mean_p2 = values;
  s.windowed_mean_p2 = std::move(values);
  return s;
}

std::vector<std::int64_t> recording_times(std::int64_t kicks, double ratio) {
  if (kicks < 0) throw std::invalid_argument("recording_times: negative kick count");
  if (!(ratio > 1.0)) throw std::invalid_argument("recording_times: ratio must exceed 1");
  std::vector<std::int64_t> t{0};
  double x = 1.0;
  while (x <= static_cast<double>(kicks)) {
    const auto k = static_cast<std::int64_t>(std::llround(x));
    if (k > t.back() && k <= kicks) t.push_back(k);
    x *= ratio;
  }
  if (t.back() != kicks) t.push_back(kicks);
  return t;
}

namespace {

struct GtmModel {
  const ChannelPotential& pot;
  using State = ReducedState;
  State init(const PhasePoint& p) const { return reduce(p, pot.eta()); }
  void advance(State& s) const {
    s.n += pot.channel_fast(s.theta);
    s.theta = wrap_angle(s.theta + s.beta + static_cast<double>(s.n) * pot.eta());
  }
  double momentum(const State& s) const { return s.momentum(pot.eta()); }
};

struct StandardMapModel {
  double mu;
  using State = PhasePoint;
  State init(const PhasePoint& p) const { return p; }
  void advance(State& s) const {
    s.p += mu * std::sin(s.theta);
    s.theta = wrap_angle(s.theta + s.p);
  }
  double momentum(const State& s) const { return s.p; }
};

/// Integer bin counts over a growable symmetric-ish index range.
class BinCounts {
 public:
  void add(std::int64_t index, std::uint64_t count = 1) {
    if (counts_.empty()) {
      offset_ = index;
      counts_.assign(1, 0);
    }
    if (index < offset_) {
      counts_.insert(counts_.begin(), static_cast<std::size_t>(offset_ - index), 0);
      offset_ = index;
    }
    const auto i = static_cast<std::size_t>(index - offset_);
    if (i >= counts_.size()) counts_.resize(i + 1, 0);
    counts_[i] += count;
  }
  void merge(const BinCounts& other) {
    for (std::size_t i = 0; i < other.counts_.size(); ++i)
      if (other.counts_[i] != 0) add(other.offset_ + static_cast<std::int64_t>(i), other.counts_[i]);
  }
  bool empty() const { return counts_.empty(); }
  std::int64_t lowest() const { return offset_; }
  std::int64_t highest() const { return offset_ + static_cast<std::int64_t>(counts_.size()) - 1; }
  std::uint64_t at(std::int64_t index) const {
    if (counts_.empty() || index < lowest() || index > highest()) return 0;
    return counts_[static_cast<std::size_t>(index - offset_)];
  }

 private:
  std::int64_t offset_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Runs the ensemble; returns ⟨p²⟩ after each kick. `tail` is invoked with
/// (state, t, local sink) for every t in the final `tail_kicks` kicks.
template <typename Model, typename Sink, typename Tail>
Eigen::VectorXd run_ensemble(const Model& model, const EnsembleSpec& spec, double cell,
                             std::int64_t tail_kicks, Sink& sink, Tail tail) {
  if (spec.size < 1) throw std::invalid_argument("ensemble: size must be at least 1");
  if (spec.kicks < 1) throw std::invalid_argument("ensemble: kicks must be at least 1");
  if (spec.window < 1 || spec.window > spec.kicks)
    throw std::invalid_argument("ensemble: window must lie in [1, kicks]");
  if (spec.p0_mode == InitialMomentum::uniform_cell && !(cell > 0.0))
    throw std::invalid_argument("ensemble: uniform_cell sampling needs a positive cell width");

  const auto T = static_cast<std::size_t>(spec.kicks);
  const std::size_t block = std::max<std::size_t>(1, spec.block_size);
  const auto nblocks = static_cast<long>((spec.size + block - 1) / block);
  std::vector<CompensatedSum<>> total(T + 1);
  const std::int64_t tail_start = spec.kicks - tail_kicks + 1;

#pragma omp parallel for ordered schedule(static, 1)
  for (long bi = 0; bi < nblocks; ++bi) {
    const long b = spec.reverse_reduction ? nblocks - 1 - bi : bi;
    const std::size_t lo = static_cast<std::size_t>(b) * block;
    const std::size_t hi = std::min(spec.size, lo + block);
    std::vector<CompensatedSum<>> acc(T + 1);
    Sink local{};
    for (std::size_t k = 0; k < hi - lo; ++k) {
      const std::size_t i = spec.reverse_reduction ? hi - 1 - k : lo + k;
      auto s = model.init(initial_point(spec, cell, i));
      double p = model.momentum(s);
      acc[0].add(p * p);
      for (std::size_t t = 1; t <= T; ++t) {
        model.advance(s);
        p = model.momentum(s);
        acc[t].add(p * p);
        if (static_cast<std::int64_t>(t) >= tail_start) tail(s, p, local);
      }
    }
#pragma omp ordered
    {
      for (std::size_t t = 0; t <= T; ++t) total[t].add(acc[t]);
      sink.merge(local);
    }
  }

  Eigen::VectorXd per_kick(static_cast<Eigen::Index>(T + 1));
  for (std::size_t t = 0; t <= T; ++t)
    per_kick(static_cast<Eigen::Index>(t)) = total[t].value() / static_cast<double>(spec.size);
  return per_kick;
}

struct NoSink {
  void merge(const NoSink&) {}
};

EnergySeries assemble_series(const EnsembleSpec& spec, Eigen::VectorXd per_kick) {
  EnergySeries s;
  s.window = spec.window;
  s.times = recording_times(spec.kicks, spec.record_ratio);
  const auto n = static_cast<Eigen::Index>(s.times.size());
  s.mean_p2.resize(n);
  s.windowed_mean_p2.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto t = s.times[static_cast<std::size_t>(i)];
    const auto first = std::max<std::int64_t>(0, t - spec.window + 1);
    s.mean_p2(i) = per_kick(t);
    CompensatedSum<> w;
    for (auto u = first; u <= t; ++u) w.add(per_kick(u));
    s.windowed_mean_p2(i) = w.value() / static_cast<double>(t - first + 1);
  }
  s.per_kick = std::move(per_kick);
  return s;
}

}  // namespace

EnergySeries simulate_ensemble(const ChannelPotential& pot, const EnsembleSpec& spec) {
  NoSink sink;
  auto per_kick = run_ensemble(GtmModel{pot}, spec, pot.eta(), 0, sink,
                               [](const ReducedState&, double, NoSink&) {});
  return assemble_series(spec, std::move(per_kick));
}

EnergySeries standard_map_baseline(double mu, const EnsembleSpec& spec, double cell) {
  if (mu < 0.0) throw std::invalid_argument("standard map: mu must be non-negative");
  NoSink sink;
  auto per_kick = run_ensemble(StandardMapModel{mu}, spec, cell, 0, sink,
                               [](const PhasePoint&, double, NoSink&) {});
  return assemble_series(spec, std::move(per_kick));
}

MomentumHistogram momentum_distribution(const ChannelPotential& pot, const EnsembleSpec& spec) {
  const bool lattice = spec.p0_mode == InitialMomentum::fixed;
  const double width = lattice ? pot.eta() : pot.eta() / 8.0;
  BinCounts counts;
  if (lattice) {
    run_ensemble(GtmModel{pot}, spec, pot.eta(), spec.window, counts,
                 [](const ReducedState& s, double, BinCounts& c) { c.add(s.n); });
  } else {
    run_ensemble(GtmModel{pot}, spec, pot.eta(), spec.window, counts,
                 [width](const ReducedState&, double p, BinCounts& c) {
                   c.add(static_cast<std::int64_t>(std::llround(p / width)));
                 });
  }

  MomentumHistogram h;
  h.bin_width = width;
  h.window = spec.window;
  const std::int64_t reach = std::max(std::abs(counts.lowest()), std::abs(counts.highest()));
  const double total = static_cast<double>(spec.size) * static_cast<double>(spec.window);
  const double origin = lattice ? reduce(PhasePoint{0.0, spec.p0}, pot.eta()).beta : 0.0;
  for (std::int64_t i = -reach; i <= reach; ++i) {
    h.centers.push_back(origin + static_cast<double>(i) * width);
    h.probabilities.push_back(static_cast<double>(counts.at(i)) / total);
  }
  return h;
}

double growth_exponent(const EnergySeries& series, double t_begin, double t_end, EnergyColumn column) {
  const Eigen::VectorXd& v = column == EnergyColumn::windowed ? series.windowed_mean_p2 : series.mean_p2;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = static_cast<double>(series.times[i]);
    if (t < t_begin || t > t_end) continue;
    const double e = v(static_cast<Eigen::Index>(i));
    if (!(t > 0.0) || !(e > 0.0))
      throw std::invalid_argument("growth_exponent: non-positive time or energy in fit window");
    x.push_back(std::log(t));
    y.push_back(std::log(e));
  }
  if (x.size() < 3) throw std::invalid_argument("growth_exponent: fewer than 3 points in fit window");
  return fit_line(x, y).slope;
}

std::vector<PhasePoint> trajectory(const ChannelPotential& pot, PhasePoint s0, std::int64_t steps) {
  if (steps < 0) throw std::invalid_argument("trajectory: negative step count");
  std::vector<PhasePoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  s0.theta = wrap_angle(s0.theta);
  out.push_back(s0);
  for (std::int64_t t = 0; t < steps; ++t) out.push_back(step(pot, out.back()));
  return out;
}

std::vector<PhasePoint> orbit_trace(const ChannelPotential& pot, PhasePoint s0, std::int64_t steps) {
  auto out = trajectory(pot, s0, steps);
  for (auto& s : out) s.p = wrap_angle(s.p);
  return out;
}

}  // namespace gtm
