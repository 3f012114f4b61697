#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace gtm {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduces an angle to [0, 2π).
inline double wrap_angle(double theta) {
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  // fmod of a tiny negative value can round up to exactly 2π
  return r >= two_pi ? 0.0 : r;
}

/// An arc [begin, end) of the circle. begin lies in [0, 2π); end may exceed
/// 2π when the arc wraps through zero.
struct Arc {
  double begin = 0.0;
  double end = 0.0;
  double length() const { return end - begin; }
  bool contains(double theta) const;
};

/// Maximal arc on which the channel index is constant.
struct Segment {
  double begin = 0.0;
  double end = 0.0;
  int channel = 0;
  double value_at_begin = 0.0;  // V(begin)
};

/// Continuous, 2π-periodic, piecewise-linear kicking potential whose slope
/// V'(θ) = j(θ)·η takes only the integer channels j ∈ [-J, J], with
/// j(θ) = trunc(μ sin θ / η). Immutable after construction.
class ChannelPotential {
 public:
  ChannelPotential(double mu, double eta);

  double mu() const { return mu_; }
  double eta() const { return eta_; }
  int max_channel() const { return max_channel_; }
  int channel_count() const { return 2 * max_channel_ + 1; }

  /// Discontinuities of V' in [0, 2π), sorted.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  /// Segments covering [0, 2π) in order; boundaries are 0 and the
  /// breakpoints. Adjacent segments may share a channel across θ = 0.
  const std::vector<Segment>& segments() const { return segments_; }

  /// j(θ) by direct truncation. Hot-loop path.
  int channel(double theta) const {
    return static_cast<int>(std::trunc(ratio_ * std::sin(theta)));
  }

  /// j(θ) by binary search over the breakpoint table, deferring to
  /// channel() within edge_guard of a breakpoint.
  int channel_by_lookup(double theta) const;

  /// j(θ) from the segment table, falling back to channel() within
  /// edge_guard of a segment edge. Used by ensemble loops; θ in [0, 2π).
  int channel_fast(double theta) const {
    std::size_t idx = 0;
    if (edges_.size() <= 34) {
      for (std::size_t k = 1; k + 1 < edges_.size(); ++k) idx += theta >= edges_[k];
    } else {
      idx = static_cast<std::size_t>(std::upper_bound(edges_.begin() + 1, edges_.end() - 1, theta) -
                                     edges_.begin()) - 1;
    }
    const double d = std::min(theta - edges_[idx], edges_[idx + 1] - theta);
    if (!(d > edge_guard)) return channel(theta);
    return channels_[idx];
  }

  static constexpr double edge_guard = 1e-9;

 private:
  double mu_;
  double eta_;
  double ratio_;  // μ/η
  int max_channel_;
  std::vector<double> breakpoints_;
  std::vector<Segment> segments_;
  std::vector<double> edges_;  // 0, breakpoints..., 2π
  std::vector<int> channels_;  // channel of [edges_[i], edges_[i+1])
};

ChannelPotential build_potential(double mu, double eta);

/// j(θ) for θ in [0, 2π).
inline int channel_index(const ChannelPotential& pot, double theta) { return pot.channel(theta); }

/// V'(θ) = j(θ)·η.
inline double kick_impulse(const ChannelPotential& pot, double theta) {
  return pot.channel(theta) * pot.eta();
}

/// V(θ) = ∫₀^θ V'(s) ds, normalized so V(0) = 0; θ is taken mod 2π.
double potential_value(const ChannelPotential& pot, double theta);

/// Maximal arcs on which j(θ) = j. Empty when |j| > J.
std::vector<Arc> channel_intervals(const ChannelPotential& pot, int j);

}  // namespace gtm
