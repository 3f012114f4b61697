#include "gtm/potential.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace gtm {

bool Arc::contains(double theta) const {
  const double t = wrap_angle(theta);
  return (t >= begin && t < end) || (t + two_pi >= begin && t + two_pi < end);
}

ChannelPotential::ChannelPotential(double mu, double eta) : mu_(mu), eta_(eta) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("potential: mu must be positive");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("potential: eta must be positive");
  ratio_ = mu / eta;
  max_channel_ = static_cast<int>(std::floor(ratio_));

  constexpr double pi = std::numbers::pi;
  for (int m = 1; m <= max_channel_; ++m) {
    const double level = m / ratio_;
    if (level >= 1.0) continue;  // tangency at π/2: no change of channel
    const double a = std::asin(level);
    breakpoints_.insert(breakpoints_.end(), {a, pi - a, pi + a, two_pi - a});
  }
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());

  std::vector<double> edges;
  edges.reserve(breakpoints_.size() + 2);
  edges.push_back(0.0);
  edges.insert(edges.end(), breakpoints_.begin(), breakpoints_.end());
  edges.push_back(two_pi);

  double v = 0.0;
  segments_.reserve(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Segment s;
    s.begin = edges[i];
    s.end = edges[i + 1];
    s.channel = channel(0.5 * (s.begin + s.end));
    s.value_at_begin = v;
    v += s.channel * eta_ * (s.end - s.begin);
    segments_.push_back(s);
    channels_.push_back(s.channel);
  }
  edges_ = std::move(edges);
}

int ChannelPotential::channel_by_lookup(double theta) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), theta,
                             [](double t, const Segment& s) { return t < s.begin; });
  if (it == segments_.begin()) return channel(theta);
  --it;
  // breakpoints carry rounding error, so trunc decides near them
  const double d = std::min(theta - it->begin, it->end - theta);
  if (!(d > edge_guard)) return channel(theta);
  return it->channel;
}

ChannelPotential build_potential(double mu, double eta) { return ChannelPotential(mu, eta); }

double potential_value(const ChannelPotential& pot, double theta) {
  theta = wrap_angle(theta);
  const auto& segs = pot.segments();
  auto it = std::upper_bound(segs.begin(), segs.end(), theta,
                             [](double t, const Segment& s) { return t < s.begin; });
  if (it == segs.begin()) return 0.0;
  --it;
  return it->value_at_begin + it->channel * pot.eta() * (theta - it->begin);
}

std::vector<Arc> channel_intervals(const ChannelPotential& pot, int j) {
  std::vector<Arc> arcs;
  if (j > pot.max_channel() || j < -pot.max_channel()) return arcs;
  const auto& segs = pot.segments();
  for (const auto& s : segs) {
    if (s.channel != j) continue;
    if (!arcs.empty() && arcs.back().end == s.begin) {
      arcs.back().end = s.end;
    } else {
      arcs.push_back({s.begin, s.end});
    }
  }
  // Merge the arc ending at 2π with the one starting at 0.
  if (arcs.size() > 1 && arcs.front().begin == 0.0 && arcs.back().end == two_pi) {
    arcs.back().end = two_pi + arcs.front().end;
    arcs.erase(arcs.begin());
  }
  return arcs;
}

}  // namespace gtm
