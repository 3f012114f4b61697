#include "gtm/lattice.hpp"

#include "gtm/errors.hpp"
#include "gtm/stats.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gtm {

std::string to_string(CouplingModel model) {
  switch (model) {
    case CouplingModel::gtm: return "gtm";
    case CouplingModel::qkr_tan: return "qkr-tan";
    case CouplingModel::qkr_half: return "qkr-half";
  }
  return "unknown";
}

CouplingTable gtm_couplings(const ChannelPotential& pot, int max_dk) {
  if (max_dk < 1) throw std::invalid_argument("gtm_couplings: max_dk must be at least 1");
  CouplingTable t;
  t.model = CouplingModel::gtm;
  t.max_dn = 2 * pot.max_channel();
  t.max_dk = max_dk;
  t.mu = pot.mu();
  t.eta = pot.eta();
  t.amplitude = Eigen::MatrixXcd::Zero(2 * t.max_dn + 1, 2 * max_dk + 1);
  const std::complex<double> i{0.0, 1.0};
  for (int j = -pot.max_channel(); j <= pot.max_channel(); ++j) {
    const auto arcs = channel_intervals(pot, j);
    const int row = 2 * j + t.max_dn;
    for (int dk = -max_dk; dk <= max_dk; ++dk) {
      std::complex<double> w{0.0, 0.0};
      for (const auto& arc : arcs) {
        if (dk == 0) {
          w += arc.length() / two_pi;
        } else {
          const double k = dk;
          w += (std::exp(-i * (k * arc.begin)) - std::exp(-i * (k * arc.end))) / (two_pi * i * k);
        }
      }
      t.amplitude(row, dk + max_dk) = w;
    }
  }
  return t;
}

namespace {

/// Coefficients c(n, k) of f(θ, φ) = Σ c(n,k) e^{i(kθ + nφ)} sampled on an
/// M×M grid, for |n|, |k| ≤ cutoff.
Eigen::MatrixXcd sampled_coefficients(const std::function<std::complex<double>(double, double)>& f, int M,
                                      int cutoff) {
  Eigen::MatrixXcd F(M, M);  // row φ_b, column θ_a
  const double h = two_pi / M;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) F(b, a) = f(h * a, h * b);

  Eigen::FFT<double> fft;
  Eigen::VectorXcd in(M), out(M);
  for (int a = 0; a < M; ++a) {
    in = F.col(a);
    fft.fwd(out.data(), in.data(), M);
    F.col(a) = out;
  }
  for (int b = 0; b < M; ++b) {
    in = F.row(b).transpose();
    fft.fwd(out.data(), in.data(), M);
    F.row(b) = out.transpose();
  }
  F /= static_cast<double>(M) * static_cast<double>(M);

  Eigen::MatrixXcd c(2 * cutoff + 1, 2 * cutoff + 1);
  for (int n = -cutoff; n <= cutoff; ++n)
    for (int k = -cutoff; k <= cutoff; ++k) c(n + cutoff, k + cutoff) = F((n + M) % M, (k + M) % M);
  return c;
}

CouplingTable converged_table(CouplingModel model, double mu, double hbar, int cutoff, const FftConvergence& conv,
                              const std::function<std::complex<double>(double, double)>& f) {
  if (cutoff < 1) throw std::invalid_argument("coupling table: cutoff must be at least 1");
  int M = conv.initial_grid;
  while (M <= 2 * cutoff + 1) M *= 2;
  Eigen::MatrixXcd coarse = sampled_coefficients(f, M, cutoff);
  for (;;) {
    if (2 * M > conv.max_grid)
      throw NumericalBudgetError("coupling table: FFT grid did not converge by " + std::to_string(conv.max_grid));
    Eigen::MatrixXcd fine = sampled_coefficients(f, 2 * M, cutoff);
    const double change = (fine - coarse).cwiseAbs().maxCoeff();
    M *= 2;
    coarse = std::move(fine);
    if (change < conv.tolerance) break;
  }
  CouplingTable t;
  t.model = model;
  t.max_dn = cutoff;
  t.max_dk = cutoff;
  t.amplitude = std::move(coarse);
  t.mu = mu;
  t.eta = hbar;
  t.fft_grid = M;
  return t;
}

}  // namespace

CouplingTable qkr_tan_couplings(double mu, double hbar, int cutoff, const FftConvergence& conv) {
  if (!(hbar > 0.0)) throw ConfigError("qkr_tan_couplings: hbar must be positive");
  if (mu < 0.0) throw ConfigError("qkr_tan_couplings: mu must be non-negative");
  if (mu >= 0.5 * std::numbers::pi * hbar)
    throw ConfigError("qkr_tan_couplings: mu >= pi*hbar/2 gives non-integrable singularities; use half-kick table");
  const double alpha = mu / hbar;
  return converged_table(CouplingModel::qkr_tan, mu, hbar, cutoff, conv, [alpha](double theta, double phi) {
    return std::complex<double>(std::tan(alpha * std::sin(theta) * std::sin(phi)), 0.0);
  });
}

CouplingTable qkr_halfkick_couplings(double mu, double hbar, int cutoff, const FftConvergence& conv) {
  if (!(hbar > 0.0)) throw ConfigError("qkr_halfkick_couplings: hbar must be positive");
  if (mu < 0.0) throw ConfigError("qkr_halfkick_couplings: mu must be non-negative");
  const double alpha = mu / hbar;
  return converged_table(CouplingModel::qkr_half, mu, hbar, cutoff, conv, [alpha](double theta, double phi) {
    return std::polar(1.0, alpha * std::sin(theta) * std::sin(phi));
  });
}

double chi_mod_pi(double chi) {
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(chi, pi);
  if (r < 0.0) r += pi;
  return r >= pi ? 0.0 : r;
}

OnSiteTable onsite_sequence(const OnSitePhaseGen& gen, IndexRange n, IndexRange k) {
  if (n.size() < 1 || k.size() < 1) throw std::invalid_argument("onsite_sequence: empty index range");
  OnSiteTable t;
  t.n = n;
  t.k = k;
  t.chi.resize(n.size(), k.size());
  t.z.resize(n.size(), k.size());
  t.pole.resize(n.size(), k.size());
  for (long a = 0; a < n.size(); ++a) {
    for (long b = 0; b < k.size(); ++b) {
      const double chi = gen.chi(n.first + a, k.first + b);
      const bool pole = std::abs(std::cos(chi)) < OnSiteTable::pole_threshold;
      t.chi(a, b) = chi;
      t.pole(a, b) = pole;
      t.z(a, b) = pole ? std::numeric_limits<double>::quiet_NaN() : std::tan(chi);
    }
  }
  return t;
}

std::vector<DecayPoint> decay_profile(const CouplingTable& table, Axis axis) {
  std::vector<DecayPoint> out;
  const Eigen::MatrixXd mag = table.amplitude.cwiseAbs();
  if (axis == Axis::n) {
    for (int dn = -table.max_dn; dn <= table.max_dn; ++dn)
      out.push_back({dn, mag.row(dn + table.max_dn).maxCoeff()});
  } else {
    for (int dk = -table.max_dk; dk <= table.max_dk; ++dk)
      out.push_back({dk, mag.col(dk + table.max_dk).maxCoeff()});
  }
  return out;
}

SliceStatistics slice_statistics(const std::vector<double>& chi, long max_lag) {
  constexpr double pi = std::numbers::pi;
  SliceStatistics s;
  std::vector<double> u, sign;
  u.reserve(chi.size());
  sign.reserve(chi.size());
  for (double c : chi) {
    const double r = chi_mod_pi(c);
    u.push_back(r / pi);
    sign.push_back(r < 0.5 * pi ? 1.0 : -1.0);  // sign of tan χ
  }
  s.ks_distance = ks_distance_uniform(u);
  s.lag1_autocorrelation = autocorrelation(sign, 1);
  for (long lag = 2; lag <= max_lag; ++lag)
    s.max_autocorrelation = std::max(s.max_autocorrelation, std::abs(autocorrelation(sign, static_cast<std::size_t>(lag))));

  std::vector<double> sorted = u;
  std::sort(sorted.begin(), sorted.end());
  long distinct = sorted.empty() ? 0 : 1;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] - sorted[i - 1] > 1e-9 / pi) ++distinct;
  // values just below 1 and just above 0 are the same point of the circle
  if (distinct > 1 && sorted.front() + 1.0 - sorted.back() <= 1e-9 / pi) --distinct;
  s.distinct_values = distinct;
  return s;
}

PseudorandomnessReport pseudorandomness_diagnostic(const OnSitePhaseGen& gen, const SliceSpec& slices) {
  if (slices.length < 2) throw std::invalid_argument("pseudorandomness_diagnostic: slice too short");
  std::vector<double> along_n, along_k, diagonal;
  for (long i = slices.start; i < slices.start + slices.length; ++i) {
    along_n.push_back(gen.chi(i, slices.fixed_k));
    along_k.push_back(gen.chi(slices.fixed_n, i));
    diagonal.push_back(gen.chi(i, i));
  }
  PseudorandomnessReport r;
  r.along_n = slice_statistics(along_n, slices.max_lag);
  r.along_k = slice_statistics(along_k, slices.max_lag);
  r.diagonal = slice_statistics(diagonal, slices.max_lag);
  return r;
}

std::complex<double> apply_row(const CouplingTable& table, const OnSitePhaseGen& gen, const LatticeField& field,
                               long n, long k) {
  std::complex<double> acc{0.0, 0.0};
  for (long a = 0; a < field.n.size(); ++a) {
    const long np = field.n.first + a;
    const long dn = n - np;
    if (dn < -table.max_dn || dn > table.max_dn) continue;
    for (long b = 0; b < field.k.size(); ++b) {
      const long kp = field.k.first + b;
      const long dk = k - kp;
      if (dk < -table.max_dk || dk > table.max_dk) continue;
      const auto w = table(static_cast<int>(dn), static_cast<int>(dk));
      acc += std::abs(w) * std::sin(gen.chi(np, kp) + std::arg(w)) * field.values(a, b);
    }
  }
  return acc;
}

}  // namespace gtm
