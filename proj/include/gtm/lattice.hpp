#pragma once

#include "gtm/potential.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace gtm {

enum class CouplingModel { gtm, qkr_tan, qkr_half };

std::string to_string(CouplingModel model);

/// Hopping amplitudes W(Δn, Δk) of a 2D tight-binding model, Δn along
/// momentum and Δk along position harmonics.
struct CouplingTable {
  CouplingModel model = CouplingModel::gtm;
  int max_dn = 0;
  int max_dk = 0;
  Eigen::MatrixXcd amplitude;  // row Δn + max_dn, column Δk + max_dk
  double mu = 0.0;
  double eta = 0.0;  // η for the GTM, ħ for the QKR tables
  int fft_grid = 0;  // converged FFT grid (QKR tables only)

  std::complex<double> operator()(int dn, int dk) const {
    if (dn < -max_dn || dn > max_dn || dk < -max_dk || dk > max_dk) return {0.0, 0.0};
    return amplitude(dn + max_dn, dk + max_dk);
  }
  double magnitude(int dn, int dk) const { return std::abs((*this)(dn, dk)); }
  double phase(int dn, int dk) const { return std::arg((*this)(dn, dk)); }
};

/// W̃(Δn, Δk) = (1/2π) ∫_{I_Δn} e^{-iΔkθ} dθ where I_Δn is the set on which
/// 2V'(θ) = Δn·η, evaluated in closed form arc by arc. Rows Δn ∈ [-2J, 2J].
CouplingTable gtm_couplings(const ChannelPotential& pot, int max_dk);

struct FftConvergence {
  int initial_grid = 1024;
  int max_grid = 8192;
  double tolerance = 1e-10;  // max change of retained coefficients on doubling
};

/// Fourier coefficients of tan(μ/ħ sin θ sin φ); requires μ < πħ/2.
CouplingTable qkr_tan_couplings(double mu, double hbar, int cutoff, const FftConvergence& conv = {});

/// Fourier coefficients of the half kick exp(iμ/ħ sin θ sin φ).
CouplingTable qkr_halfkick_couplings(double mu, double hbar, int cutoff, const FftConvergence& conv = {});

/// χ_{nk}(ω) = [ω - (nη/2 + β)k]/2 and Z_{nk} = tan χ_{nk}.
struct OnSitePhaseGen {
  double eta = 1.0;
  double beta = 0.0;
  double omega = 0.0;

  double chi(long n, long k) const {
    return 0.5 * (omega - (0.5 * eta * static_cast<double>(n) + beta) * static_cast<double>(k));
  }
};

struct IndexRange {
  long first = 0;
  long last = 0;  // inclusive
  long size() const { return last - first + 1; }
};

struct OnSiteTable {
  IndexRange n;
  IndexRange k;
  Eigen::MatrixXd chi;  // row n - n.first, column k - k.first
  Eigen::MatrixXd z;    // tan χ, NaN at poles
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pole;  // |cos χ| < pole_threshold
  static constexpr double pole_threshold = 1e-12;
};

OnSiteTable onsite_sequence(const OnSitePhaseGen& gen, IndexRange n, IndexRange k);

/// χ reduced to [0, π).
double chi_mod_pi(double chi);

enum class Axis { n, k };

struct DecayPoint {
  int offset = 0;
  double max_abs = 0.0;  // max |W| over the other axis
};

std::vector<DecayPoint> decay_profile(const CouplingTable& table, Axis axis);

struct SliceStatistics {
  double ks_distance = 1.0;           // (χ mod π)/π against U[0,1)
  double lag1_autocorrelation = 0.0;  // of sign(Z)
  double max_autocorrelation = 0.0;   // max |ρ(lag)| of sign(Z), lag ∈ [2, max_lag]
  long distinct_values = 0;           // distinct χ mod π up to 1e-9
};

struct PseudorandomnessReport {
  SliceStatistics along_n;   // fixed k, n = start .. start + length - 1
  SliceStatistics along_k;   // fixed n, k varying
  SliceStatistics diagonal;  // n = k varying
};

struct SliceSpec {
  long fixed_k = 1;
  long fixed_n = 1;
  long start = 0;
  long length = 10000;
  long max_lag = 20;
};

SliceStatistics slice_statistics(const std::vector<double>& chi, long max_lag);

PseudorandomnessReport pseudorandomness_diagnostic(const OnSitePhaseGen& gen, const SliceSpec& slices = {});

/// Field on the lattice sites (n, k) ∈ n_range × k_range.
struct LatticeField {
  IndexRange n;
  IndexRange k;
  Eigen::MatrixXcd values;  // row n - n.first, column k - k.first
};

/// Σ_{n',k'} |W̃_{n-n',k-k'}| sin(χ_{n'k'} + φ_{n-n',k-k'}) Φ_{n'k'}: the
/// left-hand side of the half-kick lattice equation at site (n, k).
std::complex<double> apply_row(const CouplingTable& table, const OnSitePhaseGen& gen, const LatticeField& field,
                               long n, long k);

}  // namespace gtm
