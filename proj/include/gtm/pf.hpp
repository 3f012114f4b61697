#pragma once

#include "gtm/potential.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace gtm {

/// Complex amplitudes Ψ(θ_g, n) on θ_g = 2πg/G, g ∈ [0, G), and momentum
/// bands n ∈ [-N, N]. Column n + N holds band n, so each band is contiguous.
class PFField {
 public:
  PFField(int grid, int band_halfwidth);

  int grid() const { return grid_; }
  int band_halfwidth() const { return band_halfwidth_; }
  int bands() const { return 2 * band_halfwidth_ + 1; }
  double cell() const { return two_pi / grid_; }
  double theta(int g) const { return cell() * g; }

  std::complex<double>& operator()(int g, int n) { return values_(g, n + band_halfwidth_); }
  const std::complex<double>& operator()(int g, int n) const { return values_(g, n + band_halfwidth_); }

  Eigen::MatrixXcd& values() { return values_; }
  const Eigen::MatrixXcd& values() const { return values_; }

  /// ‖Ψ‖² = Σ |Ψ|² · 2π/G.
  double norm_squared() const { return values_.squaredNorm() * cell(); }

 private:
  int grid_;
  int band_halfwidth_;
  Eigen::MatrixXcd values_;
};

/// Ψ = (2π)^{-1/2} on band n0, zero elsewhere. Unit norm.
PFField uniform_band_field(int grid, int band_halfwidth, int n0 = 0);

/// Single grid cell g0 on band n0. Unit norm.
PFField cell_bump_field(int grid, int band_halfwidth, int g0, int n0);

/// Periodic Gaussian centered at θc on band n0 whose |Ψ|² has standard
/// deviation `width_cells` grid cells. Unit norm.
PFField gaussian_bump_field(int grid, int band_halfwidth, double theta_c, double width_cells, int n0);

enum class KickOrdering {
  printed,     // Ψ'(θ,n) = Ψ(θ', n - 2j(θ')), θ' = θ - ηn/2 - β
  factorized,  // Ψ'(θ,n) = Ψ(θ - ηn'/2 - β, n'),  n' = n - 2j(θ)
};

/// Perron-Frobenius propagator of the reduced GTM on a PFField, written as
/// a product of two exactly unitary factors on the grid: the kick K, a
/// pointwise band permutation (KΨ)(θ_g, n) = Ψ(θ_g, n - 2j(θ_g)), and the
/// shear S, a per-band spectral translation (SΨ)(θ, n) = Ψ(θ - ηn/2 - β, n).
/// The printed ordering is S∘K, the factorized one K∘S.
class PerronFrobenius {
 public:
  PerronFrobenius(const ChannelPotential& pot, double beta, int grid, int band_halfwidth,
                  KickOrdering ordering = KickOrdering::printed, double leakage_tolerance = 1e-8);

  /// Throws NumericalBudgetError when the bands a kick can push out of
  /// range hold more than leakage_tolerance of the norm.
  void step(PFField& field);
  void step_inverse(PFField& field);

  /// Fraction of ‖Ψ‖² within 2J bands of either edge.
  double boundary_fraction(const PFField& field) const;

  /// Shear offset a_n = ηn/2 + β.
  double shear_offset(int n) const { return 0.5 * eta_ * n + beta_; }

  const ChannelPotential& potential() const { return pot_; }
  double beta() const { return beta_; }

 private:
  void check_shape(const PFField& field) const;
  void check_leakage(const PFField& field) const;
  void kick(PFField& field, int direction);
  void shear(PFField& field, int direction);

  ChannelPotential pot_;
  double eta_;
  double beta_;
  int grid_;
  int band_halfwidth_;
  KickOrdering ordering_;
  double leakage_tolerance_;
  std::vector<int> grid_channel_;  // j(θ_g)
  Eigen::VectorXd wavenumber_;     // k for each FFT slot
  Eigen::MatrixXcd shear_phase_;   // e^{-i k a_n}, one column per band
  Eigen::FFT<double> fft_;
  Eigen::MatrixXcd scratch_;
  Eigen::VectorXcd spectrum_;
};

/// One P-F step with a freshly built propagator.
PFField pf_step(const ChannelPotential& pot, double beta, const PFField& field,
                KickOrdering ordering = KickOrdering::printed);

/// f_{nk} = ∫ Ψ(θ, n) e_k(θ)* dθ with e_k = (2π)^{-1/2} e^{ikθ}.
/// Row k + G/2 holds harmonic k ∈ [-G/2, G/2); column n + N holds band n.
Eigen::MatrixXcd fourier_amplitudes(const PFField& field);

struct HarmonicDistribution {
  std::vector<int> k;
  Eigen::VectorXd probability;  // P(k) = Σ_n |f_{nk}|², sums to ‖Ψ‖²
  double time = 0.0;
};

HarmonicDistribution harmonic_distribution(const PFField& field, double time = 0.0);

/// Σ_θ |Ψ(θ, n)|² per band, normalized to total 1. Index n + N.
Eigen::VectorXd band_distribution(const PFField& field);

}  // namespace gtm
