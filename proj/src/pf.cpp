#include "gtm/pf.hpp"

#include "gtm/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gtm {

PFField::PFField(int grid, int band_halfwidth) : grid_(grid), band_halfwidth_(band_halfwidth) {
  if (grid < 2 || (grid & (grid - 1)) != 0) throw std::invalid_argument("PFField: grid must be a power of two");
  if (band_halfwidth < 0) throw std::invalid_argument("PFField: band half-width must be non-negative");
  values_ = Eigen::MatrixXcd::Zero(grid, 2 * band_halfwidth + 1);
}

PFField uniform_band_field(int grid, int band_halfwidth, int n0) {
  PFField f(grid, band_halfwidth);
  if (std::abs(n0) > band_halfwidth) throw std::invalid_argument("uniform_band_field: band out of range");
  f.values().col(n0 + band_halfwidth).setConstant(1.0 / std::sqrt(two_pi));
  return f;
}

PFField cell_bump_field(int grid, int band_halfwidth, int g0, int n0) {
  PFField f(grid, band_halfwidth);
  if (std::abs(n0) > band_halfwidth) throw std::invalid_argument("cell_bump_field: band out of range");
  f(((g0 % grid) + grid) % grid, n0) = 1.0 / std::sqrt(f.cell());
  return f;
}

PFField gaussian_bump_field(int grid, int band_halfwidth, double theta_c, double width_cells, int n0) {
  PFField f(grid, band_halfwidth);
  if (std::abs(n0) > band_halfwidth) throw std::invalid_argument("gaussian_bump_field: band out of range");
  if (!(width_cells > 0.0)) throw std::invalid_argument("gaussian_bump_field: width must be positive");
  const double center = wrap_angle(theta_c) / f.cell();
  for (int g = 0; g < grid; ++g) {
    double d = std::remainder(g - center, static_cast<double>(grid));
    f(g, n0) = std::exp(-d * d / (4.0 * width_cells * width_cells));
  }
  f.values() /= std::sqrt(f.norm_squared());
  return f;
}

PerronFrobenius::PerronFrobenius(const ChannelPotential& pot, double beta, int grid, int band_halfwidth,
                                 KickOrdering ordering, double leakage_tolerance)
    : pot_(pot),
      eta_(pot.eta()),
      beta_(beta),
      grid_(grid),
      band_halfwidth_(band_halfwidth),
      ordering_(ordering),
      leakage_tolerance_(leakage_tolerance) {
  if (grid < 2 || (grid & (grid - 1)) != 0)
    throw std::invalid_argument("PerronFrobenius: grid must be a power of two");
  if (band_halfwidth < 2 * pot.max_channel())
    throw std::invalid_argument("PerronFrobenius: band range narrower than one kick");
  grid_channel_.resize(static_cast<std::size_t>(grid));
  const double h = two_pi / grid;
  for (int g = 0; g < grid; ++g) grid_channel_[static_cast<std::size_t>(g)] = pot.channel(h * g);
  wavenumber_.resize(grid);
  for (int i = 0; i < grid; ++i) wavenumber_(i) = i < grid / 2 ? i : i - grid;
  const int B = 2 * band_halfwidth + 1;
  shear_phase_.resize(grid, B);
  for (int c = 0; c < B; ++c) {
    const double a = shear_offset(c - band_halfwidth);
    for (int i = 0; i < grid; ++i) shear_phase_(i, c) = std::polar(1.0, -wavenumber_(i) * a);
  }
  scratch_.resize(grid, B);
  spectrum_.resize(grid);
}

void PerronFrobenius::check_shape(const PFField& field) const {
  if (field.grid() != grid_ || field.band_halfwidth() != band_halfwidth_)
    throw std::invalid_argument("PerronFrobenius: field shape does not match propagator");
}

double PerronFrobenius::boundary_fraction(const PFField& field) const {
  const int reach = 2 * pot_.max_channel();
  const auto& v = field.values();
  const int B = field.bands();
  double edge = 0.0;
  for (int c = 0; c < B; ++c)
    if (c < reach || c >= B - reach) edge += v.col(c).squaredNorm();
  const double total = v.squaredNorm();
  return total > 0.0 ? edge / total : 0.0;
}

void PerronFrobenius::check_leakage(const PFField& field) const {
  const double f = boundary_fraction(field);
  if (f > leakage_tolerance_) {
    std::ostringstream msg;
    msg << "P-F band leakage " << f << " exceeds tolerance " << leakage_tolerance_
        << "; increase the band half-width";
    throw NumericalBudgetError(msg.str());
  }
}

void PerronFrobenius::kick(PFField& field, int direction) {
  const auto& in = field.values();
  const int B = field.bands();
  scratch_.setZero();
  for (int c = 0; c < B; ++c) {
    for (int g = 0; g < grid_; ++g) {
      const int src = c - 2 * direction * grid_channel_[static_cast<std::size_t>(g)];
      if (src >= 0 && src < B) scratch_(g, c) = in(g, src);
    }
  }
  field.values().swap(scratch_);
}

void PerronFrobenius::shear(PFField& field, int direction) {
  auto& v = field.values();
  for (int c = 0; c < field.bands(); ++c) {
    auto col = v.col(c);
    if (col.isZero(0.0)) continue;
    fft_.fwd(spectrum_.data(), col.data(), grid_);
    if (direction > 0)
      spectrum_.array() *= shear_phase_.col(c).array();
    else
      spectrum_.array() *= shear_phase_.col(c).array().conjugate();
    fft_.inv(col.data(), spectrum_.data(), grid_);
  }
}

void PerronFrobenius::step(PFField& field) {
  check_shape(field);
  check_leakage(field);
  if (ordering_ == KickOrdering::printed) {
    kick(field, +1);
    shear(field, +1);
  } else {
    shear(field, +1);
    kick(field, +1);
  }
}

void PerronFrobenius::step_inverse(PFField& field) {
  check_shape(field);
  check_leakage(field);
  if (ordering_ == KickOrdering::printed) {
    shear(field, -1);
    kick(field, -1);
  } else {
    kick(field, -1);
    shear(field, -1);
  }
}

PFField pf_step(const ChannelPotential& pot, double beta, const PFField& field, KickOrdering ordering) {
  PerronFrobenius u(pot, beta, field.grid(), field.band_halfwidth(), ordering);
  PFField out = field;
  u.step(out);
  return out;
}

Eigen::MatrixXcd fourier_amplitudes(const PFField& field) {
  const int G = field.grid();
  Eigen::FFT<double> fft;
  Eigen::MatrixXcd f(G, field.bands());
  Eigen::VectorXcd spec(G);
  const double scale = std::sqrt(two_pi) / G;
  for (int c = 0; c < field.bands(); ++c) {
    fft.fwd(spec.data(), field.values().col(c).data(), G);
    for (int i = 0; i < G; ++i) {
      const int k = i < G / 2 ? i : i - G;
      f(k + G / 2, c) = scale * spec(i);
    }
  }
  return f;
}

HarmonicDistribution harmonic_distribution(const PFField& field, double time) {
  const Eigen::MatrixXcd f = fourier_amplitudes(field);
  HarmonicDistribution h;
  h.time = time;
  h.probability = f.cwiseAbs2().rowwise().sum();
  const int G = field.grid();
  h.k.resize(static_cast<std::size_t>(G));
  for (int i = 0; i < G; ++i) h.k[static_cast<std::size_t>(i)] = i - G / 2;
  return h;
}

Eigen::VectorXd band_distribution(const PFField& field) {
  Eigen::VectorXd w = field.values().cwiseAbs2().colwise().sum().transpose();
  const double total = w.sum();
  if (total > 0.0) w /= total;
  return w;
}

}  // namespace gtm
