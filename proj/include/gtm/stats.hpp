#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gtm {

/// Neumaier-compensated accumulator.
template <typename Scalar = double>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;  // Pearson correlation; 0 when either variable is constant
};

/// Ordinary least-squares line y ≈ slope·x + intercept.
template <typename DerivedX, typename DerivedY>
LineFit fit_line(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  const Eigen::Index n = x.size();
  if (n != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
  const double mx = x.mean();
  const double my = y.mean();
  const auto dx = (x.array() - mx).matrix().eval();
  const auto dy = (y.array() - my).matrix().eval();
  const double sxx = dx.squaredNorm();
  const double syy = dy.squaredNorm();
  const double sxy = dx.dot(dy);
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
  return f;
}

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_line(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                  Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
}

/// Least-squares polynomial coefficients (lowest order first).
template <typename DerivedX, typename DerivedY>
Eigen::VectorXd fit_polynomial(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                               int degree) {
  const Eigen::Index n = x.size();
  if (n <= degree) throw std::invalid_argument("fit_polynomial: too few points");
  // Center and scale the abscissa for conditioning, then map back.
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  const double c = 0.5 * (lo + hi);
  const double s = hi > lo ? 0.5 * (hi - lo) : 1.0;
  Eigen::MatrixXd V(n, degree + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (x(i) - c) / s;
    double pw = 1.0;
    for (int d = 0; d <= degree; ++d) {
      V(i, d) = pw;
      pw *= u;
    }
  }
  const Eigen::VectorXd a = V.colPivHouseholderQr().solve(y.derived().template cast<double>());
  // Expand Σ a_d ((x-c)/s)^d into powers of x.
  Eigen::VectorXd out = Eigen::VectorXd::Zero(degree + 1);
  for (int d = 0; d <= degree; ++d) {
    double binom = 1.0;
    for (int m = 0; m <= d; ++m) {
      if (m > 0) binom = binom * (d - m + 1) / m;
      out(m) += a(d) * binom * std::pow(-c, d - m) / std::pow(s, d);
    }
  }
  return out;
}

/// (Σw)² / Σw²: effective number of occupied sites.
template <typename Derived>
double participation_number(const Eigen::DenseBase<Derived>& w) {
  const double s = w.sum();
  const double s2 = w.derived().array().abs2().sum();
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

/// Kolmogorov-Smirnov distance between the sample and U[0, 1).
inline double ks_distance_uniform(std::vector<double> u) {
  if (u.empty()) return 1.0;
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, std::max((i + 1) / n - u[i], u[i] - i / n));
  }
  return d;
}

/// Normalized autocorrelation of a sequence at the given lag.
inline double autocorrelation(const std::vector<double>& x, std::size_t lag) {
  if (lag >= x.size()) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  if (var == 0.0) return 1.0;  // constant sequence: fully predictable
  double c = 0.0;
  for (std::size_t i = 0; i + lag < x.size(); ++i) c += (x[i] - mean) * (x[i + lag] - mean);
  return c / var;
}

}  // namespace gtm
