#pragma once

// Test-only oracles, written independently of the library code paths.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "corrscreen/dataset.hpp"

namespace corrscreen::testing {

/// Density of the sample Pearson correlation of n independent Gaussian pairs:
/// (1 - r^2)^((n-4)/2) / B(1/2, (n-2)/2).
inline double null_density(double r, long n) {
  const double a = 0.5;
  const double b = 0.5 * static_cast<double>(n - 2);
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::exp(0.5 * static_cast<double>(n - 4) * std::log1p(-r * r) - log_beta);
}

/// P(|R| <= rho) by composite Simpson quadrature of 2 * density on [0, rho].
inline double null_abs_cdf_quadrature(double rho, long n, int intervals = 200000) {
  if (rho <= 0.0) return 0.0;
  if (rho >= 1.0) return 1.0;
  const double h = rho / intervals;
  double sum = null_density(0.0, n) + null_density(rho, n);
  for (int k = 1; k < intervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * null_density(k * h, n);
  return 2.0 * sum * h / 3.0;
}

/// Pearson correlation straight from the definition, as a sum over centered
/// products. No shared code with the library kernel.
inline double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(gen);
  }
  return m;
}

inline RegionTimeSeries make_region(std::string id, Eigen::MatrixXd values) {
  RegionTimeSeries r;
  r.region_id = std::move(id);
  for (Eigen::Index i = 0; i < values.rows(); ++i) r.voxel_ids.push_back("v" + std::to_string(i + 1));
  r.values = std::move(values);
  return r;
}

inline std::vector<double> row_vector(const Eigen::MatrixXd& m, Eigen::Index i) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

}  // namespace corrscreen::testing
