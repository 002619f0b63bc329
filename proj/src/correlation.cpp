#include "corrscreen/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "corrscreen/errors.hpp"

namespace corrscreen {

namespace {

constexpr double kClampTolerance = 1e-12;

double clamp_correlation(double r) {
  if (std::abs(r) <= 1.0) return r;
  if (std::abs(r) <= 1.0 + kClampTolerance) return std::copysign(1.0, r);
  throw Error("correlation " + std::to_string(r) + " outside [-1, 1] beyond rounding tolerance");
}

// Zero variance up to rounding of the centering step.
bool degenerate(double centered_ss, double max_abs, Index n) {
  const double scale = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_abs;
  return !(centered_ss > scale * scale);
}

std::size_t grid_index(double c, std::size_t count) {
  double m = c * static_cast<double>(count);
  const double nearest = std::round(m);
  if (std::abs(m - nearest) <= 1e-9 * std::max(1.0, m)) m = nearest;
  const double k = std::ceil(m) - 1.0;
  if (k <= 0.0) return 0;
  return std::min(count - 1, static_cast<std::size_t>(k));
}

double grid_point(int k) { return (k + 0.5) / kQuantileGridPoints; }

}  // namespace

// ---------------------------------------------------------------------------
// EmpiricalDistribution

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values, Signedness signedness)
    : values_(std::move(values)), signedness_(signedness) {
  if (values_.empty()) throw UsageError("empirical distribution needs at least one value");
  std::sort(values_.begin(), values_.end());
  if (std::isnan(values_.back()) || std::isnan(values_.front())) {
    throw UsageError("empirical distribution contains NaN");
  }
  if (signedness_ == Signedness::Absolute && values_.front() < 0.0) {
    throw UsageError("absolute distribution contains a negative value");
  }
}

double EmpiricalDistribution::ecdf(double rho) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), rho);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

std::size_t EmpiricalDistribution::count_above(double rho) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), rho);
  return static_cast<std::size_t>(values_.end() - it);
}

double EmpiricalDistribution::quantile(double c) const {
  if (!(c >= 0.0 && c <= 1.0)) throw UsageError("quantile level must lie in [0, 1]");
  return values_[grid_index(c, values_.size())];
}

double EmpiricalDistribution::mean() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

double EmpiricalDistribution::stddev() const {
  if (values_.size() < 2) return 0.0;
  const double m = mean();
  double ss = 0.0;
  for (double v : values_) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values_.size() - 1));
}

EmpiricalDistribution pool(std::span<const EmpiricalDistribution> parts) {
  if (parts.empty()) throw UsageError("cannot pool zero distributions");
  std::vector<double> all;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.count();
  all.reserve(total);
  for (const auto& p : parts) {
    if (p.signedness() != parts.front().signedness()) {
      throw UsageError("cannot pool signed and absolute distributions");
    }
    all.insert(all.end(), p.values().begin(), p.values().end());
  }
  return EmpiricalDistribution(std::move(all), parts.front().signedness());
}

// ---------------------------------------------------------------------------
// Pearson kernels

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("pearson: series lengths differ");
  if (x.size() < 2) throw UsageError("pearson: need at least two samples");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0, max_x = 0.0, max_y = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
    max_x = std::max(max_x, std::abs(x[k]));
    max_y = std::max(max_y, std::abs(y[k]));
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const auto len = static_cast<Index>(x.size());
  if (degenerate(sxx, max_x, len) || degenerate(syy, max_y, len)) {
    throw DegenerateSeriesError("pearson: series has zero variance");
  }
  return clamp_correlation(sxy / std::sqrt(sxx * syy));
}

double pearson(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  return pearson(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                 std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

Eigen::MatrixXd standardize_rows(const Eigen::MatrixXd& m, std::string_view region_id,
                                 std::span<const std::string> voxel_ids) {
  Eigen::MatrixXd z = m.colwise() - m.rowwise().mean();
  for (Index i = 0; i < z.rows(); ++i) {
    const double ss = z.row(i).squaredNorm();
    if (degenerate(ss, m.row(i).cwiseAbs().maxCoeff(), m.cols())) {
      std::string label = static_cast<std::size_t>(i) < voxel_ids.size()
                              ? voxel_ids[static_cast<std::size_t>(i)]
                              : "#" + std::to_string(i + 1);
      throw DegenerateSeriesError("region '" + std::string(region_id) + "' voxel '" + label +
                                  "' has zero variance");
    }
    z.row(i) /= std::sqrt(ss);
  }
  return z;
}

Eigen::MatrixXd standardize_rows(const RegionTimeSeries& region) {
  return standardize_rows(region.values, region.region_id, region.voxel_ids);
}

UScoreMatrix u_scores(const Eigen::MatrixXd& m) {
  if (m.cols() < 3) throw UsageError("u_scores: need at least three samples");
  const Eigen::MatrixXd z = standardize_rows(m);
  const Index n = m.cols();
  UScoreMatrix u{Eigen::MatrixXd(m.rows(), n - 1)};
  // Helmert column k (1-based): 1/sqrt(k(k+1)) on the first k entries and
  // -k/sqrt(k(k+1)) on entry k+1.
  for (Index i = 0; i < z.rows(); ++i) {
    double prefix = 0.0;
    for (Index k = 1; k < n; ++k) {
      prefix += z(i, k - 1);
      const double kk = static_cast<double>(k);
      u.rows(i, k - 1) = (prefix - kk * z(i, k)) / std::sqrt(kk * (kk + 1.0));
    }
  }
  return u;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& standardized_a,
                                   const Eigen::MatrixXd& standardized_b) {
  if (standardized_a.cols() != standardized_b.cols()) {
    throw UsageError("correlation_matrix: sample counts differ");
  }
  Eigen::MatrixXd r = standardized_a * standardized_b.transpose();
  for (Index j = 0; j < r.cols(); ++j) {
    for (Index i = 0; i < r.rows(); ++i) r(i, j) = clamp_correlation(r(i, j));
  }
  return r;
}

Eigen::MatrixXd inter_correlation_matrix(const RegionTimeSeries& a, const RegionTimeSeries& b) {
  if (a.samples() != b.samples()) {
    throw UsageError("regions '" + a.region_id + "' and '" + b.region_id +
                     "' have different sample counts");
  }
  return correlation_matrix(standardize_rows(a), standardize_rows(b));
}

EmpiricalDistribution distribution_of(const Eigen::MatrixXd& correlations, Signedness signedness) {
  std::vector<double> values(correlations.data(), correlations.data() + correlations.size());
  if (signedness == Signedness::Absolute) {
    for (double& v : values) v = std::abs(v);
  }
  return EmpiricalDistribution(std::move(values), signedness);
}

EmpiricalDistribution inter_correlations(const RegionTimeSeries& a, const RegionTimeSeries& b,
                                         Signedness signedness) {
  return distribution_of(inter_correlation_matrix(a, b), signedness);
}

EmpiricalDistribution intra_correlations(const Eigen::MatrixXd& standardized, Signedness signedness) {
  const Index p = standardized.rows();
  if (p < 2) throw UsageError("intra-correlations need at least two voxels");
  const Eigen::MatrixXd r = correlation_matrix(standardized, standardized);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(p * (p - 1) / 2));
  for (Index j = 1; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      values.push_back(signedness == Signedness::Absolute ? std::abs(r(i, j)) : r(i, j));
    }
  }
  return EmpiricalDistribution(std::move(values), signedness);
}

EmpiricalDistribution intra_correlations(const RegionTimeSeries& a, Signedness signedness) {
  if (a.voxels() < 2) {
    throw UsageError("region '" + a.region_id + "' needs at least two voxels for intra-correlations");
  }
  return intra_correlations(standardize_rows(a), signedness);
}

// ---------------------------------------------------------------------------
// Distances and bounds

double wasserstein2(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.signedness() != b.signedness()) {
    throw UsageError("wasserstein2: cannot compare signed and absolute distributions");
  }
  double sum = 0.0;
  for (int k = 0; k < kQuantileGridPoints; ++k) {
    const double c = grid_point(k);
    const double d = a.quantile(c) - b.quantile(c);
    sum += d * d;
  }
  return sum / kQuantileGridPoints;
}

double elston_variance(double rho_ab, double rho_aa, double rho_bb, Index p_a, Index p_b, Index n) {
  if (n < 1 || p_a < 1 || p_b < 1) throw UsageError("elston_variance: n, p_a, p_b must be >= 1");
  const double pa = static_cast<double>(p_a);
  const double pb = static_cast<double>(p_b);
  const double nn = static_cast<double>(n);
  const double r2 = rho_ab * rho_ab;
  const double term_a = r2 - (1.0 + (pa - 1.0) * rho_aa) / pa;
  const double term_b = r2 - (1.0 + (pb - 1.0) * rho_bb) / pb;
  const double spread = (pa - 1.0) / pa * (1.0 - rho_aa) * (1.0 - rho_aa) +
                        (pb - 1.0) / pb * (1.0 - rho_bb) * (1.0 - rho_bb);
  return term_a * term_b / nn + r2 / (2.0 * nn) * spread;
}

WassersteinBoundReport wasserstein_bound_report(const RegionTimeSeries& a, const RegionTimeSeries& b) {
  if (a.voxels() < 2 || b.voxels() < 2) {
    throw UsageError("wasserstein_bound_report: both regions need at least two voxels");
  }
  const Eigen::MatrixXd za = standardize_rows(a);
  const Eigen::MatrixXd zb = standardize_rows(b);
  const auto intra_a = intra_correlations(za, Signedness::Signed);
  const auto intra_b = intra_correlations(zb, Signedness::Signed);

  WassersteinBoundReport report;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kQuantileGridPoints; ++k) {
    const double c = grid_point(k);
    const double d = intra_a.quantile(c) - intra_b.quantile(c);
    min_gap = std::min(min_gap, d * d);
  }
  report.min_quantile_gap = min_gap;
  report.wasserstein2 = wasserstein2(intra_a, intra_b);
  report.mean_inter = correlation_matrix(za, zb).mean();
  report.bound = 1.0 - std::sqrt(min_gap) / 2.0;
  report.assumption_holds = report.wasserstein2 >= min_gap && min_gap > 0.0;
  report.bound_holds = report.mean_inter <= report.bound;
  return report;
}

// r^2 ~ Beta(1/2, (n-2)/2) under independence.
double null_abs_correlation_cdf(double rho, Index n) {
  if (n < 3) throw UsageError("null correlation distribution needs n >= 3");
  if (rho <= 0.0) return 0.0;
  if (rho >= 1.0) return 1.0;
  return boost::math::ibeta(0.5, 0.5 * static_cast<double>(n - 2), rho * rho);
}

double null_abs_correlation_sf(double rho, Index n) {
  if (n < 3) throw UsageError("null correlation distribution needs n >= 3");
  if (rho <= 0.0) return 1.0;
  if (rho >= 1.0) return 0.0;
  return boost::math::ibetac(0.5, 0.5 * static_cast<double>(n - 2), rho * rho);
}

}  // namespace corrscreen
