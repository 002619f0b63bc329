#pragma once

// Pearson kernels, U-scores and empirical distributions of correlations.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "corrscreen/dataset.hpp"

namespace corrscreen {

/// Values stored either as signed correlations in [-1, 1] or absolute values
/// in [0, 1]. Operations combining two distributions require matching tags.
enum class Signedness { Signed, Absolute };

/// Sorted sample with its ecdf and left-continuous quantile function.
class EmpiricalDistribution {
 public:
  /// Sorts `values`. Throws UsageError when empty, or when an Absolute
  /// distribution receives a negative value.
  EmpiricalDistribution(std::vector<double> values, Signedness signedness);

  std::span<const double> values() const { return values_; }
  std::size_t count() const { return values_.size(); }
  Signedness signedness() const { return signedness_; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  /// Fraction of stored values <= rho.
  double ecdf(double rho) const;

  /// Number of stored values strictly greater than rho.
  std::size_t count_above(double rho) const;

  /// Smallest stored x with ecdf(x) >= c; c = 0 gives the minimum.
  double quantile(double c) const;

  double mean() const;
  /// Sample standard deviation (denominator count - 1); 0 for a single value.
  double stddev() const;

 private:
  std::vector<double> values_;
  Signedness signedness_;
};

/// Pooled distribution of several samples with identical signedness.
EmpiricalDistribution pool(std::span<const EmpiricalDistribution> parts);

/// Sample Pearson correlation. Throws DegenerateSeriesError on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Rows centered and scaled to unit Euclidean norm, so that inner products of
/// rows are Pearson correlations. `region_id` and `voxel_ids` label errors.
Eigen::MatrixXd standardize_rows(const Eigen::MatrixXd& m, std::string_view region_id = {},
                                 std::span<const std::string> voxel_ids = {});
Eigen::MatrixXd standardize_rows(const RegionTimeSeries& region);

/// U-scores: each standardized row expressed in the Helmert orthonormal basis
/// of the complement of the all-ones vector. Rows are unit vectors in R^(n-1)
/// and U * U^T is the Pearson correlation matrix of the input rows.
struct UScoreMatrix {
  Eigen::MatrixXd rows;
};

UScoreMatrix u_scores(const Eigen::MatrixXd& m);

/// p_a x p_b matrix of Pearson correlations between rows of a and rows of b.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& standardized_a,
                                   const Eigen::MatrixXd& standardized_b);
Eigen::MatrixXd inter_correlation_matrix(const RegionTimeSeries& a, const RegionTimeSeries& b);

EmpiricalDistribution distribution_of(const Eigen::MatrixXd& correlations, Signedness signedness);

/// All p_a * p_b inter-correlations of a region pair.
EmpiricalDistribution inter_correlations(const RegionTimeSeries& a, const RegionTimeSeries& b,
                                         Signedness signedness = Signedness::Absolute);

/// The p(p-1)/2 distinct intra-correlations of a region. Requires p >= 2.
EmpiricalDistribution intra_correlations(const RegionTimeSeries& a,
                                         Signedness signedness = Signedness::Signed);
EmpiricalDistribution intra_correlations(const Eigen::MatrixXd& standardized,
                                         Signedness signedness);

/// Number of midpoints on (0,1) used by wasserstein2 and the bound report.
inline constexpr int kQuantileGridPoints = 512;

/// Squared 2-Wasserstein distance: midpoint rule over kQuantileGridPoints of
/// the squared difference of the two quantile functions.
double wasserstein2(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Asymptotic variance of the maximum-likelihood inter-correlation estimator
/// for two homoscedastic groups with common intra-correlations.
double elston_variance(double rho_ab, double rho_aa, double rho_bb, Index p_a, Index p_b, Index n);

/// Empirical check of the bound mean(R^ab) <= 1 - sqrt(A)/2, where A is the
/// minimum squared gap between the intra-correlation quantile functions.
struct WassersteinBoundReport {
  double min_quantile_gap = 0.0;  // A
  double wasserstein2 = 0.0;
  double mean_inter = 0.0;
  double bound = 1.0;
  bool assumption_holds = false;
  bool bound_holds = true;
};

WassersteinBoundReport wasserstein_bound_report(const RegionTimeSeries& a, const RegionTimeSeries& b);

/// P(|R| <= rho) for the sample correlation of two independent Gaussian
/// series of length n (density proportional to (1 - r^2)^((n-4)/2)).
double null_abs_correlation_cdf(double rho, Index n);

/// 1 - null_abs_correlation_cdf, computed without cancellation.
double null_abs_correlation_sf(double rho, Index n);

}  // namespace corrscreen
