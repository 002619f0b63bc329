#pragma once

// Per-pair critical correlation thresholds.
//
// Quantile and FWER thresholds, and the mean-plus-sd baseline, are read off a
// surrogate null distribution of absolute inter-correlations. The phase
// transition baseline depends only on (n, p_a, p_b).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "corrscreen/correlation.hpp"
#include "corrscreen/dataset.hpp"

namespace corrscreen {

enum class ThresholdKind { Fwer, Quantile, Poli, Hero };

struct ThresholdMethod {
  ThresholdKind kind = ThresholdKind::Quantile;
  double alpha = 0.0;  // used by Fwer and Quantile only

  static ThresholdMethod fwer(double alpha) { return {ThresholdKind::Fwer, alpha}; }
  static ThresholdMethod quantile(double alpha) { return {ThresholdKind::Quantile, alpha}; }
  static ThresholdMethod poli() { return {ThresholdKind::Poli, 0.0}; }
  static ThresholdMethod hero() { return {ThresholdKind::Hero, 0.0}; }

  bool uses_alpha() const { return kind == ThresholdKind::Fwer || kind == ThresholdKind::Quantile; }
  bool uses_surrogate() const { return kind != ThresholdKind::Hero; }

  /// "quantile(0)", "fwer(0.05)", "poli", "hero".
  std::string label() const;

  bool operator==(const ThresholdMethod&) const = default;
};

/// `name` is one of quantile|fwer|poli|hero. alpha is required for
/// quantile/fwer, must lie in [0, 1), and is rejected for the others.
ThresholdMethod make_threshold_method(std::string_view name, std::optional<double> alpha);

/// Inverse of ThresholdMethod::label, also accepting "quantile:0" style.
ThresholdMethod parse_threshold_method(std::string_view text);

/// Left-continuous quantile of the null at 1 - alpha. alpha = 0 gives the
/// null maximum, so no null value strictly exceeds it.
double threshold_quantile(const EmpiricalDistribution& null, double alpha);

/// Smallest null value rho with p_a * p_b * (1 - F0(rho)) <= -ln(1 - alpha),
/// the Poisson approximation of P(at least one false discovery) <= alpha.
double threshold_fwer(const EmpiricalDistribution& null, double alpha, Index p_a, Index p_b);

/// Null mean plus sample standard deviation.
double threshold_poli(const EmpiricalDistribution& null);

/// The rho at which the expected number of null discoveries among p_a * p_b
/// independent Gaussian pairs equals one: p_a p_b P0(|R| > rho) = 1.
double threshold_hero(Index n, Index p_a, Index p_b);

/// Dispatches on `method`. `null` may be omitted for the Hero rule.
double threshold_from_null(const ThresholdMethod& method, const EmpiricalDistribution* null, Index n,
                           Index p_a, Index p_b);

/// Surrogate null for a region pair: constant intra-correlation equal to each
/// region's average intra-correlation, zero inter-correlation, same (p_a,
/// p_b, n). The stream is keyed by the sorted region ids, so the result does
/// not depend on argument order.
EmpiricalDistribution pair_surrogate(const RegionTimeSeries& a, const RegionTimeSeries& b,
                                     int surrogate_reps, std::uint64_t seed);

/// Same as above with precomputed average intra-correlations.
EmpiricalDistribution pair_surrogate(const RegionTimeSeries& a, double intra_a,
                                     const RegionTimeSeries& b, double intra_b, int surrogate_reps,
                                     std::uint64_t seed);

double thresholds_for_pair(const RegionTimeSeries& a, const RegionTimeSeries& b,
                           const ThresholdMethod& method, int surrogate_reps, std::uint64_t seed);

}  // namespace corrscreen
