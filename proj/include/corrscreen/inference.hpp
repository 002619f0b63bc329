#pragma once

// Network construction from a Dataset.
//
// Correlation screening (CS): for every region pair, build the surrogate
// null, derive the pair threshold, and declare an edge when the fraction of
// absolute inter-correlations strictly above it exceeds the exceedance level.
//
// Correlation of averages (CA): threshold the single correlation between the
// regional mean signals with the same per-pair threshold machinery.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "corrscreen/dataset.hpp"
#include "corrscreen/thresholds.hpp"

namespace corrscreen {

enum class Pipeline { CorrelationScreening, CorrelationOfAverages };

Pipeline parse_pipeline(std::string_view name);  // "cs" | "ca"
std::string_view to_string(Pipeline pipeline);

/// A pipeline paired with a threshold rule, e.g. CS+quantile(0).
struct Detector {
  Pipeline pipeline = Pipeline::CorrelationScreening;
  ThresholdMethod method;

  std::string label() const;
  bool operator==(const Detector&) const = default;
};

/// Parses "cs:quantile:0", "cs:poli", "ca:poli", or the label form "CS+quantile(0)".
Detector parse_detector(std::string_view text);

struct InferenceOptions {
  double exceedance_level = 0.05;
  int surrogate_reps = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Called with each pair's p_a x p_b correlation matrix (CS only). May be
  /// invoked concurrently for different pairs.
  std::function<void(const RegionPair&, const Eigen::MatrixXd&)> on_correlations;
};

struct InferenceConfig {
  ThresholdMethod method = ThresholdMethod::quantile(0.0);
  Pipeline pipeline = Pipeline::CorrelationScreening;
  double exceedance_level = 0.05;
  int surrogate_reps = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct EdgeDecision {
  double exceedance = 0.0;
  bool detected = false;
};

/// exceedance = fraction of |R| strictly above `threshold`; detected when it
/// is strictly greater than `level`.
EdgeDecision decide_edge_cs(const EmpiricalDistribution& abs_inter, double threshold, double level);

/// Column-wise mean over voxels.
Eigen::VectorXd regional_average(const RegionTimeSeries& region);

BinaryNetwork infer_network(const Dataset& ds, const InferenceConfig& config);

/// One network per detector, sharing the correlation and surrogate work of
/// each pair. Surrogate streams are keyed by (seed, sorted pair ids).
std::vector<BinaryNetwork> infer_networks(const Dataset& ds, std::span<const Detector> detectors,
                                          const InferenceOptions& options);

struct PairThreshold {
  RegionPair pair;
  double threshold = 0.0;
};

/// Thresholds of every region pair under `method`, without edge decisions.
std::vector<PairThreshold> pair_thresholds(const Dataset& ds, const ThresholdMethod& method,
                                           int surrogate_reps, std::uint64_t seed, unsigned threads = 1);

}  // namespace corrscreen
