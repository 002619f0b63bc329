#pragma once

// Confusion metrics against a ground-truth network, and the two synthetic
// benchmark harnesses (method comparison table and threshold box plots).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corrscreen/dataset.hpp"
#include "corrscreen/discovery.hpp"
#include "corrscreen/inference.hpp"
#include "corrscreen/synthesis.hpp"
#include "corrscreen/thresholds.hpp"

namespace corrscreen {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Compares every pair listed in `truth`; a pair missing from `pred` counts
/// as not detected. Throws UsageError when the region sets differ.
ConfusionCounts confusion(const BinaryNetwork& pred, const GroundTruthNetwork& truth);

/// A rate with a zero denominator is absent, never 0.
struct Rates {
  std::optional<double> tpr;
  std::optional<double> fpr;
};

Rates tpr_fpr(const ConfusionCounts& c);

struct BenchmarkRow {
  std::string method;
  double rho_min = 0.0;
  std::optional<double> fpr_mean;
  std::optional<double> fpr_sd;
  std::optional<double> tpr_mean;
  std::optional<double> tpr_sd;
  int reps = 0;
};

/// The five reproducible rows of the comparison table.
std::vector<Detector> default_table1_methods();

struct Table1Options {
  int reps = 100;
  std::vector<double> rho_min{0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<Detector> methods = default_table1_methods();
  Index regions = 10;
  Index p = 150;
  Index n = 100;
  double inter = 0.2;
  std::vector<std::pair<int, int>> null_pairs = default_null_pairs();
  ToeplitzDecay decay = ToeplitzDecay::Linear;
  double exceedance_level = 0.05;
  int surrogate_reps = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Rows ordered rho_min-major, then by `methods`. Replicate r of every
/// rho_min uses dataset seed derive_key(seed, {r}), so columns share their
/// random draws. Output is independent of `threads`.
std::vector<BenchmarkRow> run_table1(const Table1Options& options);

struct ThresholdSample {
  std::string method;
  double intra = 0.0;
  int replicate = 0;
  double threshold = 0.0;
};

struct Fig5Options {
  int reps = 50;
  std::vector<double> intra{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<ThresholdMethod> methods{ThresholdMethod::poli(), ThresholdMethod::quantile(0.0),
                                       ThresholdMethod::fwer(0.0), ThresholdMethod::hero()};
  Index p = 150;
  Index n = 100;
  int surrogate_reps = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Two regions of constant intra-correlation and zero inter-correlation per
/// replicate; every method's threshold is computed from the same draw.
/// Samples are ordered intra-major, then replicate, then method.
std::vector<ThresholdSample> run_fig5(const Fig5Options& options);

/// Compensated (Kahan) mean; NaN-free inputs assumed.
double kahan_mean(const std::vector<double>& values);

/// Sample standard deviation (denominator n - 1); 0 for a single value.
double sample_sd(const std::vector<double>& values);

struct ReplicateCurve {
  int replicate = 0;
  DiscoveryCurve curve;
};

std::string table1_to_csv(const std::vector<BenchmarkRow>& rows);
std::string table1_to_json(const std::vector<BenchmarkRow>& rows);
std::string fig5_to_csv(const std::vector<ThresholdSample>& samples);
std::string fig5_to_json(const std::vector<ThresholdSample>& samples);
std::string curves_to_csv(const std::vector<ReplicateCurve>& curves);
std::string curves_to_json(const std::vector<ReplicateCurve>& curves);

}  // namespace corrscreen
