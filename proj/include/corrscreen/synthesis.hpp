#pragma once

// Block-Toeplitz Gaussian datasets with ground truth, and zero
// inter-correlation surrogate data.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "corrscreen/correlation.hpp"
#include "corrscreen/dataset.hpp"
#include "corrscreen/rng.hpp"

namespace corrscreen {

/// How intra-correlation decays with voxel distance |i - j| inside a region.
///   Linear:    1 - (1 - rho_min) |i - j| / (p - 1)
///   Geometric: rho_min^(|i - j| / (p - 1))
/// Both reach rho_min at the largest lag.
enum class ToeplitzDecay { Linear, Geometric };

ToeplitzDecay parse_decay(std::string_view name);
std::string_view to_string(ToeplitzDecay decay);

struct ToeplitzSpec {
  Index p = 1;
  double rho_min = 0.0;
  ToeplitzDecay decay = ToeplitzDecay::Linear;
};

Eigen::MatrixXd toeplitz_covariance(const ToeplitzSpec& spec);

/// Unit diagonal, every off-diagonal entry equal to rho.
Eigen::MatrixXd constant_covariance(Index p, double rho);

struct RegionSpec {
  std::string id;
  Index p = 1;
  double rho_min = 0.0;
};

struct SimulationConfig {
  std::vector<RegionSpec> regions;
  std::map<RegionPair, double> inter;
  Index n = 100;
  std::uint64_t seed = 0;
  ToeplitzDecay decay = ToeplitzDecay::Linear;
};

/// JSON form: {"schema":"corrscreen-sim/1","n":..,"seed":..,"decay":"linear",
/// "regions":[{"id","p","rho_min"}],"inter":[{"a","b","rho"}]}. "decay" is optional.
SimulationConfig simulation_config_from_json(std::string_view text);
std::string simulation_config_to_json(const SimulationConfig& config);

/// Pairs whose population inter-correlation is zero in the ten-region benchmark:
/// (R01,R02), (R03,R04), (R05,R06), (R07,R08), keeping those that fit in
/// `regions`.
std::vector<std::pair<int, int>> default_null_pairs(Index regions = 10);

/// `regions` regions "R01".. with p voxels each and a shared rho_min. Every
/// pair carries inter-correlation `inter` except `null_pairs` (1-based).
SimulationConfig benchmark_config(double rho_min, std::uint64_t seed, Index regions = 10,
                                  Index p = 150, Index n = 100, double inter = 0.2,
                                  std::vector<std::pair<int, int>> null_pairs = default_null_pairs(),
                                  ToeplitzDecay decay = ToeplitzDecay::Linear);

/// Toeplitz diagonal blocks and constant off-diagonal blocks.
Eigen::MatrixXd assemble_block_covariance(const SimulationConfig& config);

struct PsdReport {
  double min_eigenvalue = 0.0;
  bool ok = false;
};

/// Tolerance below zero accepted for the smallest eigenvalue.
inline constexpr double kPsdTolerance = 1e-8;

PsdReport check_psd(const Eigen::MatrixXd& m);

/// Draws columns from N(0, cov). Uses a Cholesky factor when cov is positive
/// definite, otherwise an eigendecomposition with round-off negative
/// eigenvalues clamped to zero. Throws CovarianceError when not PSD.
class MvnSampler {
 public:
  explicit MvnSampler(const Eigen::MatrixXd& cov);

  Index dim() const { return factor_.rows(); }

  /// dim x n matrix; standard normals are drawn column by column.
  Eigen::MatrixXd sample(Index n, RandomStream& rng) const;

 private:
  Eigen::MatrixXd factor_;
  bool triangular_ = true;
};

Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& cov, Index n, std::uint64_t seed);

/// p x n draw from N(0, constant_covariance(p, rho)) via the exact
/// rank-one-plus-diagonal factor sqrt(rho) f + sqrt(1 - rho) e_i.
Eigen::MatrixXd sample_constant_intra(Index p, double rho, Index n, RandomStream& rng);

struct GeneratedData {
  Dataset dataset;
  GroundTruthNetwork truth;
};

/// Holds the factorized covariance of a configuration so repeated draws only
/// pay for the matrix product.
class DatasetGenerator {
 public:
  explicit DatasetGenerator(SimulationConfig config);

  const SimulationConfig& config() const { return config_; }
  const GroundTruthNetwork& truth() const { return truth_; }

  /// One joint draw from the stream keyed by `seed`.
  GeneratedData draw(std::uint64_t seed) const;

 private:
  SimulationConfig config_;
  GroundTruthNetwork truth_;
  MvnSampler sampler_;
};

GeneratedData generate_dataset(const SimulationConfig& config);

struct SurrogateSpec {
  Index p_a = 1;
  Index p_b = 1;
  Index n = 5;
  double intra_a = 0.0;
  double intra_b = 0.0;
  int reps = 1;
  std::uint64_t seed = 0;
};

/// Pooled absolute inter-correlations of `reps` two-region datasets with
/// constant intra-correlation and zero inter-correlation. Replicate r uses
/// the stream derived from (seed, r).
EmpiricalDistribution generate_surrogate(const SurrogateSpec& spec);

struct IntraSummary {
  double value = 0.0;     // clamped to [0, 1]
  double raw_mean = 0.0;  // signed mean before clamping
  bool clamped = false;
};

/// Mean signed intra-correlation, clamped to [0, 1]. Requires p >= 2.
IntraSummary average_intra(const RegionTimeSeries& region);
IntraSummary average_intra(const Eigen::MatrixXd& standardized);

}  // namespace corrscreen
