#pragma once

// Discovery counts over a region pair and their normalized ecdf expressions.
//
// A discovery is a correlation with |r| strictly above the threshold, while
// the ecdf counts values <= rho. With these conventions
// count_total_discoveries(R, rho) == p_a * p_b * nu_e_hat(dist(|R|), rho)
// holds exactly.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "corrscreen/correlation.hpp"

namespace corrscreen {

struct SimulationConfig;

/// Rows i with at least one |R(i, j)| > rho.
std::size_t count_max_discoveries(const Eigen::MatrixXd& correlations, double rho);

/// Entries with |R(i, j)| > rho.
std::size_t count_total_discoveries(const Eigen::MatrixXd& correlations, double rho);

/// 1 - F(rho) for the ecdf F of absolute inter-correlations.
double nu_e_hat(const EmpiricalDistribution& abs_inter, double rho);

/// 1 - F(rho)^p_b.
double nu_hat(const EmpiricalDistribution& abs_inter, Index p_b, double rho);

enum class Statistic {
  MaxCount,    // N_ab
  TotalCount,  // N_e_ab
  NuHat,       // nu_hat
  NuEHat,      // nu_e_hat
};

/// Accepts the tags "N_ab", "N_e_ab", "nu_hat", "nu_e_hat"; UsageError otherwise.
Statistic parse_statistic(std::string_view tag);
std::string_view to_string(Statistic statistic);

struct DiscoveryCurve {
  Statistic statistic = Statistic::NuEHat;
  std::vector<double> grid;
  std::vector<double> values;
};

inline constexpr std::size_t kDefaultGridPoints = 201;

/// `points` uniformly spaced thresholds covering [0, 1].
std::vector<double> uniform_grid(std::size_t points = kDefaultGridPoints);

/// Evaluates `statistic` on a correlation matrix (rows: region a). Counts are
/// raw; pass `normalize` to divide N_ab by p_a and N_e_ab by p_a * p_b.
DiscoveryCurve discovery_curve(const Eigen::MatrixXd& correlations, Statistic statistic,
                               std::span<const double> grid, bool normalize = false);

/// Evaluates a ecdf-based statistic on an absolute distribution. The max-count
/// statistic needs the matrix and is rejected with UsageError.
DiscoveryCurve discovery_curve(const EmpiricalDistribution& abs_inter, Index p_a, Index p_b,
                               Statistic statistic, std::span<const double> grid,
                               bool normalize = false);

struct MonteCarloCurve {
  std::vector<double> grid;
  std::vector<double> mean;       // mean of N_ab / p_a over replicates
  std::vector<double> std_error;  // standard error of that mean (0 for one replicate)
};

/// Monte Carlo estimate of E[N_ab] / p_a for regions `region_a`, `region_b`
/// of `config` (first two regions when empty). Replicate r draws data from
/// the stream derived from (seed, r).
MonteCarloCurve mc_mean_max_discoveries(const SimulationConfig& config, std::span<const double> grid,
                                        int reps, std::uint64_t seed,
                                        const std::string& region_a = {},
                                        const std::string& region_b = {}, unsigned threads = 1);

}  // namespace corrscreen
