#include "corrscreen/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corrscreen/errors.hpp"
#include "corrscreen/parallel.hpp"
#include "corrscreen/synthesis.hpp"

namespace corrscreen {

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw UsageError("threshold must lie in [0, 1]");
}

void check_grid(std::span<const double> grid) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    check_rho(grid[k]);
    if (k > 0 && !(grid[k] > grid[k - 1])) throw UsageError("threshold grid must be strictly ascending");
  }
}

std::vector<double> sorted_row_maxima(const Eigen::MatrixXd& r) {
  std::vector<double> maxima(static_cast<std::size_t>(r.rows()));
  for (Index i = 0; i < r.rows(); ++i) maxima[static_cast<std::size_t>(i)] = r.row(i).cwiseAbs().maxCoeff();
  std::sort(maxima.begin(), maxima.end());
  return maxima;
}

std::size_t count_above_sorted(const std::vector<double>& sorted, double rho) {
  return static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), rho));
}

}  // namespace

std::size_t count_max_discoveries(const Eigen::MatrixXd& correlations, double rho) {
  check_rho(rho);
  std::size_t count = 0;
  for (Index i = 0; i < correlations.rows(); ++i) {
    if ((correlations.row(i).array().abs() > rho).any()) ++count;
  }
  return count;
}

std::size_t count_total_discoveries(const Eigen::MatrixXd& correlations, double rho) {
  check_rho(rho);
  return static_cast<std::size_t>((correlations.array().abs() > rho).count());
}

double nu_e_hat(const EmpiricalDistribution& abs_inter, double rho) {
  check_rho(rho);
  if (abs_inter.signedness() != Signedness::Absolute) {
    throw UsageError("nu_e_hat expects a distribution of absolute correlations");
  }
  return static_cast<double>(abs_inter.count_above(rho)) / static_cast<double>(abs_inter.count());
}

double nu_hat(const EmpiricalDistribution& abs_inter, Index p_b, double rho) {
  check_rho(rho);
  if (p_b < 1) throw UsageError("nu_hat needs p_b >= 1");
  if (abs_inter.signedness() != Signedness::Absolute) {
    throw UsageError("nu_hat expects a distribution of absolute correlations");
  }
  // For p_b = 1 both rates are the same quantity; share the rounding so nu_e_hat <= nu_hat holds exactly.
  if (p_b == 1) return nu_e_hat(abs_inter, rho);
  return 1.0 - std::pow(abs_inter.ecdf(rho), static_cast<double>(p_b));
}

Statistic parse_statistic(std::string_view tag) {
  if (tag == "N_ab") return Statistic::MaxCount;
  if (tag == "N_e_ab") return Statistic::TotalCount;
  if (tag == "nu_hat") return Statistic::NuHat;
  if (tag == "nu_e_hat") return Statistic::NuEHat;
  throw UsageError("unknown statistic '" + std::string(tag) + "' (N_ab|N_e_ab|nu_hat|nu_e_hat)");
}

std::string_view to_string(Statistic statistic) {
  switch (statistic) {
    case Statistic::MaxCount: return "N_ab";
    case Statistic::TotalCount: return "N_e_ab";
    case Statistic::NuHat: return "nu_hat";
    case Statistic::NuEHat: return "nu_e_hat";
  }
  return "?";
}

std::vector<double> uniform_grid(std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {0.0};
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return grid;
}

DiscoveryCurve discovery_curve(const Eigen::MatrixXd& correlations, Statistic statistic,
                               std::span<const double> grid, bool normalize) {
  check_grid(grid);
  if (statistic != Statistic::MaxCount) {
    if (correlations.size() == 0) throw UsageError("discovery curve of an empty matrix");
    return discovery_curve(distribution_of(correlations, Signedness::Absolute), correlations.rows(),
                           correlations.cols(), statistic, grid, normalize);
  }
  DiscoveryCurve curve{statistic, {grid.begin(), grid.end()}, {}};
  const auto maxima = sorted_row_maxima(correlations);
  const double scale = normalize && correlations.rows() > 0 ? 1.0 / static_cast<double>(correlations.rows()) : 1.0;
  for (double rho : grid) curve.values.push_back(static_cast<double>(count_above_sorted(maxima, rho)) * scale);
  return curve;
}

DiscoveryCurve discovery_curve(const EmpiricalDistribution& abs_inter, [[maybe_unused]] Index p_a, Index p_b,
                               Statistic statistic, std::span<const double> grid, bool normalize) {
  check_grid(grid);
  DiscoveryCurve curve{statistic, {grid.begin(), grid.end()}, {}};
  curve.values.reserve(grid.size());
  for (double rho : grid) {
    switch (statistic) {
      case Statistic::MaxCount:
        throw UsageError("N_ab needs the correlation matrix, not its distribution");
      case Statistic::TotalCount: {
        const auto count = static_cast<double>(abs_inter.count_above(rho));
        curve.values.push_back(normalize ? count / static_cast<double>(abs_inter.count()) : count);
        break;
      }
      case Statistic::NuHat:
        curve.values.push_back(nu_hat(abs_inter, p_b, rho));
        break;
      case Statistic::NuEHat:
        curve.values.push_back(nu_e_hat(abs_inter, rho));
        break;
    }
  }
  return curve;
}

MonteCarloCurve mc_mean_max_discoveries(const SimulationConfig& config, std::span<const double> grid,
                                        int reps, std::uint64_t seed, const std::string& region_a,
                                        const std::string& region_b, unsigned threads) {
  if (reps < 1) throw UsageError("Monte Carlo estimate needs reps >= 1");
  check_grid(grid);
  if (config.regions.size() < 2) throw UsageError("Monte Carlo estimate needs two regions");
  const std::string a_id = region_a.empty() ? config.regions[0].id : region_a;
  const std::string b_id = region_b.empty() ? config.regions[1].id : region_b;

  const DatasetGenerator generator(config);
  std::vector<std::vector<double>> per_rep(static_cast<std::size_t>(reps));
  parallel_for(per_rep.size(), threads, [&](std::size_t r) {
    const auto data = generator.draw(derive_key(seed, {static_cast<std::uint64_t>(r)}));
    const auto& a = data.dataset.region(a_id);
    const auto& b = data.dataset.region(b_id);
    const auto maxima = sorted_row_maxima(inter_correlation_matrix(a, b));
    auto& out = per_rep[r];
    for (double rho : grid) {
      out.push_back(static_cast<double>(count_above_sorted(maxima, rho)) / static_cast<double>(a.voxels()));
    }
  });

  MonteCarloCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  const auto count = static_cast<double>(reps);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double sum = 0.0;
    for (const auto& rep : per_rep) sum += rep[k];
    const double mean = sum / count;
    double ss = 0.0;
    for (const auto& rep : per_rep) ss += (rep[k] - mean) * (rep[k] - mean);
    curve.mean.push_back(mean);
    curve.std_error.push_back(reps > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0);
  }
  return curve;
}

}  // namespace corrscreen
