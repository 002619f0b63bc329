#include "corrscreen/synthesis.hpp"

#include <cmath>
#include <set>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "corrscreen/errors.hpp"
#include "json.hpp"

namespace corrscreen {

using nlohmann::json;

namespace {

constexpr std::string_view kSimSchema = "corrscreen-sim/1";
constexpr double kSymmetryTolerance = 1e-10;

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw UsageError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

std::string region_name(Index k) {
  std::string digits = std::to_string(k);
  if (digits.size() < 2) digits.insert(0, "0");
  return "R" + digits;
}

void fill_normals(Eigen::MatrixXd& z, RandomStream& rng) {
  for (Index j = 0; j < z.cols(); ++j) {
    for (Index i = 0; i < z.rows(); ++i) z(i, j) = rng.normal();
  }
}

}  // namespace

ToeplitzDecay parse_decay(std::string_view name) {
  if (name == "linear") return ToeplitzDecay::Linear;
  if (name == "geometric") return ToeplitzDecay::Geometric;
  throw UsageError("unknown Toeplitz decay '" + std::string(name) + "' (linear|geometric)");
}

std::string_view to_string(ToeplitzDecay decay) {
  return decay == ToeplitzDecay::Linear ? "linear" : "geometric";
}

Eigen::MatrixXd toeplitz_covariance(const ToeplitzSpec& spec) {
  if (spec.p < 1) throw UsageError("toeplitz_covariance: p must be >= 1");
  check_unit_interval(spec.rho_min, "rho_min");
  const Index p = spec.p;
  Eigen::MatrixXd m(p, p);
  if (p == 1) {
    m(0, 0) = 1.0;
    return m;
  }
  const double span = static_cast<double>(p - 1);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      const double lag = static_cast<double>(std::abs(i - j)) / span;
      if (i == j) {
        m(i, j) = 1.0;
      } else if (spec.decay == ToeplitzDecay::Linear) {
        m(i, j) = 1.0 - (1.0 - spec.rho_min) * lag;
      } else {
        m(i, j) = std::pow(spec.rho_min, lag);
      }
    }
  }
  return m;
}

Eigen::MatrixXd constant_covariance(Index p, double rho) {
  if (p < 1) throw UsageError("constant_covariance: p must be >= 1");
  check_unit_interval(rho, "constant intra-correlation");
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(p, p, rho);
  m.diagonal().setOnes();
  return m;
}

std::vector<std::pair<int, int>> default_null_pairs(Index regions) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k + 1 <= 8 && k + 1 <= regions; k += 2) pairs.emplace_back(k, k + 1);
  return pairs;
}

SimulationConfig benchmark_config(double rho_min, std::uint64_t seed, Index regions, Index p, Index n,
                                  double inter, std::vector<std::pair<int, int>> null_pairs,
                                  ToeplitzDecay decay) {
  SimulationConfig config;
  config.n = n;
  config.seed = seed;
  config.decay = decay;
  for (Index k = 1; k <= regions; ++k) config.regions.push_back({region_name(k), p, rho_min});
  std::set<std::pair<int, int>> nulls;
  for (auto [x, y] : null_pairs) {
    if (x < 1 || y < 1 || x > regions || y > regions || x == y) {
      throw UsageError("null pair (" + std::to_string(x) + "," + std::to_string(y) +
                       ") out of range");
    }
    nulls.emplace(std::min(x, y), std::max(x, y));
  }
  for (Index a = 1; a <= regions; ++a) {
    for (Index b = a + 1; b <= regions; ++b) {
      const bool is_null = nulls.contains({static_cast<int>(a), static_cast<int>(b)});
      config.inter[RegionPair::make(region_name(a), region_name(b))] = is_null ? 0.0 : inter;
    }
  }
  return config;
}

Eigen::MatrixXd assemble_block_covariance(const SimulationConfig& config) {
  std::vector<Index> offset;
  Index total = 0;
  std::set<std::string> ids;
  for (const auto& r : config.regions) {
    if (!ids.insert(r.id).second) throw UsageError("duplicate region id '" + r.id + "'");
    offset.push_back(total);
    total += r.p;
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(total, total);
  for (std::size_t k = 0; k < config.regions.size(); ++k) {
    const auto& r = config.regions[k];
    cov.block(offset[k], offset[k], r.p, r.p) = toeplitz_covariance({r.p, r.rho_min, config.decay});
  }
  auto index_of = [&](const std::string& id) {
    for (std::size_t k = 0; k < config.regions.size(); ++k) {
      if (config.regions[k].id == id) return k;
    }
    throw UsageError("inter-correlation references undeclared region '" + id + "'");
  };
  for (const auto& [pair, rho] : config.inter) {
    if (!(std::abs(rho) <= 1.0)) throw UsageError("inter-correlation must satisfy |rho| <= 1");
    const auto a = index_of(pair.a);
    const auto b = index_of(pair.b);
    const Index pa = config.regions[a].p;
    const Index pb = config.regions[b].p;
    cov.block(offset[a], offset[b], pa, pb).setConstant(rho);
    cov.block(offset[b], offset[a], pb, pa).setConstant(rho);
  }
  return cov;
}

PsdReport check_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw UsageError("check_psd: matrix is not square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw UsageError("check_psd: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  PsdReport report;
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.ok = report.min_eigenvalue >= -kPsdTolerance;
  return report;
}

MvnSampler::MvnSampler(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw UsageError("covariance is not square");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw CovarianceError("covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    triangular_ = true;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -kPsdTolerance) {
    throw CovarianceError("covariance is not positive semidefinite (min eigenvalue " +
                          std::to_string(min_eig) + ")");
  }
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * roots.asDiagonal();
  triangular_ = false;
}

Eigen::MatrixXd MvnSampler::sample(Index n, RandomStream& rng) const {
  Eigen::MatrixXd z(dim(), n);
  fill_normals(z, rng);
  if (triangular_) return factor_.triangularView<Eigen::Lower>() * z;
  return factor_ * z;
}

Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& cov, Index n, std::uint64_t seed) {
  RandomStream rng(derive_key(seed, {hash_string("mvn")}));
  return MvnSampler(cov).sample(n, rng);
}

Eigen::MatrixXd sample_constant_intra(Index p, double rho, Index n, RandomStream& rng) {
  check_unit_interval(rho, "constant intra-correlation");
  Eigen::VectorXd common(n);
  for (Index k = 0; k < n; ++k) common(k) = rng.normal();
  Eigen::MatrixXd x(p, n);
  fill_normals(x, rng);
  x *= std::sqrt(1.0 - rho);
  x.rowwise() += std::sqrt(rho) * common.transpose();
  return x;
}

DatasetGenerator::DatasetGenerator(SimulationConfig config)
    : config_(std::move(config)), sampler_([&] {
        if (config_.n < kMinSamples) {
          throw UsageError("simulation needs n >= " + std::to_string(kMinSamples));
        }
        return MvnSampler(assemble_block_covariance(config_));
      }()) {
  std::vector<std::string> ids;
  for (const auto& r : config_.regions) ids.push_back(r.id);
  truth_ = make_truth(std::move(ids), config_.inter);
}

GeneratedData DatasetGenerator::draw(std::uint64_t seed) const {
  RandomStream rng(derive_key(seed, {hash_string("dataset")}));
  const Eigen::MatrixXd x = sampler_.sample(config_.n, rng);
  GeneratedData out;
  out.truth = truth_;
  Index offset = 0;
  for (const auto& spec : config_.regions) {
    RegionTimeSeries region;
    region.region_id = spec.id;
    region.values = x.middleRows(offset, spec.p);
    for (Index i = 0; i < spec.p; ++i) region.voxel_ids.push_back("v" + std::to_string(i + 1));
    offset += spec.p;
    out.dataset.regions.push_back(std::move(region));
  }
  return out;
}

GeneratedData generate_dataset(const SimulationConfig& config) {
  return DatasetGenerator(config).draw(config.seed);
}

EmpiricalDistribution generate_surrogate(const SurrogateSpec& spec) {
  if (spec.reps < 1) throw UsageError("surrogate needs reps >= 1");
  if (spec.p_a < 1 || spec.p_b < 1) throw UsageError("surrogate needs p_a, p_b >= 1");
  if (spec.n < 3) throw UsageError("surrogate needs n >= 3");
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(spec.reps * spec.p_a * spec.p_b));
  for (int r = 0; r < spec.reps; ++r) {
    RandomStream rng(derive_key(spec.seed, {hash_string("surrogate"), static_cast<std::uint64_t>(r)}));
    const Eigen::MatrixXd a = sample_constant_intra(spec.p_a, spec.intra_a, spec.n, rng);
    const Eigen::MatrixXd b = sample_constant_intra(spec.p_b, spec.intra_b, spec.n, rng);
    const Eigen::MatrixXd corr = correlation_matrix(standardize_rows(a, "surrogate a"),
                                                    standardize_rows(b, "surrogate b"));
    for (Index k = 0; k < corr.size(); ++k) pooled.push_back(std::abs(corr.data()[k]));
  }
  return EmpiricalDistribution(std::move(pooled), Signedness::Absolute);
}

// Sum of all entries of Z Z^T is ||sum of rows||^2 and its trace is p, so the
// mean off-diagonal correlation needs no p x p product.
IntraSummary average_intra(const Eigen::MatrixXd& standardized) {
  const Index p = standardized.rows();
  if (p < 2) throw UsageError("average_intra needs at least two voxels");
  const double total = standardized.colwise().sum().squaredNorm();
  const double pp = static_cast<double>(p);
  IntraSummary s;
  s.raw_mean = (total - pp) / (pp * (pp - 1.0));
  s.value = std::clamp(s.raw_mean, 0.0, 1.0);
  s.clamped = s.raw_mean < 0.0 || s.raw_mean > 1.0;
  return s;
}

IntraSummary average_intra(const RegionTimeSeries& region) {
  if (region.voxels() < 2) {
    throw UsageError("average_intra: region '" + region.region_id + "' has fewer than two voxels");
  }
  return average_intra(standardize_rows(region));
}

// ---------------------------------------------------------------------------
// Config JSON

SimulationConfig simulation_config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("simulation config: ") + e.what());
  }
  try {
    if (!doc.contains("schema")) throw ParseError("simulation config: missing key 'schema'");
    if (doc.at("schema").get<std::string>() != kSimSchema) {
      throw VersionError("simulation config: unsupported schema '" +
                         doc.at("schema").get<std::string>() + "'");
    }
    SimulationConfig config;
    config.n = doc.at("n").get<Index>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("decay")) config.decay = parse_decay(doc.at("decay").get<std::string>());
    for (const auto& r : doc.at("regions")) {
      config.regions.push_back(
          {r.at("id").get<std::string>(), r.at("p").get<Index>(), r.at("rho_min").get<double>()});
    }
    if (doc.contains("inter")) {
      for (const auto& e : doc.at("inter")) {
        config.inter[RegionPair::make(e.at("a").get<std::string>(), e.at("b").get<std::string>())] =
            e.at("rho").get<double>();
      }
    }
    return config;
  } catch (const json::exception& e) {
    throw ParseError(std::string("simulation config: ") + e.what());
  }
}

std::string simulation_config_to_json(const SimulationConfig& config) {
  json doc;
  doc["schema"] = kSimSchema;
  doc["n"] = config.n;
  doc["seed"] = config.seed;
  doc["decay"] = to_string(config.decay);
  json regions = json::array();
  for (const auto& r : config.regions) regions.push_back({{"id", r.id}, {"p", r.p}, {"rho_min", r.rho_min}});
  doc["regions"] = std::move(regions);
  json inter = json::array();
  for (const auto& [pair, rho] : config.inter) inter.push_back({{"a", pair.a}, {"b", pair.b}, {"rho", rho}});
  doc["inter"] = std::move(inter);
  return doc.dump(1) + "\n";
}

}  // namespace corrscreen
