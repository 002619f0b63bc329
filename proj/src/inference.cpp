#include "corrscreen/inference.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>

#include "corrscreen/correlation.hpp"
#include "corrscreen/discovery.hpp"
#include "corrscreen/errors.hpp"
#include "corrscreen/parallel.hpp"
#include "corrscreen/synthesis.hpp"

namespace corrscreen {

namespace {

struct RegionCache {
  Eigen::MatrixXd standardized;
  double intra = 0.0;
  Eigen::VectorXd average;
};

void check_dataset(const Dataset& ds) {
  if (ds.regions.size() < 2) throw UsageError("network inference needs at least two regions");
  std::set<std::string> ids;
  for (const auto& r : ds.regions) {
    if (!ids.insert(r.region_id).second) throw UsageError("duplicate region id '" + r.region_id + "'");
    if (r.samples() != ds.samples()) {
      throw UsageError("region '" + r.region_id + "' has " + std::to_string(r.samples()) +
                       " samples, expected " + std::to_string(ds.samples()));
    }
    if (r.voxels() < 1) throw UsageError("region '" + r.region_id + "' has no voxels");
  }
  if (ds.samples() < kMinSamples) throw UsageError("network inference needs n >= 5");
}

void check_level(double level) {
  if (!(level >= 0.0 && level < 1.0)) throw UsageError("exceedance level must lie in [0, 1)");
}

std::size_t index_of(const Dataset& ds, const std::string& id) {
  for (std::size_t k = 0; k < ds.regions.size(); ++k) {
    if (ds.regions[k].region_id == id) return k;
  }
  throw UsageError("unknown region '" + id + "'");
}

}  // namespace

Pipeline parse_pipeline(std::string_view name) {
  if (name == "cs" || name == "CS") return Pipeline::CorrelationScreening;
  if (name == "ca" || name == "CA") return Pipeline::CorrelationOfAverages;
  throw UsageError("unknown pipeline '" + std::string(name) + "' (cs|ca)");
}

std::string_view to_string(Pipeline pipeline) {
  return pipeline == Pipeline::CorrelationScreening ? "CS" : "CA";
}

std::string Detector::label() const { return std::string(to_string(pipeline)) + "+" + method.label(); }

Detector parse_detector(std::string_view text) {
  const auto plus = text.find('+');
  const auto colon = text.find(':');
  const auto cut = plus != std::string_view::npos ? plus : colon;
  if (cut == std::string_view::npos) {
    throw UsageError("malformed detector '" + std::string(text) + "' (expected e.g. cs:quantile:0)");
  }
  return Detector{parse_pipeline(text.substr(0, cut)), parse_threshold_method(text.substr(cut + 1))};
}

EdgeDecision decide_edge_cs(const EmpiricalDistribution& abs_inter, double threshold, double level) {
  check_level(level);
  EdgeDecision d;
  d.exceedance = nu_e_hat(abs_inter, threshold);
  d.detected = d.exceedance > level;
  return d;
}

Eigen::VectorXd regional_average(const RegionTimeSeries& region) {
  if (region.voxels() < 1) throw UsageError("regional_average of an empty region");
  return region.values.colwise().mean().transpose();
}

std::vector<BinaryNetwork> infer_networks(const Dataset& ds, std::span<const Detector> detectors,
                                          const InferenceOptions& options) {
  check_dataset(ds);
  check_level(options.exceedance_level);
  if (options.surrogate_reps < 1) throw UsageError("surrogate reps must be >= 1");
  if (detectors.empty()) return {};

  const bool any_cs = std::any_of(detectors.begin(), detectors.end(), [](const Detector& d) {
    return d.pipeline == Pipeline::CorrelationScreening;
  });
  const bool any_ca = std::any_of(detectors.begin(), detectors.end(), [](const Detector& d) {
    return d.pipeline == Pipeline::CorrelationOfAverages;
  });
  const bool any_surrogate = std::any_of(detectors.begin(), detectors.end(),
                                         [](const Detector& d) { return d.method.uses_surrogate(); });

  std::vector<RegionCache> cache(ds.regions.size());
  parallel_for(cache.size(), options.threads, [&](std::size_t k) {
    const auto& region = ds.regions[k];
    auto& c = cache[k];
    if (any_cs || any_surrogate) c.standardized = standardize_rows(region);
    if (any_surrogate) {
      if (region.voxels() < 2) {
        throw UsageError("region '" + region.region_id +
                         "' needs at least two voxels to build a surrogate null");
      }
      c.intra = average_intra(c.standardized).value;
    }
    if (any_ca) c.average = regional_average(region);
  });

  const auto pairs = all_pairs(ds.region_ids());
  const Index n = ds.samples();
  std::vector<std::vector<EdgeRecord>> records(pairs.size());
  parallel_for(pairs.size(), options.threads, [&](std::size_t k) {
    const auto& pair = pairs[k];
    const std::size_t ia = index_of(ds, pair.a);
    const std::size_t ib = index_of(ds, pair.b);
    const auto& a = ds.regions[ia];
    const auto& b = ds.regions[ib];

    std::optional<EmpiricalDistribution> null;
    if (any_surrogate) {
      null.emplace(pair_surrogate(a, cache[ia].intra, b, cache[ib].intra, options.surrogate_reps,
                                  options.seed));
    }
    std::optional<EmpiricalDistribution> inter;
    if (any_cs) {
      const Eigen::MatrixXd r = correlation_matrix(cache[ia].standardized, cache[ib].standardized);
      if (options.on_correlations) options.on_correlations(pair, r);
      inter.emplace(distribution_of(r, Signedness::Absolute));
    }
    double average_corr = 0.0;
    if (any_ca) {
      try {
        average_corr = std::abs(pearson(cache[ia].average, cache[ib].average));
      } catch (const DegenerateSeriesError&) {
        throw DegenerateSeriesError("regional averages of pair (" + pair.a + "," + pair.b +
                                    ") have zero variance");
      }
    }

    auto& out = records[k];
    for (const auto& detector : detectors) {
      const double threshold =
          threshold_from_null(detector.method, null ? &*null : nullptr, n, a.voxels(), b.voxels());
      EdgeRecord rec;
      rec.threshold = threshold;
      if (detector.pipeline == Pipeline::CorrelationScreening) {
        const auto d = decide_edge_cs(*inter, threshold, options.exceedance_level);
        rec.exceedance = d.exceedance;
        rec.detected = d.detected;
      } else {
        rec.exceedance = average_corr > threshold ? 1.0 : 0.0;
        rec.detected = rec.exceedance > options.exceedance_level;
      }
      out.push_back(rec);
    }
  });

  std::vector<BinaryNetwork> networks(detectors.size());
  for (std::size_t d = 0; d < detectors.size(); ++d) {
    networks[d].region_ids = ds.region_ids();
    networks[d].exceedance_level = options.exceedance_level;
    for (std::size_t k = 0; k < pairs.size(); ++k) networks[d].edges.emplace(pairs[k], records[k][d]);
  }
  return networks;
}

BinaryNetwork infer_network(const Dataset& ds, const InferenceConfig& config) {
  const Detector detector{config.pipeline, config.method};
  InferenceOptions options;
  options.exceedance_level = config.exceedance_level;
  options.surrogate_reps = config.surrogate_reps;
  options.seed = config.seed;
  options.threads = config.threads;
  return infer_networks(ds, std::span<const Detector>(&detector, 1), options).front();
}

std::vector<PairThreshold> pair_thresholds(const Dataset& ds, const ThresholdMethod& method,
                                           int surrogate_reps, std::uint64_t seed, unsigned threads) {
  check_dataset(ds);
  const auto pairs = all_pairs(ds.region_ids());
  std::vector<PairThreshold> out(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    out[k].pair = pairs[k];
    out[k].threshold = thresholds_for_pair(ds.region(pairs[k].a), ds.region(pairs[k].b), method,
                                           surrogate_reps, seed);
  });
  return out;
}

}  // namespace corrscreen
