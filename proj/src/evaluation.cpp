#include "corrscreen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "corrscreen/errors.hpp"
#include "corrscreen/io.hpp"
#include "corrscreen/parallel.hpp"
#include "corrscreen/rng.hpp"
#include "json.hpp"

namespace corrscreen {

namespace {

using json = nlohmann::ordered_json;

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct Aggregate {
  std::optional<double> mean;
  std::optional<double> sd;
};

// Replicates whose rate is undefined are left out of the summary.
Aggregate aggregate(const std::vector<std::optional<double>>& rates) {
  std::vector<double> defined;
  for (const auto& r : rates) {
    if (r) defined.push_back(*r);
  }
  if (defined.empty()) return {};
  return {kahan_mean(defined), sample_sd(defined)};
}

}  // namespace

ConfusionCounts confusion(const BinaryNetwork& pred, const GroundTruthNetwork& truth) {
  const std::set<std::string> pred_ids(pred.region_ids.begin(), pred.region_ids.end());
  const std::set<std::string> truth_ids(truth.region_ids.begin(), truth.region_ids.end());
  if (pred_ids != truth_ids) throw UsageError("predicted and true networks cover different regions");
  ConfusionCounts c;
  for (const auto& [pair, rho] : truth.true_inter) {
    const auto it = pred.edges.find(pair);
    const bool detected = it != pred.edges.end() && it->second.detected;
    const bool positive = truth.label(pair) == EdgeLabel::Positive;
    if (positive) {
      ++(detected ? c.tp : c.fn);
    } else {
      ++(detected ? c.fp : c.tn);
    }
  }
  return c;
}

Rates tpr_fpr(const ConfusionCounts& c) {
  Rates r;
  if (c.tp + c.fn > 0) r.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.fp + c.tn > 0) r.fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
  return r;
}

double kahan_mean(const std::vector<double>& values) {
  if (values.empty()) throw UsageError("mean of an empty sample");
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(values.size());
}

double sample_sd(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = kahan_mean(values);
  std::vector<double> squares;
  squares.reserve(values.size());
  for (double v : values) squares.push_back((v - mean) * (v - mean));
  const double ss = kahan_mean(squares) * static_cast<double>(values.size());
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::vector<Detector> default_table1_methods() {
  return {
      {Pipeline::CorrelationOfAverages, ThresholdMethod::poli()},
      {Pipeline::CorrelationScreening, ThresholdMethod::poli()},
      {Pipeline::CorrelationScreening, ThresholdMethod::hero()},
      {Pipeline::CorrelationScreening, ThresholdMethod::fwer(0.0)},
      {Pipeline::CorrelationScreening, ThresholdMethod::quantile(0.0)},
  };
}

std::vector<BenchmarkRow> run_table1(const Table1Options& options) {
  if (options.reps < 1) throw UsageError("benchmark needs reps >= 1");
  if (options.methods.empty()) throw UsageError("benchmark needs at least one method");
  const auto reps = static_cast<std::size_t>(options.reps);
  const std::size_t m = options.methods.size();

  std::vector<BenchmarkRow> rows;
  for (double rho_min : options.rho_min) {
    const auto config = benchmark_config(rho_min, options.seed, options.regions, options.p, options.n,
                                         options.inter, options.null_pairs, options.decay);
    const DatasetGenerator generator(config);

    // rates[r][k] for replicate r and method k.
    std::vector<std::vector<Rates>> rates(reps);
    parallel_for(reps, options.threads, [&](std::size_t r) {
      const auto data = generator.draw(derive_key(options.seed, {static_cast<std::uint64_t>(r)}));
      InferenceOptions inference;
      inference.exceedance_level = options.exceedance_level;
      inference.surrogate_reps = options.surrogate_reps;
      inference.seed = derive_key(options.seed, {static_cast<std::uint64_t>(r), hash_string("infer")});
      const auto networks = infer_networks(data.dataset, options.methods, inference);
      for (const auto& net : networks) rates[r].push_back(tpr_fpr(confusion(net, data.truth)));
    });

    for (std::size_t k = 0; k < m; ++k) {
      std::vector<std::optional<double>> tpr;
      std::vector<std::optional<double>> fpr;
      for (std::size_t r = 0; r < reps; ++r) {
        tpr.push_back(rates[r][k].tpr);
        fpr.push_back(rates[r][k].fpr);
      }
      const auto t = aggregate(tpr);
      const auto f = aggregate(fpr);
      rows.push_back({options.methods[k].label(), rho_min, f.mean, f.sd, t.mean, t.sd, options.reps});
    }
  }
  return rows;
}

std::vector<ThresholdSample> run_fig5(const Fig5Options& options) {
  if (options.reps < 1) throw UsageError("benchmark needs reps >= 1");
  if (options.p < 2) throw UsageError("threshold benchmark needs p >= 2");
  if (options.n < kMinSamples) throw UsageError("threshold benchmark needs n >= 5");
  for (double intra : options.intra) {
    if (!(intra >= 0.0 && intra < 1.0)) throw UsageError("intra-correlation must lie in [0, 1)");
  }
  const auto reps = static_cast<std::size_t>(options.reps);
  const std::size_t cells = options.intra.size() * reps;
  std::vector<std::vector<ThresholdSample>> out(cells);

  parallel_for(cells, options.threads, [&](std::size_t cell_index) {
    const std::size_t i = cell_index / reps;
    const std::size_t r = cell_index % reps;
    const double intra = options.intra[i];
    RandomStream rng(derive_key(options.seed, {hash_string("fig5"), i, r}));
    RegionTimeSeries a{"A", {}, sample_constant_intra(options.p, intra, options.n, rng)};
    RegionTimeSeries b{"B", {}, sample_constant_intra(options.p, intra, options.n, rng)};
    const std::uint64_t surrogate_seed = derive_key(options.seed, {hash_string("fig5-null"), i, r});

    const bool need_null = std::any_of(options.methods.begin(), options.methods.end(),
                                       [](const ThresholdMethod& t) { return t.uses_surrogate(); });
    std::optional<EmpiricalDistribution> null;
    if (need_null) null.emplace(pair_surrogate(a, b, options.surrogate_reps, surrogate_seed));
    for (const auto& method : options.methods) {
      const double threshold =
          threshold_from_null(method, null ? &*null : nullptr, options.n, options.p, options.p);
      out[cell_index].push_back({method.label(), intra, static_cast<int>(r), threshold});
    }
  });

  std::vector<ThresholdSample> samples;
  samples.reserve(cells * options.methods.size());
  for (auto& cell_samples : out) {
    for (auto& s : cell_samples) samples.push_back(std::move(s));
  }
  return samples;
}

std::string table1_to_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << "method,rho_min,fpr_mean,fpr_sd,tpr_mean,tpr_sd,reps\n";
  for (const auto& row : rows) {
    os << row.method << ',' << format_double(row.rho_min) << ',' << cell(row.fpr_mean) << ','
       << cell(row.fpr_sd) << ',' << cell(row.tpr_mean) << ',' << cell(row.tpr_sd) << ',' << row.reps
       << '\n';
  }
  return os.str();
}

std::string table1_to_json(const std::vector<BenchmarkRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    out.push_back({{"method", row.method},
                   {"rho_min", row.rho_min},
                   {"fpr_mean", optional_json(row.fpr_mean)},
                   {"fpr_sd", optional_json(row.fpr_sd)},
                   {"tpr_mean", optional_json(row.tpr_mean)},
                   {"tpr_sd", optional_json(row.tpr_sd)},
                   {"reps", row.reps}});
  }
  return out.dump(1) + "\n";
}

std::string fig5_to_csv(const std::vector<ThresholdSample>& samples) {
  std::ostringstream os;
  os << "method,intra,replicate,threshold\n";
  for (const auto& s : samples) {
    os << s.method << ',' << format_double(s.intra) << ',' << s.replicate << ','
       << format_double(s.threshold) << '\n';
  }
  return os.str();
}

std::string fig5_to_json(const std::vector<ThresholdSample>& samples) {
  json out = json::array();
  for (const auto& s : samples) {
    out.push_back({{"method", s.method}, {"intra", s.intra}, {"replicate", s.replicate},
                   {"threshold", s.threshold}});
  }
  return out.dump(1) + "\n";
}

std::string curves_to_csv(const std::vector<ReplicateCurve>& curves) {
  std::ostringstream os;
  os << "rho,value,statistic,replicate\n";
  for (const auto& rc : curves) {
    for (std::size_t k = 0; k < rc.curve.grid.size(); ++k) {
      os << format_double(rc.curve.grid[k]) << ',' << format_double(rc.curve.values[k]) << ','
         << to_string(rc.curve.statistic) << ',' << rc.replicate << '\n';
    }
  }
  return os.str();
}

std::string curves_to_json(const std::vector<ReplicateCurve>& curves) {
  json out = json::array();
  for (const auto& rc : curves) {
    out.push_back({{"statistic", std::string(to_string(rc.curve.statistic))},
                   {"replicate", rc.replicate},
                   {"rho", rc.curve.grid},
                   {"value", rc.curve.values}});
  }
  return out.dump(1) + "\n";
}

}  // namespace corrscreen
