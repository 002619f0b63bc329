// corrscreen command-line driver.
//
// Exit codes: 0 success (and --help), 1 domain or data error, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "corrscreen/correlation.hpp"
#include "corrscreen/dataset.hpp"
#include "corrscreen/discovery.hpp"
#include "corrscreen/errors.hpp"
#include "corrscreen/evaluation.hpp"
#include "corrscreen/inference.hpp"
#include "corrscreen/io.hpp"
#include "corrscreen/parallel.hpp"
#include "corrscreen/rng.hpp"
#include "corrscreen/synthesis.hpp"
#include "corrscreen/thresholds.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace corrscreen;

namespace {

struct Globals {
  unsigned threads = 0;
  std::string format = "csv";

  unsigned workers() const {
    return threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  }
  bool json() const { return format == "json"; }
};

void log_run(const CLI::App& sub, std::uint64_t seed) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(hash_string(sub.config_to_str(true, false))));
  std::cerr << "corrscreen " << sub.get_name() << ": seed=" << seed << " config_hash=" << hash << '\n';
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    write_file_atomic(out, content);
  }
}

ThresholdMethod method_from_flags(const std::string& method, const std::optional<double>& alpha) {
  if (method.find_first_of("(:") != std::string::npos) {
    if (alpha) throw UsageError("--alpha conflicts with an inline method alpha");
    return parse_threshold_method(method);
  }
  return make_threshold_method(method, alpha);
}

Dataset load_input(const std::string& path, bool drop_constant) {
  auto loaded = load_dataset(path, drop_constant);
  if (loaded.report.dropped > 0) {
    std::cerr << "dropped " << loaded.report.dropped << " constant voxel(s):";
    for (const auto& v : loaded.report.dropped_voxels) std::cerr << ' ' << v;
    std::cerr << '\n';
  }
  return std::move(loaded.dataset);
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string preset;
  double rho_min = 0.5;
  Index regions = 10;
  Index p = 150;
  Index n = 100;
  double inter = 0.2;
  std::string decay = "linear";
  std::optional<std::uint64_t> seed;
  std::string out;
};

void run_simulate(const CLI::App& sub, const SimulateArgs& a) {
  SimulationConfig config;
  if (!a.config.empty()) {
    config = simulation_config_from_json(read_file(a.config));
  } else if (a.preset == "table1") {
    config = benchmark_config(a.rho_min, 0, a.regions, a.p, a.n, a.inter, default_null_pairs(a.regions),
                              parse_decay(a.decay));
  } else {
    throw UsageError("simulate needs --config or --preset table1");
  }
  if (a.seed) config.seed = *a.seed;
  log_run(sub, config.seed);
  const auto data = generate_dataset(config);
  fs::create_directories(a.out);
  save_dataset(data.dataset, fs::path(a.out) / "data.csv");
  save_truth(data.truth, fs::path(a.out) / "truth.json");
}

// ---- infer ----------------------------------------------------------------

struct InferArgs {
  std::string input;
  std::string pipeline = "cs";
  std::string method = "quantile";
  std::optional<double> alpha;
  double level = 0.05;
  std::uint64_t seed = 0;
  int surrogate_reps = 1;
  std::string out;
  bool drop_constant = false;
  std::string dump_dir;
};

std::string correlations_csv(const Eigen::MatrixXd& r) {
  std::string text = "i,j,r\n";
  for (Index i = 0; i < r.rows(); ++i) {
    for (Index j = 0; j < r.cols(); ++j) {
      text += std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(r(i, j)) + '\n';
    }
  }
  return text;
}

void run_infer(const CLI::App& sub, const InferArgs& a, const Globals& g) {
  const Detector detector{parse_pipeline(a.pipeline), method_from_flags(a.method, a.alpha)};
  log_run(sub, a.seed);
  const Dataset ds = load_input(a.input, a.drop_constant);
  InferenceOptions options;
  options.exceedance_level = a.level;
  options.surrogate_reps = a.surrogate_reps;
  options.seed = a.seed;
  options.threads = g.workers();
  if (!a.dump_dir.empty()) {
    fs::create_directories(a.dump_dir);
    options.on_correlations = [dir = fs::path(a.dump_dir)](const RegionPair& pair, const Eigen::MatrixXd& r) {
      write_file_atomic(dir / (pair.a + "__" + pair.b + ".csv"), correlations_csv(r));
    };
  }
  const auto nets = infer_networks(ds, std::span<const Detector>(&detector, 1), options);
  save_network(nets.front(), a.out);
  std::cerr << detector.label() << ": " << nets.front().detected_count() << " of "
            << nets.front().edges.size() << " edges detected\n";
}

// ---- threshold --------------------------------------------------------------

struct ThresholdArgs {
  std::string input;
  std::string method = "quantile";
  std::optional<double> alpha;
  std::uint64_t seed = 0;
  int surrogate_reps = 1;
  bool drop_constant = false;
  std::string out;
};

void run_threshold(const CLI::App& sub, const ThresholdArgs& a, const Globals& g) {
  const auto method = method_from_flags(a.method, a.alpha);
  log_run(sub, a.seed);
  const Dataset ds = load_input(a.input, a.drop_constant);
  const auto rows = pair_thresholds(ds, method, a.surrogate_reps, a.seed, g.workers());
  std::string text;
  if (g.json()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"a", r.pair.a}, {"b", r.pair.b}, {"method", method.label()}, {"threshold", r.threshold}});
    }
    text = arr.dump(1) + "\n";
  } else {
    text = "a,b,method,threshold\n";
    for (const auto& r : rows) {
      text += r.pair.a + ',' + r.pair.b + ',' + method.label() + ',' + format_double(r.threshold) + '\n';
    }
  }
  emit(a.out, text);
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string out;
};

void run_eval(const EvalArgs& a, const Globals& g) {
  const auto c = confusion(load_network(a.pred), load_truth(a.truth));
  const auto r = tpr_fpr(c);
  std::string text;
  if (g.json()) {
    nlohmann::ordered_json j{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
    j["tpr"] = r.tpr ? nlohmann::ordered_json(*r.tpr) : nlohmann::ordered_json(nullptr);
    j["fpr"] = r.fpr ? nlohmann::ordered_json(*r.fpr) : nlohmann::ordered_json(nullptr);
    text = j.dump(1) + "\n";
  } else {
    text = "tpr=" + (r.tpr ? format_double(*r.tpr) : "NA") + ",fpr=" +
           (r.fpr ? format_double(*r.fpr) : "NA") + "\n";
  }
  std::cout << text;
  if (!a.out.empty() && a.out != "-") write_file_atomic(a.out, text);
}

// ---- bench-table1 -------------------------------------------------------------

struct Table1Args {
  int reps = 100;
  std::vector<double> rho_min{0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<std::string> methods{"ca:poli", "cs:poli", "cs:hero", "cs:fwer:0", "cs:quantile:0"};
  Index regions = 10;
  Index p = 150;
  Index n = 100;
  double inter = 0.2;
  std::string decay = "linear";
  double level = 0.05;
  int surrogate_reps = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_bench_table1(const CLI::App& sub, const Table1Args& a, const Globals& g) {
  Table1Options options;
  options.reps = a.reps;
  options.rho_min = a.rho_min;
  options.methods.clear();
  for (const auto& m : a.methods) options.methods.push_back(parse_detector(m));
  options.regions = a.regions;
  options.null_pairs = default_null_pairs(a.regions);
  options.p = a.p;
  options.n = a.n;
  options.inter = a.inter;
  options.decay = parse_decay(a.decay);
  options.exceedance_level = a.level;
  options.surrogate_reps = a.surrogate_reps;
  options.seed = a.seed;
  options.threads = g.workers();
  log_run(sub, a.seed);
  const auto rows = run_table1(options);
  emit(a.out, g.json() ? table1_to_json(rows) : table1_to_csv(rows));
}

// ---- bench-fig5 ---------------------------------------------------------------

struct Fig5Args {
  int reps = 50;
  std::vector<double> intra{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<std::string> methods{"poli", "quantile:0", "fwer:0", "hero"};
  Index p = 150;
  Index n = 100;
  int surrogate_reps = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string svg;
};

void run_bench_fig5(const CLI::App& sub, const Fig5Args& a, const Globals& g) {
  Fig5Options options;
  options.reps = a.reps;
  options.intra = a.intra;
  options.methods.clear();
  for (const auto& m : a.methods) options.methods.push_back(parse_threshold_method(m));
  options.p = a.p;
  options.n = a.n;
  options.surrogate_reps = a.surrogate_reps;
  options.seed = a.seed;
  options.threads = g.workers();
  log_run(sub, a.seed);
  const auto samples = run_fig5(options);
  emit(a.out, g.json() ? fig5_to_json(samples) : fig5_to_csv(samples));
  if (!a.svg.empty()) {
    std::vector<svg::BoxGroup> groups;
    for (double intra : options.intra) {
      for (const auto& m : options.methods) {
        svg::BoxGroup group{m.label() + " @" + format_double(intra), {}};
        for (const auto& s : samples) {
          if (s.intra == intra && s.method == m.label()) group.values.push_back(s.threshold);
        }
        groups.push_back(std::move(group));
      }
    }
    write_file_atomic(a.svg, svg::box_plot(groups, "Critical thresholds by intra-correlation", "threshold"));
  }
}

// ---- curves -------------------------------------------------------------------

struct CurvesArgs {
  std::string config;
  std::string input;
  std::string region_a;
  std::string region_b;
  int reps = 1;
  std::optional<std::uint64_t> seed;
  std::size_t points = kDefaultGridPoints;
  std::vector<std::string> statistics{"N_ab", "N_e_ab", "nu_hat", "nu_e_hat"};
  bool counts = false;
  bool drop_constant = false;
  std::string out;
  std::string svg;
};

std::vector<DiscoveryCurve> pair_curves(const RegionTimeSeries& a, const RegionTimeSeries& b,
                                        const std::vector<Statistic>& stats, const std::vector<double>& grid,
                                        bool normalize) {
  const Eigen::MatrixXd r = inter_correlation_matrix(a, b);
  std::vector<DiscoveryCurve> out;
  for (auto s : stats) out.push_back(discovery_curve(r, s, grid, normalize));
  return out;
}

void run_curves(const CLI::App& sub, const CurvesArgs& a, const Globals& g) {
  if (a.config.empty() == a.input.empty()) throw UsageError("curves needs exactly one of --config, --input");
  if (a.reps < 1) throw UsageError("--reps must be >= 1");
  std::vector<Statistic> stats;
  for (const auto& s : a.statistics) stats.push_back(parse_statistic(s));
  const auto grid = uniform_grid(a.points);

  std::vector<ReplicateCurve> curves;
  if (!a.input.empty()) {
    if (a.reps != 1) throw UsageError("--reps applies to --config only");
    log_run(sub, 0);
    const Dataset ds = load_input(a.input, a.drop_constant);
    if (ds.regions.size() < 2) throw UsageError("curves needs two regions");
    const auto& ra = a.region_a.empty() ? ds.regions[0] : ds.region(a.region_a);
    const auto& rb = a.region_b.empty() ? ds.regions[1] : ds.region(a.region_b);
    for (auto& c : pair_curves(ra, rb, stats, grid, !a.counts)) curves.push_back({0, std::move(c)});
  } else {
    auto config = simulation_config_from_json(read_file(a.config));
    if (a.seed) config.seed = *a.seed;
    if (config.regions.size() < 2) throw UsageError("curves needs two regions");
    log_run(sub, config.seed);
    const std::string ida = a.region_a.empty() ? config.regions[0].id : a.region_a;
    const std::string idb = a.region_b.empty() ? config.regions[1].id : a.region_b;
    const DatasetGenerator generator(config);
    std::vector<std::vector<DiscoveryCurve>> per_rep(static_cast<std::size_t>(a.reps));
    parallel_for(per_rep.size(), g.workers(), [&](std::size_t r) {
      const auto data = generator.draw(derive_key(config.seed, {static_cast<std::uint64_t>(r)}));
      per_rep[r] = pair_curves(data.dataset.region(ida), data.dataset.region(idb), stats, grid, !a.counts);
    });
    for (std::size_t r = 0; r < per_rep.size(); ++r) {
      for (auto& c : per_rep[r]) curves.push_back({static_cast<int>(r), std::move(c)});
    }
  }
  emit(a.out, g.json() ? curves_to_json(curves) : curves_to_csv(curves));

  if (!a.svg.empty()) {
    std::vector<svg::Series> series;
    for (auto s : stats) {
      svg::Series line{std::string(to_string(s)), grid, std::vector<double>(grid.size(), 0.0)};
      std::vector<std::vector<double>> columns(grid.size());
      for (const auto& rc : curves) {
        if (rc.curve.statistic != s) continue;
        for (std::size_t k = 0; k < grid.size(); ++k) columns[k].push_back(rc.curve.values[k]);
      }
      for (std::size_t k = 0; k < grid.size(); ++k) line.y[k] = kahan_mean(columns[k]);
      series.push_back(std::move(line));
    }
    write_file_atomic(a.svg, svg::line_plot(series, "Discoveries versus threshold", "rho", "value"));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation screening between groups of time series"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--format", g.format, "Tabular output format")->check(CLI::IsMember({"csv", "json"}));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a synthetic dataset and its ground truth");
  simulate->add_option("--config", sim.config, "Simulation config JSON")->check(CLI::ExistingFile);
  simulate->add_option("--preset", sim.preset, "Built-in configuration")->check(CLI::IsMember({"table1"}));
  simulate->add_option("--rho-min", sim.rho_min, "Preset minimal intra-correlation")->capture_default_str();
  simulate->add_option("--regions", sim.regions, "Preset region count")->capture_default_str();
  simulate->add_option("--p", sim.p, "Preset voxels per region")->capture_default_str();
  simulate->add_option("--n", sim.n, "Preset samples")->capture_default_str();
  simulate->add_option("--inter", sim.inter, "Preset positive inter-correlation")->capture_default_str();
  simulate->add_option("--decay", sim.decay, "Preset Toeplitz decay (linear|geometric)")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Overrides the config seed");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->get_option("--config")->excludes("--preset");

  InferArgs inf;
  auto* infer = app.add_subcommand("infer", "Infer a binary network from a dataset CSV");
  infer->add_option("--input", inf.input, "Dataset CSV")->required()->check(CLI::ExistingFile);
  infer->add_option("--pipeline", inf.pipeline, "cs|ca")->capture_default_str();
  infer->add_option("--method", inf.method, "quantile|fwer|poli|hero")->capture_default_str();
  infer->add_option("--alpha", inf.alpha, "Alpha for quantile and fwer");
  infer->add_option("--level", inf.level, "Exceedance level")->capture_default_str();
  infer->add_option("--seed", inf.seed, "Surrogate seed")->capture_default_str();
  infer->add_option("--surrogate-reps", inf.surrogate_reps, "Surrogate replicates")->capture_default_str();
  infer->add_option("--out", inf.out, "Network JSON")->required();
  infer->add_flag("--drop-constant", inf.drop_constant, "Drop constant voxels instead of failing");
  infer->add_option("--dump-correlations", inf.dump_dir, "Directory for per-pair i,j,r CSVs");

  ThresholdArgs thr;
  auto* threshold = app.add_subcommand("threshold", "Per-pair critical thresholds");
  threshold->add_option("--input", thr.input, "Dataset CSV")->required()->check(CLI::ExistingFile);
  threshold->add_option("--method", thr.method, "quantile|fwer|poli|hero")->capture_default_str();
  threshold->add_option("--alpha", thr.alpha, "Alpha for quantile and fwer");
  threshold->add_option("--seed", thr.seed, "Surrogate seed")->capture_default_str();
  threshold->add_option("--surrogate-reps", thr.surrogate_reps, "Surrogate replicates")->capture_default_str();
  threshold->add_flag("--drop-constant", thr.drop_constant, "Drop constant voxels instead of failing");
  threshold->add_option("--out", thr.out, "Output file (default stdout)");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Compare a network with ground truth");
  eval->add_option("--pred", ev.pred, "Network JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", ev.truth, "Truth JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", ev.out, "Also write the result here");

  Table1Args t1;
  auto* table1 = app.add_subcommand("bench-table1", "TPR/FPR comparison over minimal intra-correlations");
  table1->add_option("--reps", t1.reps, "Replicates")->capture_default_str();
  table1->add_option("--rho-min", t1.rho_min, "Minimal intra-correlations")->delimiter(',')->capture_default_str();
  table1->add_option("--methods", t1.methods, "Detectors, e.g. cs:quantile:0,ca:poli")
      ->delimiter(',')
      ->capture_default_str();
  table1->add_option("--regions", t1.regions, "Regions")->capture_default_str();
  table1->add_option("--p", t1.p, "Voxels per region")->capture_default_str();
  table1->add_option("--n", t1.n, "Samples")->capture_default_str();
  table1->add_option("--inter", t1.inter, "Positive inter-correlation")->capture_default_str();
  table1->add_option("--decay", t1.decay, "Toeplitz decay (linear|geometric)")->capture_default_str();
  table1->add_option("--level", t1.level, "Exceedance level")->capture_default_str();
  table1->add_option("--surrogate-reps", t1.surrogate_reps, "Surrogate replicates")->capture_default_str();
  table1->add_option("--seed", t1.seed, "Seed")->capture_default_str();
  table1->add_option("--out", t1.out, "Output file (default stdout)");

  Fig5Args f5;
  auto* fig5 = app.add_subcommand("bench-fig5", "Threshold distributions on null data");
  fig5->add_option("--reps", f5.reps, "Replicates")->capture_default_str();
  fig5->add_option("--intra", f5.intra, "Intra-correlations")->delimiter(',')->capture_default_str();
  fig5->add_option("--methods", f5.methods, "Threshold methods")->delimiter(',')->capture_default_str();
  fig5->add_option("--p", f5.p, "Voxels per region")->capture_default_str();
  fig5->add_option("--n", f5.n, "Samples")->capture_default_str();
  fig5->add_option("--surrogate-reps", f5.surrogate_reps, "Surrogate replicates")->capture_default_str();
  fig5->add_option("--seed", f5.seed, "Seed")->capture_default_str();
  fig5->add_option("--out", f5.out, "Output file (default stdout)");
  fig5->add_option("--svg", f5.svg, "Box plot SVG");

  CurvesArgs cv;
  auto* curves = app.add_subcommand("curves", "Discovery curves for one region pair");
  curves->add_option("--config", cv.config, "Simulation config JSON")->check(CLI::ExistingFile);
  curves->add_option("--input", cv.input, "Dataset CSV")->check(CLI::ExistingFile);
  curves->add_option("--a", cv.region_a, "First region (default: first)");
  curves->add_option("--b", cv.region_b, "Second region (default: second)");
  curves->add_option("--reps", cv.reps, "Replicates (--config only)")->capture_default_str();
  curves->add_option("--seed", cv.seed, "Overrides the config seed");
  curves->add_option("--points", cv.points, "Grid points on [0, 1]")->capture_default_str();
  curves->add_option("--statistics", cv.statistics, "N_ab,N_e_ab,nu_hat,nu_e_hat")
      ->delimiter(',')
      ->capture_default_str();
  curves->add_flag("--counts", cv.counts, "Raw counts instead of normalized values");
  curves->add_flag("--drop-constant", cv.drop_constant, "Drop constant voxels instead of failing");
  curves->add_option("--out", cv.out, "Output file (default stdout)");
  curves->add_option("--svg", cv.svg, "Line plot SVG of the replicate means");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) run_simulate(*simulate, sim);
    if (*infer) run_infer(*infer, inf, g);
    if (*threshold) run_threshold(*threshold, thr, g);
    if (*eval) run_eval(ev, g);
    if (*table1) run_bench_table1(*table1, t1, g);
    if (*fig5) run_bench_fig5(*fig5, f5, g);
    if (*curves) run_curves(*curves, cv, g);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
