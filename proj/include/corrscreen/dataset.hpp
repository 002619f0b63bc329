#pragma once

// Region-grouped time series and the network/ground-truth value types.
//
// File formats:
//   dataset CSV   header `region,voxel,t1,...,tn`, one row per voxel.
//   network JSON  {"schema":"corrscreen-net/1","exceedance_level":..,
//                  "regions":[..],"edges":[{"a","b","threshold","exceedance","detected"}]}
//   truth JSON    {"schema":"corrscreen-truth/1","regions":[..],
//                  "edges":[{"a","b","rho"}]}, absent pair means rho = 0.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace corrscreen {

using Index = Eigen::Index;

/// One region's signals: `values` is p x n (voxels x samples).
struct RegionTimeSeries {
  std::string region_id;
  std::vector<std::string> voxel_ids;
  Eigen::MatrixXd values;

  Index voxels() const { return values.rows(); }
  Index samples() const { return values.cols(); }
};

/// Regions in file order. Not validated on construction; see validate_dataset.
struct Dataset {
  std::vector<RegionTimeSeries> regions;

  Index samples() const { return regions.empty() ? 0 : regions.front().samples(); }
  std::vector<std::string> region_ids() const;
  const RegionTimeSeries& region(std::string_view id) const;
};

/// Unordered pair of distinct region ids, stored with a < b.
struct RegionPair {
  std::string a;
  std::string b;

  static RegionPair make(std::string x, std::string y);

  auto operator<=>(const RegionPair&) const = default;
  bool operator==(const RegionPair&) const = default;
};

/// All unordered pairs of `ids`, in first-index-major order of `ids`.
std::vector<RegionPair> all_pairs(const std::vector<std::string>& ids);

enum class EdgeLabel { Positive, Negative };

struct GroundTruthNetwork {
  std::vector<std::string> region_ids;
  /// Population inter-correlation for every evaluated pair.
  std::map<RegionPair, double> true_inter;

  EdgeLabel label(const RegionPair& pair) const;
  std::size_t positives() const;
  std::size_t negatives() const;

  bool operator==(const GroundTruthNetwork&) const = default;
};

struct EdgeRecord {
  double threshold = 0.0;
  double exceedance = 0.0;
  bool detected = false;

  bool operator==(const EdgeRecord&) const = default;
};

struct BinaryNetwork {
  std::vector<std::string> region_ids;
  double exceedance_level = 0.05;
  std::map<RegionPair, EdgeRecord> edges;

  std::size_t detected_count() const;

  bool operator==(const BinaryNetwork&) const = default;
};

struct LoadReport {
  std::size_t dropped = 0;
  /// "region/voxel" of each dropped constant voxel.
  std::vector<std::string> dropped_voxels;
};

struct LoadedDataset {
  Dataset dataset;
  LoadReport report;
};

/// Reads the wide CSV format. Regions appear in order of first occurrence and
/// voxels keep their row order. Constant voxels raise DegenerateSeriesError
/// unless `drop_constant` is set, in which case they are removed and counted.
LoadedDataset load_dataset(const std::filesystem::path& path, bool drop_constant = false);
LoadedDataset parse_dataset_csv(std::string_view text, bool drop_constant = false);

std::string dataset_to_csv(const Dataset& ds);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

struct RegionFindings {
  std::string region_id;
  Index voxels = 0;
  Index samples = 0;
  std::size_t constant_voxels = 0;
  std::size_t nonfinite = 0;
};

struct ValidationReport {
  bool ok = true;
  Index shared_n = 0;
  bool mismatched_n = false;
  bool duplicate_ids = false;
  bool too_few_samples = false;
  bool empty_region = false;
  std::size_t constant_voxels = 0;
  std::size_t nonfinite = 0;
  std::vector<RegionFindings> regions;
};

ValidationReport validate_dataset(const Dataset& ds);

/// Minimum sample count accepted by the loader.
inline constexpr Index kMinSamples = 5;

std::string network_to_json(const BinaryNetwork& net);
BinaryNetwork network_from_json(std::string_view text);
void save_network(const BinaryNetwork& net, const std::filesystem::path& path);
BinaryNetwork load_network(const std::filesystem::path& path);

/// Builds a truth network over `region_ids`; pairs absent from `listed` get rho = 0.
GroundTruthNetwork make_truth(std::vector<std::string> region_ids,
                              const std::map<RegionPair, double>& listed);

std::string truth_to_json(const GroundTruthNetwork& truth);
GroundTruthNetwork truth_from_json(std::string_view text);
void save_truth(const GroundTruthNetwork& truth, const std::filesystem::path& path);
GroundTruthNetwork load_truth(const std::filesystem::path& path);

}  // namespace corrscreen
