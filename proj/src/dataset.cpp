#include "corrscreen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <utility>

#include "corrscreen/errors.hpp"
#include "corrscreen/io.hpp"
#include "json.hpp"

namespace corrscreen {

using nlohmann::json;

namespace {

constexpr std::string_view kNetworkSchema = "corrscreen-net/1";
constexpr std::string_view kTruthSchema = "corrscreen-truth/1";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_constant(const std::vector<double>& row) {
  return std::all_of(row.begin(), row.end(), [&](double v) { return v == row.front(); });
}

template <typename T>
T require(const json& doc, const char* key, std::string_view what) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ParseError(std::string(what) + ": missing key '" + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": bad value for '" + key + "': " + e.what());
  }
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void check_schema(const json& doc, std::string_view expected, std::string_view what) {
  const auto schema = require<std::string>(doc, "schema", what);
  if (schema != expected) {
    throw VersionError(std::string(what) + ": unsupported schema '" + schema + "', expected '" +
                       std::string(expected) + "'");
  }
}

void check_known_pair(const std::set<std::string>& known, const RegionPair& pair,
                      std::string_view what) {
  if (!known.contains(pair.a) || !known.contains(pair.b)) {
    throw FormatError(std::string(what) + ": edge (" + pair.a + "," + pair.b +
                      ") references an undeclared region");
  }
}

RegionPair read_pair(const json& edge, std::string_view what) {
  auto a = require<std::string>(edge, "a", what);
  auto b = require<std::string>(edge, "b", what);
  if (a == b) throw FormatError(std::string(what) + ": self-loop edge on region '" + a + "'");
  return RegionPair::make(std::move(a), std::move(b));
}

}  // namespace

std::vector<std::string> Dataset::region_ids() const {
  std::vector<std::string> ids;
  ids.reserve(regions.size());
  for (const auto& r : regions) ids.push_back(r.region_id);
  return ids;
}

const RegionTimeSeries& Dataset::region(std::string_view id) const {
  for (const auto& r : regions) {
    if (r.region_id == id) return r;
  }
  throw UsageError("unknown region '" + std::string(id) + "'");
}

RegionPair RegionPair::make(std::string x, std::string y) {
  if (x == y) throw UsageError("region pair needs two distinct regions, got '" + x + "' twice");
  if (y < x) std::swap(x, y);
  return RegionPair{std::move(x), std::move(y)};
}

std::vector<RegionPair> all_pairs(const std::vector<std::string>& ids) {
  std::vector<RegionPair> pairs;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) pairs.push_back(RegionPair::make(ids[i], ids[j]));
  }
  return pairs;
}

EdgeLabel GroundTruthNetwork::label(const RegionPair& pair) const {
  const auto it = true_inter.find(pair);
  return (it != true_inter.end() && it->second != 0.0) ? EdgeLabel::Positive : EdgeLabel::Negative;
}

std::size_t GroundTruthNetwork::positives() const {
  return static_cast<std::size_t>(std::count_if(true_inter.begin(), true_inter.end(),
                                                [](const auto& kv) { return kv.second != 0.0; }));
}

std::size_t GroundTruthNetwork::negatives() const { return true_inter.size() - positives(); }

std::size_t BinaryNetwork::detected_count() const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(),
                                                [](const auto& kv) { return kv.second.detected; }));
}

// ---------------------------------------------------------------------------
// Dataset CSV

LoadedDataset parse_dataset_csv(std::string_view text, bool drop_constant) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      line = trim(text.substr(pos, end - pos));
      pos = end + 1;
      ++line_no;
      if (!line.empty()) return true;
    }
    return false;
  };

  std::string_view header;
  if (!next_line(header)) throw FormatError("dataset: empty file");
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  const auto columns = split_fields(header);
  if (columns.size() < 3 || trim(columns[0]) != "region" || trim(columns[1]) != "voxel") {
    throw FormatError("dataset: header must start with 'region,voxel' followed by sample columns");
  }
  const auto n = static_cast<Index>(columns.size() - 2);
  if (n < kMinSamples) {
    throw FormatError("dataset: " + std::to_string(n) + " samples per series, at least " +
                      std::to_string(kMinSamples) + " required");
  }

  struct Pending {
    std::string id;
    std::vector<std::string> voxels;
    std::vector<std::vector<double>> rows;
  };
  std::vector<Pending> pending;
  std::unordered_map<std::string, std::size_t> region_index;
  std::set<std::pair<std::string, std::string>> seen;
  LoadReport report;

  std::string_view line;
  while (next_line(line)) {
    const auto fields = split_fields(line);
    const std::string where = "dataset line " + std::to_string(line_no);
    if (fields.size() != columns.size()) {
      throw FormatError(where + ": expected " + std::to_string(columns.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    std::string region(trim(fields[0]));
    std::string voxel(trim(fields[1]));
    if (region.empty()) throw FormatError(where + ": empty region id");
    if (!seen.emplace(region, voxel).second) {
      throw FormatError(where + ": duplicate voxel '" + voxel + "' in region '" + region + "'");
    }
    std::vector<double> row(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
      const double v = parse_double(trim(fields[static_cast<std::size_t>(k + 2)]),
                                    where + ", column " + std::to_string(k + 3));
      if (!std::isfinite(v)) {
        throw ParseError(where + ", column " + std::to_string(k + 3) + ": non-finite value");
      }
      row[static_cast<std::size_t>(k)] = v;
    }
    if (is_constant(row)) {
      if (!drop_constant) {
        throw DegenerateSeriesError(where + ": voxel '" + voxel + "' of region '" + region +
                                    "' is constant (correlation undefined)");
      }
      ++report.dropped;
      report.dropped_voxels.push_back(region + "/" + voxel);
      continue;
    }
    auto [it, inserted] = region_index.emplace(region, pending.size());
    if (inserted) pending.push_back(Pending{region, {}, {}});
    auto& target = pending[it->second];
    target.voxels.push_back(std::move(voxel));
    target.rows.push_back(std::move(row));
  }

  LoadedDataset out;
  out.report = std::move(report);
  for (auto& p : pending) {
    RegionTimeSeries region;
    region.region_id = std::move(p.id);
    region.voxel_ids = std::move(p.voxels);
    region.values.resize(static_cast<Index>(p.rows.size()), n);
    for (Index i = 0; i < region.values.rows(); ++i) {
      for (Index k = 0; k < n; ++k) {
        region.values(i, k) = p.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      }
    }
    out.dataset.regions.push_back(std::move(region));
  }
  if (out.dataset.regions.empty()) throw FormatError("dataset: no voxel rows");
  return out;
}

LoadedDataset load_dataset(const std::filesystem::path& path, bool drop_constant) {
  return parse_dataset_csv(read_file(path), drop_constant);
}

std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "region,voxel";
  for (Index k = 0; k < ds.samples(); ++k) out += ",t" + std::to_string(k + 1);
  out += '\n';
  for (const auto& region : ds.regions) {
    for (Index i = 0; i < region.voxels(); ++i) {
      out += region.region_id;
      out += ',';
      out += static_cast<std::size_t>(i) < region.voxel_ids.size()
                 ? region.voxel_ids[static_cast<std::size_t>(i)]
                 : "v" + std::to_string(i + 1);
      for (Index k = 0; k < region.samples(); ++k) {
        out += ',';
        out += format_double(region.values(i, k));
      }
      out += '\n';
    }
  }
  return out;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_csv(ds));
}

ValidationReport validate_dataset(const Dataset& ds) {
  ValidationReport report;
  std::set<std::string> ids;
  if (!ds.regions.empty()) report.shared_n = ds.regions.front().samples();
  for (const auto& region : ds.regions) {
    RegionFindings f;
    f.region_id = region.region_id;
    f.voxels = region.voxels();
    f.samples = region.samples();
    if (!ids.insert(region.region_id).second) report.duplicate_ids = true;
    if (f.samples != report.shared_n) report.mismatched_n = true;
    if (f.samples < kMinSamples) report.too_few_samples = true;
    if (f.voxels < 1) report.empty_region = true;
    for (Index i = 0; i < region.voxels(); ++i) {
      const auto row = region.values.row(i);
      f.nonfinite += static_cast<std::size_t>((!row.array().isFinite()).count());
      if (row.size() > 0 && (row.array() == row(0)).all()) ++f.constant_voxels;
    }
    report.constant_voxels += f.constant_voxels;
    report.nonfinite += f.nonfinite;
    report.regions.push_back(std::move(f));
  }
  report.ok = !ds.regions.empty() && !report.mismatched_n && !report.duplicate_ids &&
              !report.too_few_samples && !report.empty_region && report.constant_voxels == 0 &&
              report.nonfinite == 0;
  return report;
}

// ---------------------------------------------------------------------------
// Network JSON

std::string network_to_json(const BinaryNetwork& net) {
  json doc;
  doc["schema"] = kNetworkSchema;
  doc["exceedance_level"] = net.exceedance_level;
  doc["regions"] = net.region_ids;
  json edges = json::array();
  for (const auto& [pair, rec] : net.edges) {
    edges.push_back({{"a", pair.a},
                     {"b", pair.b},
                     {"threshold", rec.threshold},
                     {"exceedance", rec.exceedance},
                     {"detected", rec.detected}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(1) + "\n";
}

BinaryNetwork network_from_json(std::string_view text) {
  constexpr std::string_view what = "network";
  const json doc = parse_json(text, what);
  check_schema(doc, kNetworkSchema, what);
  BinaryNetwork net;
  net.exceedance_level = require<double>(doc, "exceedance_level", what);
  net.region_ids = require<std::vector<std::string>>(doc, "regions", what);
  const std::set<std::string> known(net.region_ids.begin(), net.region_ids.end());
  const auto edges = require<json>(doc, "edges", what);
  if (!edges.is_array()) throw ParseError("network: 'edges' must be an array");
  for (const auto& e : edges) {
    auto pair = read_pair(e, what);
    check_known_pair(known, pair, what);
    EdgeRecord rec{require<double>(e, "threshold", what), require<double>(e, "exceedance", what),
                   require<bool>(e, "detected", what)};
    if (!net.edges.emplace(std::move(pair), rec).second) {
      throw FormatError("network: duplicate edge");
    }
  }
  return net;
}

void save_network(const BinaryNetwork& net, const std::filesystem::path& path) {
  write_file_atomic(path, network_to_json(net));
}

BinaryNetwork load_network(const std::filesystem::path& path) {
  return network_from_json(read_file(path));
}

// ---------------------------------------------------------------------------
// Ground truth JSON

GroundTruthNetwork make_truth(std::vector<std::string> region_ids,
                              const std::map<RegionPair, double>& listed) {
  GroundTruthNetwork truth;
  const std::set<std::string> known(region_ids.begin(), region_ids.end());
  for (const auto& [pair, rho] : listed) {
    check_known_pair(known, pair, "truth");
    if (!(std::abs(rho) <= 1.0)) throw FormatError("truth: |rho| must be <= 1");
  }
  for (auto& pair : all_pairs(region_ids)) {
    const auto it = listed.find(pair);
    truth.true_inter.emplace(std::move(pair), it == listed.end() ? 0.0 : it->second);
  }
  truth.region_ids = std::move(region_ids);
  return truth;
}

std::string truth_to_json(const GroundTruthNetwork& truth) {
  json doc;
  doc["schema"] = kTruthSchema;
  doc["regions"] = truth.region_ids;
  json edges = json::array();
  for (const auto& [pair, rho] : truth.true_inter) {
    edges.push_back({{"a", pair.a}, {"b", pair.b}, {"rho", rho}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(1) + "\n";
}

GroundTruthNetwork truth_from_json(std::string_view text) {
  constexpr std::string_view what = "truth";
  const json doc = parse_json(text, what);
  check_schema(doc, kTruthSchema, what);
  auto ids = require<std::vector<std::string>>(doc, "regions", what);
  const auto edges = require<json>(doc, "edges", what);
  if (!edges.is_array()) throw ParseError("truth: 'edges' must be an array");
  std::map<RegionPair, double> listed;
  for (const auto& e : edges) {
    auto pair = read_pair(e, what);
    listed[std::move(pair)] = require<double>(e, "rho", what);
  }
  return make_truth(std::move(ids), listed);
}

void save_truth(const GroundTruthNetwork& truth, const std::filesystem::path& path) {
  write_file_atomic(path, truth_to_json(truth));
}

GroundTruthNetwork load_truth(const std::filesystem::path& path) {
  return truth_from_json(read_file(path));
}

}  // namespace corrscreen
