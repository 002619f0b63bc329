#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "corrscreen/dataset.hpp"
#include "corrscreen/errors.hpp"
#include "corrscreen/io.hpp"
#include "corrscreen/synthesis.hpp"
#include "support.hpp"

namespace corrscreen {
namespace {

constexpr const char* kSmall =
    "region,voxel,t1,t2,t3,t4,t5\n"
    "A,a1,1,2,3,4,5\n"
    "A,a2,2,1,4,3,6\n"
    "B,b1,5,3,1,2,4\n"
    "B,b2,1e0,-2.5,3.25,+4,0\n";

TEST(LoadDataset, WellFormedTwoByTwo) {
  const auto loaded = parse_dataset_csv(kSmall);
  const auto& ds = loaded.dataset;
  ASSERT_EQ(ds.regions.size(), 2u);
  EXPECT_EQ(ds.regions[0].region_id, "A");
  EXPECT_EQ(ds.regions[0].voxels(), 2);
  EXPECT_EQ(ds.regions[1].voxels(), 2);
  EXPECT_EQ(ds.samples(), 5);
  EXPECT_EQ(ds.region("B").voxel_ids[1], "b2");
  EXPECT_DOUBLE_EQ(ds.region("B").values(1, 1), -2.5);
  EXPECT_DOUBLE_EQ(ds.region("B").values(1, 3), 4.0);
  EXPECT_EQ(loaded.report.dropped, 0u);
}

TEST(LoadDataset, RaggedRowIsFormatError) {
  EXPECT_THROW(parse_dataset_csv("region,voxel,t1,t2,t3,t4,t5\nA,a1,1,2,3,4\n"), FormatError);
}

TEST(LoadDataset, ConstantVoxel) {
  const std::string text = std::string(kSmall) + "B,b3,3,3,3,3,3\n";
  EXPECT_THROW(parse_dataset_csv(text), DegenerateSeriesError);
  const auto loaded = parse_dataset_csv(text, true);
  EXPECT_EQ(loaded.report.dropped, 1u);
  EXPECT_EQ(loaded.dataset.region("B").voxels(), 2);
  ASSERT_EQ(loaded.report.dropped_voxels.size(), 1u);
  EXPECT_EQ(loaded.report.dropped_voxels[0], "B/b3");
}

TEST(LoadDataset, Rejections) {
  EXPECT_THROW(parse_dataset_csv(""), FormatError);
  EXPECT_THROW(parse_dataset_csv("zone,voxel,t1,t2,t3,t4,t5\nA,a1,1,2,3,4,5\n"), FormatError);
  EXPECT_THROW(parse_dataset_csv("region,voxel,t1,t2,t3,t4\nA,a1,1,2,3,4\n"), FormatError);
  EXPECT_THROW(parse_dataset_csv("region,voxel,t1,t2,t3,t4,t5\nA,a1,1,2,x,4,5\n"), ParseError);
  EXPECT_THROW(parse_dataset_csv("region,voxel,t1,t2,t3,t4,t5\nA,a1,1,2,nan,4,5\n"), ParseError);
  EXPECT_THROW(parse_dataset_csv("region,voxel,t1,t2,t3,t4,t5\nA,a1,1,2,3,4,5\nA,a1,2,1,3,4,5\n"),
               FormatError);
}

TEST(LoadDataset, SaveLoadIsExactForGeneratedData) {
  SimulationConfig config;
  config.regions = {{"X", 4, 0.5}, {"Y", 3, 0.2}};
  config.inter[RegionPair::make("X", "Y")] = 0.1;
  config.n = 12;
  config.seed = 11;
  const auto data = generate_dataset(config);
  const auto path = std::filesystem::temp_directory_path() / "corrscreen_roundtrip.csv";
  save_dataset(data.dataset, path);
  const auto back = load_dataset(path).dataset;
  std::filesystem::remove(path);
  ASSERT_EQ(back.regions.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back.regions[k].region_id, data.dataset.regions[k].region_id);
    EXPECT_EQ(back.regions[k].voxel_ids, data.dataset.regions[k].voxel_ids);
    EXPECT_TRUE(back.regions[k].values == data.dataset.regions[k].values);
  }
}

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.9, 5e-324}) {
    EXPECT_EQ(parse_double(format_double(v), "test"), v);
  }
  EXPECT_EQ(format_double(0.9), "0.9");
}

TEST(RegionPair, Canonical) {
  EXPECT_EQ(RegionPair::make("b", "a"), RegionPair::make("a", "b"));
  EXPECT_EQ(RegionPair::make("b", "a").a, "a");
  EXPECT_THROW(RegionPair::make("a", "a"), UsageError);
  EXPECT_EQ(all_pairs({"x", "y", "z", "w"}).size(), 6u);
}

BinaryNetwork network_of(std::size_t regions) {
  BinaryNetwork net;
  for (std::size_t k = 0; k < regions; ++k) net.region_ids.push_back("R" + std::to_string(k));
  int k = 0;
  for (const auto& pair : all_pairs(net.region_ids)) {
    net.edges[pair] = EdgeRecord{0.1 * k, 1.0 / (k + 3), k % 3 == 0};
    ++k;
  }
  return net;
}

TEST(NetworkJson, EmptyRoundTrip) {
  BinaryNetwork net;
  net.region_ids = {"A"};
  EXPECT_EQ(network_from_json(network_to_json(net)), net);
}

TEST(NetworkJson, FortyFiveEdgeRoundTrip) {
  const auto net = network_of(10);
  ASSERT_EQ(net.edges.size(), 45u);
  EXPECT_EQ(network_from_json(network_to_json(net)), net);
}

TEST(NetworkJson, Errors) {
  EXPECT_THROW(network_from_json(R"({"schema":"corrscreen-net/1","exceedance_level":0.05,"regions":[]})"),
               ParseError);
  EXPECT_THROW(network_from_json("{not json"), ParseError);
  EXPECT_THROW(network_from_json(R"({"schema":"corrscreen-net/9","exceedance_level":0.05,"regions":[],"edges":[]})"),
               VersionError);
  EXPECT_THROW(network_from_json(R"({"schema":"corrscreen-net/1","exceedance_level":0.05,"regions":["A"],
      "edges":[{"a":"A","b":"A","threshold":0,"exceedance":0,"detected":false}]})"),
               FormatError);
  EXPECT_THROW(network_from_json(R"({"schema":"corrscreen-net/1","exceedance_level":0.05,"regions":["A"],
      "edges":[{"a":"A","b":"Z","threshold":0,"exceedance":0,"detected":false}]})"),
               FormatError);
}

TEST(TruthJson, RoundTripAndDefaults) {
  std::map<RegionPair, double> listed{{RegionPair::make("A", "B"), 0.2}};
  const auto truth = make_truth({"A", "B", "C"}, listed);
  EXPECT_EQ(truth.true_inter.size(), 3u);
  EXPECT_EQ(truth.positives(), 1u);
  EXPECT_EQ(truth.negatives(), 2u);
  EXPECT_EQ(truth.label(RegionPair::make("C", "A")), EdgeLabel::Negative);
  EXPECT_EQ(truth_from_json(truth_to_json(truth)), truth);
}

TEST(ValidateDataset, CleanNanAndMismatch) {
  auto ds = parse_dataset_csv(kSmall).dataset;
  auto report = validate_dataset(ds);
  EXPECT_TRUE(report.ok);
  EXPECT_EQ(report.nonfinite, 0u);
  EXPECT_EQ(report.constant_voxels, 0u);
  EXPECT_FALSE(report.mismatched_n);

  auto with_nan = ds;
  with_nan.regions[0].values(0, 2) = std::numeric_limits<double>::quiet_NaN();
  report = validate_dataset(with_nan);
  EXPECT_FALSE(report.ok);
  EXPECT_EQ(report.nonfinite, 1u);

  Dataset mixed;
  mixed.regions.push_back(testing::make_region("A", testing::random_matrix(2, 100, 1)));
  mixed.regions.push_back(testing::make_region("B", testing::random_matrix(2, 99, 2)));
  report = validate_dataset(mixed);
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(report.mismatched_n);
}

}  // namespace
}  // namespace corrscreen
