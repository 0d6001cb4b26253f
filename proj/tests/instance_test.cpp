#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "uplift/instance.hpp"

using namespace uplift;

namespace {

std::string read_file(const std::string& name) {
  std::ifstream in(std::string(UPLIFT_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

InstanceError::Kind error_kind(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const InstanceError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return InstanceError::Kind::Syntax;
}

}  // namespace

TEST(Instance, ParsesTable1Document) {
  const MarketInstance m = parse_instance(read_file("example2.json"));
  const MarketInstance ref = fixtures::example2();
  EXPECT_EQ(m.periods, 1);
  EXPECT_TRUE(m.two_node());
  EXPECT_DOUBLE_EQ(m.network.f_max, 50.0);
  ASSERT_EQ(m.producer_count(), 2);
  EXPECT_EQ(m.demand, ref.demand);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(m.producers[i].id, ref.producers[i].id);
    EXPECT_EQ(m.producers[i].node, ref.producers[i].node);
    EXPECT_DOUBLE_EQ(m.producers[i].g_min, ref.producers[i].g_min);
    EXPECT_DOUBLE_EQ(m.producers[i].g_max, ref.producers[i].g_max);
    EXPECT_DOUBLE_EQ(m.producers[i].a, ref.producers[i].a);
    EXPECT_DOUBLE_EQ(m.producers[i].w, ref.producers[i].w);
  }
  EXPECT_TRUE(validate(m).empty());
}

TEST(Instance, EmptyMarketIsValid) {
  const MarketInstance m = parse_instance(R"({"periods": 1, "demand": {"node1": [0]}, "producers": []})");
  EXPECT_EQ(m.producer_count(), 0);
  EXPECT_FALSE(m.two_node());
}

TEST(Instance, TopologyDefaultsToUninode) {
  const MarketInstance m = parse_instance(read_file("merit_order.json"));
  EXPECT_EQ(m.network.topology, Topology::Uninode);
  EXPECT_EQ(m.node_count(), 1);
}

TEST(Instance, ErrorKinds) {
  EXPECT_EQ(error_kind(read_file("inverted_bounds.json")), InstanceError::Kind::Validation);
  EXPECT_EQ(error_kind(read_file("malformed.json")), InstanceError::Kind::Syntax);
  EXPECT_EQ(error_kind(R"({"periods": 1, "producers": []})"), InstanceError::Kind::Schema);
  EXPECT_EQ(error_kind(R"({"periods": 2, "demand": {"node1": [1]}, "producers": []})"), InstanceError::Kind::Schema);
  EXPECT_EQ(error_kind(R"({"periods": 1, "demand": {"node1": [-1]}, "producers": []})"),
            InstanceError::Kind::Validation);
  EXPECT_EQ(error_kind(R"({"periods": 1, "demand": {"node1": [1]}, "producers": [
      {"id": "x", "node": 2, "g_min": 0, "g_max": 1, "a": 1, "w": 0}]})"),
            InstanceError::Kind::Validation);
}

TEST(Instance, LoadMissingFileFails) { EXPECT_THROW(load_instance("/nonexistent/instance.json"), InstanceError); }

TEST(Validate, NegativeDemandGivesOneRecord) {
  MarketInstance m = fixtures::table1_uninode();
  m.demand(0, 0) = -1.0;
  const auto v = validate(m);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].rule.find("nonnegative"), std::string::npos);
}

TEST(Validate, NodeOutsideTopologyGivesOneRecord) {
  MarketInstance m = fixtures::table1_uninode();
  m.producers[0].node = 2;
  const auto v = validate(m);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].field.find("node"), std::string::npos);
}

TEST(Validate, DuplicateIdsAndNegativeCommitmentCost) {
  MarketInstance m = fixtures::table1_uninode();
  m.producers[1].id = m.producers[0].id;
  m.producers[1].w = -1.0;
  EXPECT_EQ(validate(m).size(), 2u);
}

TEST(Instance, SerializeRoundTrip) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const MarketInstance m = fixtures::random_instance(rng);
    const MarketInstance back = parse_instance(serialize_instance(m));
    EXPECT_EQ(serialize_instance(back), serialize_instance(m));
    EXPECT_EQ(back.demand, m.demand);
  }
}
