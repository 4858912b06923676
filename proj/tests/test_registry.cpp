#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace wsc;
using namespace wsc::testing;

namespace {

Ontology small() {
  return load_ontology(json::parse(R"({"concepts":[
    {"id":"Vehicle"},{"id":"Car","parent":"Vehicle"},{"id":"Truck","parent":"Vehicle"}]})"));
}

} // namespace

TEST(Registry, EmptyDocument) {
  const auto ont = small();
  const auto reg = load_registry(json::parse(R"({"ontology":"x","services":[]})"), ont);
  EXPECT_EQ(reg.size(), 0u);
}

TEST(Registry, DuplicateIdsRejected) {
  const auto ont = small();
  const auto doc = json::parse(R"({"ontology":"x","services":[
    {"id":"a","inputs":[],"outputs":["Car"],"qos":{"response_time_ms":1,"cost":1,"availability":1,"reliability":1}},
    {"id":"a","inputs":[],"outputs":["Car"],"qos":{"response_time_ms":1,"cost":1,"availability":1,"reliability":1}}]})");
  try {
    load_registry(doc, ont);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::duplicate_id);
  }
}

TEST(Registry, SchemaAndValueErrors) {
  const auto ont = small();
  EXPECT_THROW(load_registry(json::parse(R"({"services":[]})"), ont), Error);
  EXPECT_THROW(load_registry(json::parse(R"({"ontology":"x","services":[{"id":"a"}]})"), ont),
               Error);
  auto bad = make_service("a", {}, {"Car"}, QosVector{10, 1, 1.5, 0.9});
  Registry reg;
  EXPECT_THROW(reg.add(ont, bad), Error);
  EXPECT_THROW(reg.add(ont, make_service("b", {}, {}, {})), Error);
}

TEST(Registry, MismatchedOntologyChecksumRejected) {
  const auto fx = load_fixture("gen20");
  auto doc = jsonio::read_json_file(fixture("gen20/registry.json"));
  EXPECT_NO_THROW(load_registry(doc, fx.ontology));
  EXPECT_THROW(load_registry(doc, small()), Error);
}

TEST(Registry, ShippedFixtureRoundTripsByteIdentical) {
  const auto fx = load_fixture("gen20");
  EXPECT_EQ(fx.registry.size(), 20u);
  const std::string on_disk = slurp(fixture("gen20/registry.json"));
  EXPECT_EQ(jsonio::dump(save_registry(fx.registry)), on_disk);
  EXPECT_EQ(load_registry(save_registry(fx.registry), fx.ontology), fx.registry);
}

TEST(Registry, Publish) {
  const auto ont = small();
  Registry empty;
  const auto one = publish(empty, ont, make_service("a", {"Car"}, {"Truck"}));
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(empty.size(), 0u);

  Registry before = one;
  EXPECT_THROW(publish(one, ont, make_service("a", {}, {"Car"})), Error);
  EXPECT_EQ(one, before);

  try {
    publish(one, ont, make_service("b", {}, {"Boat"}));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_concept);
    EXPECT_NE(std::string(e.what()).find("Boat"), std::string::npos);
  }
}

TEST(QosUtility, Examples) {
  const auto ont = small();
  Registry reg;
  reg.add(ont, make_service("A", {}, {"Car"}, QosVector{100, 10, 0.9, 0.9}));
  EXPECT_DOUBLE_EQ(qos_utility(reg, "A"), 1.0);
  reg.add(ont, make_service("B", {}, {"Car"}, QosVector{300, 30, 0.6, 0.6}));
  EXPECT_DOUBLE_EQ(qos_utility(reg, "A"), 1.0);
  EXPECT_DOUBLE_EQ(qos_utility(reg, "B"), 0.0);
  EXPECT_THROW(qos_utility(reg, "C"), Error);
}

TEST(QosUtility, RangeAffineInvarianceAndPareto) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rt(10, 1000), cost(0, 50), av(0.8, 1.0);
  const auto ont = small();
  for (int trial = 0; trial < 50; ++trial) {
    Registry reg, scaled;
    for (int i = 0; i < 8; ++i) {
      QosVector q{rt(rng), cost(rng), av(rng), av(rng)};
      reg.add(ont, make_service("s" + std::to_string(i), {}, {"Car"}, q));
      // positive affine maps on rt and cost keep availability-type bounds valid
      QosVector s{3 * q.response_time_ms + 7, 2 * q.cost + 1, q.availability, q.reliability};
      scaled.add(ont, make_service("s" + std::to_string(i), {}, {"Car"}, s));
    }
    const auto u = qos_utilities(reg), v = qos_utilities(scaled);
    for (std::size_t i = 0; i < u.size(); ++i) {
      EXPECT_GE(u[i], 0.0);
      EXPECT_LE(u[i], 1.0);
      EXPECT_NEAR(u[i], v[i], 1e-12);
      for (std::size_t j = 0; j < u.size(); ++j) {
        const auto &a = reg.services()[i].qos, &b = reg.services()[j].qos;
        const bool dominates = a.response_time_ms <= b.response_time_ms && a.cost <= b.cost &&
                               a.availability >= b.availability &&
                               a.reliability >= b.reliability;
        if (dominates) {
          EXPECT_GE(u[i], u[j]);
        }
      }
    }
  }
}
