#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace wsc;
using namespace wsc::testing;

namespace {

Ontology vehicles() {
  return load_ontology(json::parse(R"({"concepts":[
    {"id":"Vehicle"},{"id":"Car","parent":"Vehicle"},
    {"id":"Truck","parent":"Vehicle"},{"id":"Animal"}]})"));
}

std::set<ServiceId> leaf_members(const ClusterTree &tree) {
  std::set<ServiceId> all;
  for (auto leaf : tree.leaf_clusters()) {
    for (const auto &m : tree.node(leaf).members) EXPECT_TRUE(all.insert(m).second) << m;
  }
  return all;
}

std::set<ServiceId> registry_ids(const Registry &reg) {
  std::set<ServiceId> ids;
  for (const auto &s : reg.services()) ids.insert(s.id);
  return ids;
}

std::set<ServiceId> subtree_members(const ClusterTree &tree, ClusterTree::NodeId n) {
  const auto &nd = tree.node(n);
  std::set<ServiceId> out(nd.members.begin(), nd.members.end());
  for (auto c : nd.children) out.merge(subtree_members(tree, c));
  return out;
}

void expect_sound(const ClusterTree &tree, const Registry &reg) {
  EXPECT_EQ(tree.check_invariants(), std::vector<std::string>{});
  EXPECT_EQ(leaf_members(tree), registry_ids(reg));
}

} // namespace

TEST(Signature, SimilarityExamples) {
  const auto ont = vehicles();
  const auto a = service_signature(ont, make_service("a", {"Car"}, {"Truck"}));
  const auto b = service_signature(ont, make_service("b", {"Truck"}, {"Truck"}));
  const auto c = service_signature(ont, make_service("c", {"Animal"}, {"Animal"}));
  EXPECT_DOUBLE_EQ(signature_similarity(ont, a, a), 1.0);
  EXPECT_DOUBLE_EQ(signature_similarity(ont, a, c), 0.0);
  EXPECT_NEAR(signature_similarity(ont, a, b), (2.0 / 3.0 + 1.0) / 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(coverage(ont, {}, {}), 1.0);
  EXPECT_DOUBLE_EQ(coverage(ont, a.in_freq, {}), 0.0);
}

TEST(BuildTree, SingleServiceIsOneLeaf) {
  const auto ont = vehicles();
  Registry reg;
  reg.add(ont, make_service("a", {"Car"}, {"Truck"}));
  const auto tree = build_tree(reg, ont, 10);
  ASSERT_EQ(tree.leaf_clusters().size(), 1u);
  EXPECT_TRUE(tree.node(tree.root()).is_leaf());
  expect_sound(tree, reg);
  EXPECT_THROW(build_tree(Registry{}, ont, 10), Error);
}

TEST(BuildTree, IdenticalPairSharesLeaf) {
  const auto ont = vehicles();
  Registry reg;
  reg.add(ont, make_service("a", {"Car"}, {"Truck"}));
  reg.add(ont, make_service("b", {"Car"}, {"Truck"}));
  const auto tree = build_tree(reg, ont, 10);
  ASSERT_EQ(tree.leaf_clusters().size(), 1u);
  EXPECT_EQ(tree.node(tree.leaf_clusters()[0]).members, (std::vector<ServiceId>{"a", "b"}));
}

TEST(BuildTree, TwoFamiliesSplitAtRoot) {
  const auto fx = load_fixture("families");
  // the fixture is built so that cross-family similarity is exactly zero
  for (const auto &a : fx.registry.services()) {
    for (const auto &b : fx.registry.services()) {
      if (a.id[0] != b.id[0]) {
        ASSERT_DOUBLE_EQ(signature_similarity(fx.ontology, service_signature(fx.ontology, a),
                                              service_signature(fx.ontology, b)),
                         0.0);
      }
    }
  }
  const auto tree = build_tree(fx.registry, fx.ontology, 4);
  expect_sound(tree, fx.registry);
  const auto &root = tree.node(tree.root());
  ASSERT_EQ(root.children.size(), 2u);
  std::set<char> fam0, fam1;
  for (const auto &m : subtree_members(tree, root.children[0])) fam0.insert(m[0]);
  for (const auto &m : subtree_members(tree, root.children[1])) fam1.insert(m[0]);
  EXPECT_EQ(fam0.size(), 1u);
  EXPECT_EQ(fam1.size(), 1u);
  EXPECT_NE(*fam0.begin(), *fam1.begin());
}

TEST(BuildTree, LeavesAreMaximalSubtreesWithinCap) {
  const auto ont = random_ontology(40, 5);
  const auto reg = random_registry(ont, 60, 6);
  for (std::size_t L : {1u, 3u, 10u, 100u}) {
    const auto tree = build_tree(reg, ont, L);
    expect_sound(tree, reg);
    for (auto leaf : tree.leaf_clusters()) {
      EXPECT_LE(tree.node(leaf).members.size(), L);
      const auto parent = tree.node(leaf).parent;
      if (parent != ClusterTree::npos) {
        EXPECT_GT(tree.node(parent).service_count, L);
      }
    }
  }
}

TEST(BuildTree, DeterministicAndJsonRoundTrip) {
  const auto ont = random_ontology(40, 8);
  const auto reg = random_registry(ont, 50, 9);
  const auto a = build_tree(reg, ont, 5), b = build_tree(reg, ont, 5);
  EXPECT_EQ(jsonio::dump(tree_to_json(a, ont)), jsonio::dump(tree_to_json(b, ont)));
  const auto c = tree_from_json(tree_to_json(a, ont), reg, ont);
  EXPECT_EQ(jsonio::dump(tree_to_json(c, ont)), jsonio::dump(tree_to_json(a, ont)));
  expect_sound(c, reg);
}

TEST(InsertService, GrowsSmallLeafInPlace) {
  const auto ont = vehicles();
  Registry reg;
  reg.add(ont, make_service("a", {"Car"}, {"Truck"}));
  reg.add(ont, make_service("b", {"Truck"}, {"Car"}));
  auto tree = build_tree(reg, ont, 10);
  const auto nodes = tree.node_count();
  const auto svc = make_service("c", {"Vehicle"}, {"Car"});
  reg.add(ont, svc);
  insert_service(tree, ont, svc);
  EXPECT_EQ(tree.node_count(), nodes);
  EXPECT_EQ(tree.node(tree.leaf_clusters()[0]).members.size(), 3u);
  expect_sound(tree, reg);
  EXPECT_THROW(insert_service(tree, ont, svc), Error);
}

TEST(InsertService, VehicleServiceLandsInVehicleSubtree) {
  const auto fx = load_fixture("families");
  auto tree = build_tree(fx.registry, fx.ontology, 4);
  const auto svc = make_service("v99", {"Sedan"}, {"Pickup"});
  insert_service(tree, fx.ontology, svc);
  const auto &root = tree.node(tree.root());
  for (auto c : root.children) {
    const auto members = subtree_members(tree, c);
    if (members.count("v99")) {
      for (const auto &m : members) EXPECT_EQ(m[0], 'v') << m;
    }
  }
  expect_sound(tree, publish(fx.registry, fx.ontology, svc));
}

TEST(InsertService, OverfullLeafSplits) {
  const auto ont = vehicles();
  Registry reg;
  reg.add(ont, make_service("a0", {"Car"}, {"Truck"}));
  auto tree = build_tree(reg, ont, 2);
  for (int i = 1; i <= 4; ++i) {
    auto svc = make_service("a" + std::to_string(i), {i % 2 ? "Car" : "Truck"}, {"Truck"});
    reg.add(ont, svc);
    insert_service(tree, ont, svc);
  }
  // five services with cap 2 overflow the single leaf (2L = 4)
  EXPECT_GT(tree.leaf_clusters().size(), 1u);
  for (auto leaf : tree.leaf_clusters()) EXPECT_LE(tree.node(leaf).members.size(), 2u);
  expect_sound(tree, reg);
}

TEST(Retrieval, SingleServiceTree) {
  const auto ont = vehicles();
  Registry reg;
  reg.add(ont, make_service("a", {"Car"}, {"Truck"}));
  const auto tree = build_tree(reg, ont, 10);
  const auto r = find_initial_services(tree, ont, Request{{"Car"}, {"Truck"}}, 0.7, 3);
  ASSERT_EQ(r.services.size(), 1u);
  EXPECT_EQ(r.services[0].id, "a");
  EXPECT_EQ(r.comparisons, 1u);
}

TEST(Retrieval, WideBeamEqualsLinearScan) {
  const auto fx = load_fixture("families");
  const auto tree = build_tree(fx.registry, fx.ontology, 4);
  const std::size_t k = tree.leaf_clusters().size();
  for (const auto &svc : fx.registry.services()) {
    Request req{svc.inputs, svc.outputs};
    const auto t = find_initial_services(tree, fx.ontology, req, 0.0, k);
    const auto l = linear_scan(fx.registry, fx.ontology, req, 0.0);
    EXPECT_EQ(t.services, l.services);
    EXPECT_EQ(l.comparisons, fx.registry.size());
  }
}

class ClusterProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(ClusterProperty, InsertionsPreserveInvariants) {
  const auto ont = random_ontology(40, GetParam());
  const auto full = random_registry(ont, 120, GetParam() + 50);
  Registry reg;
  for (std::size_t i = 0; i < 10; ++i) reg.add(ont, full.services()[i]);
  auto tree = build_tree(reg, ont, 3);
  for (std::size_t i = 10; i < full.size(); ++i) {
    reg.add(ont, full.services()[i]);
    insert_service(tree, ont, full.services()[i]);
    if (i % 10 == 0) expect_sound(tree, reg);
  }
  expect_sound(tree, reg);
}

TEST_P(ClusterProperty, RetrievalSoundBoundedAndBeamMonotone) {
  const auto ont = random_ontology(60, GetParam());
  const auto reg = random_registry(ont, 150, GetParam() + 77);
  const auto tree = build_tree(reg, ont, 5);
  std::mt19937_64 rng(GetParam());
  for (int q = 0; q < 10; ++q) {
    Request req{random_concepts(ont, rng, 1, 3), random_concepts(ont, rng, 1, 2)};
    const auto linear = linear_scan(reg, ont, req, 0.5);
    std::set<ServiceId> relevant;
    for (const auto &r : linear.services) relevant.insert(r.id);
    std::size_t prev_hits = 0;
    for (std::size_t k = 1; k <= 12; ++k) {
      const auto r = find_initial_services(tree, ont, req, 0.5, k);
      std::size_t hits = 0;
      for (const auto &s : r.services) {
        const double inv = invokability_score(
            ont, service_signature(ont, reg.at(s.id)).in_freq,
            request_signature(ont, req).in_freq);
        EXPECT_DOUBLE_EQ(inv, s.score);
        EXPECT_TRUE(meets_threshold(inv, 0.5));
        hits += relevant.count(s.id);
      }
      // best-first opening: a wider beam opens a superset of leaves
      EXPECT_GE(hits, prev_hits);
      prev_hits = hits;
      EXPECT_LE(r.leaves_opened.size(), k);
      std::size_t bound = 0;
      for (auto leaf : r.leaves_opened) bound += tree.node(leaf).members.size();
      EXPECT_GE(r.comparisons, bound);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ClusterProperty, ::testing::Range<std::uint64_t>(1, 6));
