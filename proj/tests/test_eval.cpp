#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace wsc;
using namespace wsc::testing;

TEST(Metrics, Examples) {
  const ServiceSet a{"s1", "s2", "s3"}, b{"s2", "s3", "s4", "s5"};
  EXPECT_DOUBLE_EQ(*precision(a, b), 0.5);
  EXPECT_NEAR(*recall(a, b), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(*precision(a, a), 1.0);
  EXPECT_DOUBLE_EQ(*recall(a, a), 1.0);
  EXPECT_FALSE(precision(a, {}).has_value());
  EXPECT_DOUBLE_EQ(*recall(a, {}), 0.0);
  EXPECT_FALSE(recall({}, b).has_value());
}

TEST(Metrics, RandomPairsMatchSetArithmetic) {
  std::mt19937_64 rng(2024);
  std::bernoulli_distribution coin(0.4);
  for (int t = 0; t < 200; ++t) {
    ServiceSet a, b;
    for (int i = 0; i < 30; ++i) {
      if (coin(rng)) a.insert("s" + std::to_string(i));
      if (coin(rng)) b.insert("s" + std::to_string(i));
    }
    ServiceSet both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
    EXPECT_EQ(intersection_size(a, b), both.size());
    const auto p = precision(a, b), r = recall(a, b);
    ASSERT_EQ(p.has_value(), !b.empty());
    ASSERT_EQ(r.has_value(), !a.empty());
    if (p) {
      EXPECT_EQ(*p, static_cast<double>(both.size()) / static_cast<double>(b.size()));
    }
    if (r) {
      EXPECT_EQ(*r, static_cast<double>(both.size()) / static_cast<double>(a.size()));
    }
    EXPECT_LE(both.size(), std::min(a.size(), b.size()));
    const auto disjoint_b = [&] {
      ServiceSet d;
      for (const auto &x : b) if (!a.count(x)) d.insert(x);
      return d;
    }();
    if (!a.empty() && !disjoint_b.empty()) {
      EXPECT_EQ(*precision(a, disjoint_b), 0.0);
      EXPECT_EQ(*recall(a, disjoint_b), 0.0);
    }
  }
}

TEST(RetrievalBenchmark, SingleService) {
  const auto ont = load_ontology(json::parse(R"({"concepts":[{"id":"A"},{"id":"B"}]})"));
  Registry reg;
  reg.add(ont, make_service("x", {"A"}, {"B"}));
  const auto rep = retrieval_benchmark(reg, ont, std::vector<Request>{{{"A"}, {"B"}}}, 10, 3, 0.7);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].tree_comparisons, 1u);
  EXPECT_EQ(rep.rows[0].linear_comparisons, 1u);
}

TEST(RetrievalBenchmark, FullBeamHasPerfectRecall) {
  GenParams g;
  g.n_services = 120;
  g.n_concepts = 120;
  g.n_requests = 20;
  g.seed = 3;
  const auto ds = generate_dataset(g);
  const auto tree = build_tree(ds.registry, ds.ontology, 5);
  const auto rep = retrieval_benchmark(ds.registry, ds.ontology, tree, ds.requests,
                                       tree.leaf_clusters().size(), 0.7);
  for (const auto &row : rep.rows) {
    if (row.recall) {
      EXPECT_DOUBLE_EQ(*row.recall, 1.0);
    }
    if (row.precision) {
      EXPECT_DOUBLE_EQ(*row.precision, 1.0);
    }
    EXPECT_EQ(row.linear_comparisons, ds.registry.size());
  }
  const auto doc = retrieval_report_to_json(rep);
  EXPECT_TRUE(doc.contains("rows"));
  EXPECT_EQ(retrieval_report_table(rep).substr(0, 7), "request");
}

TEST(Optimality, SinglePathInstancesAreAlwaysOptimal) {
  // chain_density 0 leaves only the planted chain reachable for request 0
  GenParams g;
  g.n_services = 6;
  g.chain_density = 0.0;
  AcoParams a;
  a.n_iterations = 20;
  const auto rep = optimality_experiment(g, a, 5, 3);
  EXPECT_EQ(rep.rows.size(), 15u);
  for (const auto &row : rep.rows) EXPECT_TRUE(row.oracle_score.has_value());
  EXPECT_DOUBLE_EQ(rep.optimal_fraction, 1.0);
}

TEST(Optimality, ZeroIterationBudget) {
  GenParams g;
  g.n_services = 8;
  AcoParams a;
  a.n_iterations = 0;
  const auto rep = optimality_experiment(g, a, 4, 2);
  EXPECT_DOUBLE_EQ(rep.optimal_fraction, 0.0);
  EXPECT_FALSE(rep.mean_iterations_to_optimum.has_value());
  EXPECT_TRUE(optimality_report_to_json(rep).contains("optimal_fraction"));
}
