#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace wsc;
using wsc::testing::random_ontology;

namespace {

Ontology vehicles() {
  return load_ontology(json::parse(R"({"concepts":[
    {"id":"Vehicle"},{"id":"Car","parent":"Vehicle"},
    {"id":"Truck","parent":"Vehicle"},{"id":"Animal"}]})"));
}

ErrorCode code_of(const std::string &doc) {
  try {
    load_ontology(json::parse(doc));
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << doc;
  return ErrorCode::io;
}

// Ancestor chains intersected directly, no shared code with Ontology.
double brute_force_similarity(const Ontology &ont, ConceptIndex a, ConceptIndex b) {
  auto chain = [&](ConceptIndex c) {
    std::vector<ConceptIndex> up{c};
    while (up.back() != Ontology::root_index) up.push_back(ont.parent_of(up.back()));
    return up;
  };
  const auto ca = chain(a), cb = chain(b);
  const std::set<ConceptIndex> sb(cb.begin(), cb.end());
  ConceptIndex lca = Ontology::root_index;
  for (ConceptIndex c : ca) {
    if (sb.count(c)) {
      lca = c;
      break;
    }
  }
  if (lca == Ontology::root_index) return 0.0;
  auto depth_of = [&](ConceptIndex c) { return static_cast<double>(chain(c).size()); };
  return 2.0 * depth_of(lca) / (depth_of(a) + depth_of(b));
}

} // namespace

TEST(Ontology, ParentChainBuildsTree) {
  auto ont = load_ontology(json::parse(R"({"concepts":[{"id":"Vehicle"},{"id":"Car","parent":"Vehicle"}]})"));
  EXPECT_EQ(ont.size(), 3u);
  EXPECT_EQ(ont.parent_of(ont.index_of("Car")), ont.index_of("Vehicle"));
  EXPECT_EQ(ont.parent_of(ont.index_of("Vehicle")), Ontology::root_index);
  EXPECT_EQ(ont.depth("Car"), 3u);
}

TEST(Ontology, DistinctErrors) {
  EXPECT_EQ(code_of(R"({"concepts":[{"id":"A","parent":"B"},{"id":"B","parent":"A"}]})"),
            ErrorCode::cycle);
  EXPECT_EQ(code_of(R"({"concepts":[{"id":"A"},{"id":"A"}]})"), ErrorCode::duplicate_id);
  EXPECT_EQ(code_of(R"({"concepts":[{"id":"A","parent":"Nope"}]})"),
            ErrorCode::unknown_concept);
  EXPECT_EQ(code_of(R"({"concepts":[{"id":"Thing"}]})"), ErrorCode::duplicate_id);
  EXPECT_EQ(code_of(R"({"concepts":{}})"), ErrorCode::schema);
}

TEST(Ontology, EmptyDocumentHoldsOnlyRoot) {
  auto ont = load_ontology(json::parse(R"({"concepts":[]})"));
  EXPECT_EQ(ont.size(), 1u);
  EXPECT_TRUE(ont.contains(kRootConcept));
}

TEST(Ontology, WuPalmerExamples) {
  const auto ont = vehicles();
  EXPECT_DOUBLE_EQ(concept_similarity(ont, "Car", "Car"), 1.0);
  EXPECT_NEAR(concept_similarity(ont, "Car", "Truck"), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(concept_similarity(ont, "Car", "Animal"), 0.0);
  EXPECT_NEAR(concept_similarity(ont, "Car", "Vehicle"), 0.8, 1e-12);
  EXPECT_THROW(concept_similarity(ont, "Car", "Boat"), Error);
}

TEST(Ontology, RoundTripIsStable) {
  const auto ont = random_ontology(40, 3);
  const auto again = load_ontology(save_ontology(ont));
  EXPECT_EQ(ont, again);
  EXPECT_EQ(jsonio::dump(save_ontology(ont)), jsonio::dump(save_ontology(again)));
  EXPECT_EQ(ont.checksum(), again.checksum());
}

class OntologyProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(OntologyProperty, MatchesBruteForceAndLaws) {
  const auto ont = random_ontology(50, GetParam());
  for (ConceptIndex a = 1; a < ont.size(); ++a) {
    EXPECT_DOUBLE_EQ(ont.similarity(a, a), 1.0);
    for (ConceptIndex b = 1; b < ont.size(); ++b) {
      const double s = ont.similarity(a, b);
      ASSERT_NEAR(s, brute_force_similarity(ont, a, b), 1e-12) << a << "," << b;
      ASSERT_EQ(s, ont.similarity(b, a));
      ASSERT_GE(s, 0.0);
      ASSERT_LE(s, 1.0);
      if (a != b) {
        ASSERT_LT(s, 1.0);
      }
    }
  }
}

TEST_P(OntologyProperty, DeeperDescendantIsLessSimilar) {
  const auto ont = random_ontology(50, GetParam());
  for (ConceptIndex d = 1; d < ont.size(); ++d) {
    std::vector<ConceptIndex> chain{d};
    while (ont.parent_of(chain.back()) != Ontology::root_index) {
      chain.push_back(ont.parent_of(chain.back()));
    }
    // chain runs from d up to a top-level concept; fix each ancestor and walk down
    for (std::size_t a = chain.size(); a-- > 0;) {
      for (std::size_t lo = a; lo-- > 1;) {
        EXPECT_GE(ont.similarity(chain[a], chain[lo]), ont.similarity(chain[a], chain[lo - 1]));
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, OntologyProperty, ::testing::Values(1u, 2u, 3u, 4u, 5u));
