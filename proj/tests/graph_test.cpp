#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phenocausal/graph.hpp"

using namespace phenocausal;

namespace {

Dag chain3() { return Dag({"X", "Y", "Z"}, {{"X", "Y"}, {"Y", "Z"}}); }

// Enumerates all (a, b, c) role assignments on n nodes with a, b nonempty.
template <class F>
void for_each_triple(std::size_t n, F&& f) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 4;
  for (std::size_t code = 0; code < total; ++code) {
    NodeSet a, b, c;
    std::size_t x = code;
    for (NodeId i = 0; i < n; ++i, x /= 4) {
      if (x % 4 == 1) a.insert(i);
      if (x % 4 == 2) b.insert(i);
      if (x % 4 == 3) c.insert(i);
    }
    if (!a.empty() && !b.empty()) f(a, b, c);
  }
}

}  // namespace

TEST(Dag, RejectsMalformedGraphs) {
  EXPECT_THROW(Dag({"A", "B"}, {{"A", "B"}, {"B", "A"}}), CycleError);
  EXPECT_THROW(Dag({"A"}, {{"A", "A"}}), InvalidArgument);
  EXPECT_THROW(Dag({"A", "B"}, {{"A", "B"}, {"A", "B"}}), InvalidArgument);
  EXPECT_THROW(Dag({"A", "B"}, {{"A", "C"}}), InvalidArgument);
  EXPECT_THROW(Dag({"A", "A"}), InvalidArgument);
}

TEST(Dag, TopologicalOrderIsStable) {
  Dag g({"C", "B", "A"}, {{"A", "B"}, {"B", "C"}});
  EXPECT_EQ(g.topological_order(), (std::vector<NodeId>{2, 1, 0}));
}

TEST(Dag, EnumerationCountsMatchKnownSequence) {
  // Labeled DAG counts: 1, 3, 25, 543.
  EXPECT_EQ(enumerate_dags(default_names(1)).size(), 1u);
  EXPECT_EQ(enumerate_dags(default_names(2)).size(), 3u);
  EXPECT_EQ(enumerate_dags(default_names(3)).size(), 25u);
  EXPECT_EQ(enumerate_dags(default_names(4)).size(), 543u);
  EXPECT_THROW(enumerate_dags(default_names(6)), CapExceeded);
}

TEST(DSeparation, BlockedChain) {
  auto g = chain3();
  EXPECT_TRUE(d_separated(g, g.set({"X"}), g.set({"Z"}), g.set({"Y"})));
  EXPECT_FALSE(d_separated(g, g.set({"X"}), g.set({"Z"}), {}));
}

TEST(DSeparation, ConditioningOpensCollider) {
  Dag g({"X", "Y", "Z"}, {{"X", "Z"}, {"Y", "Z"}});
  EXPECT_FALSE(d_separated(g, g.set({"X"}), g.set({"Y"}), g.set({"Z"})));
  EXPECT_TRUE(d_separated(g, g.set({"X"}), g.set({"Y"}), {}));
}

TEST(DSeparation, DescendantOfColliderOpensIt) {
  Dag g({"X", "Y", "Z", "W"}, {{"X", "Z"}, {"Y", "Z"}, {"Z", "W"}});
  EXPECT_FALSE(d_separated(g, g.set({"X"}), g.set({"Y"}), g.set({"W"})));
}

TEST(DSeparation, DescendingCompleteGraphDirectEdge) {
  auto g = oracle::descending_complete(5);
  EXPECT_FALSE(d_separated(g, g.set({"K5"}), g.set({"K3"}), g.set({"K4"})));
}

TEST(DSeparation, OverlappingSetsAreRejected) {
  auto g = chain3();
  EXPECT_THROW(d_separated(g, g.set({"X"}), g.set({"X"}), {}), InvalidArgument);
  EXPECT_THROW(d_separated(g, g.set({"X"}), g.set({"Z"}), g.set({"Z"})), InvalidArgument);
}

TEST(DSeparation, MatchesPathEnumerationOnRandomGraphs) {
  CounterRng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = random_dag(default_names(5), 0.45, rng);
    for_each_triple(g.size(), [&](const NodeSet& a, const NodeSet& b, const NodeSet& c) {
      ASSERT_EQ(d_separated(g, a, b, c), oracle::d_separated(g, a, b, c));
    });
  }
}

TEST(DSeparation, IsSymmetric) {
  CounterRng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_dag(default_names(5), 0.5, rng);
    for_each_triple(g.size(), [&](const NodeSet& a, const NodeSet& b, const NodeSet& c) {
      ASSERT_EQ(d_separated(g, a, b, c), d_separated(g, b, a, c));
    });
  }
}

TEST(Sufficiency, ForkWithAndWithoutCommonCause) {
  Dag g({"X", "C", "Y"}, {{"C", "X"}, {"C", "Y"}});
  EXPECT_FALSE(is_graphically_causally_sufficient(g, g.set({"X", "Y"})));
  EXPECT_TRUE(is_graphically_causally_sufficient(g, g.set({"X", "C", "Y"})));
}

TEST(Sufficiency, ChainEndpoints) {
  Dag g({"X1", "X2", "X3"}, {{"X1", "X2"}, {"X2", "X3"}});
  EXPECT_TRUE(is_graphically_causally_sufficient(g, g.set({"X1", "X3"})));
}

TEST(Sufficiency, MatchesOracleOnRandomGraphs) {
  CounterRng rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = random_dag(default_names(6), 0.4, rng);
    for (std::uint64_t m = 0; m < (1u << g.size()); ++m) {
      auto s = NodeSet::from_mask(m);
      ASSERT_EQ(is_graphically_causally_sufficient(g, s), oracle::sufficient(g, s));
    }
  }
}

TEST(MarginalDag, ActionNodeMovesToChildOfDroppedNode) {
  Dag g({"X1", "X2", "X3", "I"}, {{"X1", "X2"}, {"X2", "X3"}, {"I", "X2"}});
  auto m = marginal_dag(g, g.set({"X1", "X3", "I"}));
  EXPECT_EQ(m.names(), (std::vector<std::string>{"X1", "X3", "I"}));
  EXPECT_EQ(m.named_edges(), (std::vector<NamedEdge>{{"X1", "X3"}, {"I", "X3"}}));
}

TEST(MarginalDag, FullSetIsIdentity) {
  CounterRng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_dag(default_names(6), 0.4, rng);
    EXPECT_EQ(marginal_dag(g, g.all()), g);
  }
}

TEST(MarginalDag, DroppingK4OfDescendingGraphViolatesSufficiency) {
  // K4 feeds K3, K2 and K1 directly, so it is a hidden common cause of the
  // retained set; the checked projection refuses and names it.
  auto g = oracle::descending_complete(5);
  auto s = g.set({"K5", "K3", "K2", "K1"});
  EXPECT_FALSE(is_graphically_causally_sufficient(g, s));
  try {
    marginal_dag(g, s);
    FAIL() << "expected SufficiencyViolation";
  } catch (const SufficiencyViolation& e) {
    EXPECT_EQ(e.hidden_cause(), "K4");
  }
  // The unchecked path collapse matches directed-path enumeration.
  auto collapsed = collapse_directed_paths(g, s);
  auto expected = oracle::collapsed_edges(g, s);
  std::sort(expected.begin(), expected.end());
  auto got = collapsed.named_edges();
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, expected);
  EXPECT_TRUE(collapsed.has_edge("K5", "K3"));
}

TEST(MarginalDag, MatchesPathEnumerationAndPreservesSeparation) {
  CounterRng rng(15);
  int checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    auto g = random_dag(default_names(6), 0.4, rng);
    for (std::uint64_t m = 1; m < (1u << g.size()); ++m) {
      auto s = NodeSet::from_mask(m);
      if (!is_graphically_causally_sufficient(g, s)) continue;
      auto gs = marginal_dag(g, s);
      auto expected = oracle::collapsed_edges(g, s);
      std::sort(expected.begin(), expected.end());
      auto got = gs.named_edges();
      std::sort(got.begin(), got.end());
      ASSERT_EQ(got, expected);
      if (s.size() > 4) continue;
      // Separation in g among members of s carries over to the marginal DAG.
      for_each_triple(s.size(), [&](const NodeSet& a, const NodeSet& b, const NodeSet& c) {
        auto lift = [&](const NodeSet& x) {
          NodeSet r;
          for (auto i : x) r.insert(s[i]);
          return r;
        };
        if (d_separated(g, lift(a), lift(b), lift(c))) {
          ASSERT_TRUE(d_separated(gs, a, b, c));
        }
      });
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(MarginalDag, NestedMarginalizationIsIdempotent) {
  CounterRng rng(16);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto g = random_dag(default_names(6), 0.4, rng);
    for (std::uint64_t m = 1; m < (1u << g.size()); ++m) {
      auto s = NodeSet::from_mask(m);
      if (!is_graphically_causally_sufficient(g, s)) continue;
      auto gs = marginal_dag(g, s);
      for (std::uint64_t m2 = 1; m2 < (1u << s.size()); ++m2) {
        auto inner = NodeSet::from_mask(m2);  // indices into gs
        NodeSet outer;
        for (auto i : inner) outer.insert(s[i]);
        if (!is_graphically_causally_sufficient(g, outer)) continue;
        if (!is_graphically_causally_sufficient(gs, inner)) continue;
        ASSERT_EQ(marginal_dag(gs, inner), marginal_dag(g, outer));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Backdoor, ConfoundedPair) {
  Dag g({"C", "X", "Y"}, {{"C", "X"}, {"C", "Y"}, {"X", "Y"}});
  EXPECT_TRUE(backdoor_admissible(g, g.index_of("X"), g.index_of("Y"), g.set({"C"})));
  EXPECT_FALSE(backdoor_admissible(g, g.index_of("X"), g.index_of("Y"), {}));
}

TEST(Backdoor, DescendantOfTreatmentIsInadmissible) {
  Dag g({"X", "M", "Y"}, {{"X", "M"}, {"M", "Y"}});
  EXPECT_FALSE(backdoor_admissible(g, 0, 2, NodeSet{1}));
  EXPECT_TRUE(backdoor_admissible(g, 0, 2, {}));
}

TEST(Backdoor, MatchesPathEnumerationOnRandomGraphs) {
  CounterRng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = random_dag(default_names(5), 0.45, rng);
    for (NodeId x = 0; x < g.size(); ++x)
      for (NodeId y = 0; y < g.size(); ++y) {
        if (x == y) continue;
        for (std::uint64_t m = 0; m < (1u << g.size()); ++m) {
          auto z = NodeSet::from_mask(m);
          if (z.contains(x) || z.contains(y)) continue;
          ASSERT_EQ(backdoor_admissible(g, x, y, z), oracle::backdoor_admissible(g, x, y, z));
        }
      }
  }
}
