#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "phenocausal/exemplars.hpp"

using namespace phenocausal;

namespace {

const UnitAction& action(const Exemplar& ex, const std::string& label) {
  for (const auto& a : ex.unit_actions)
    if (a.label == label) return a;
  throw std::runtime_error("no action " + label);
}

const ActionVerdict& verdict(const ClassificationReport& r, const std::string& label) {
  for (const auto& v : r.verdicts)
    if (v.action == label) return v;
  throw std::runtime_error("no verdict " + label);
}

UnitEvidence evidence(const Exemplar& ex, std::size_t trials = 200, std::uint64_t seed = 3) {
  return collect_unit_evidence(*ex.units, ex.unit_actions, trials, seed);
}

// Brute force over every coin sequence, no shortcuts.
std::map<std::vector<double>, double> brute_force_law(const UrnProcess& p) {
  const std::size_t flips = 2 * p.n * std::size_t(p.rounds);
  std::map<std::vector<double>, double> law;
  for (std::size_t mask = 0; mask < (std::size_t{1} << flips); ++mask) {
    auto c = p.k0;
    double w = 1.0;
    std::size_t bit = 0;
    for (int t = 0; t < p.rounds; ++t)
      for (std::size_t m = 1; m <= p.n; ++m)
        for (int sign : {+1, -1}) {
          const double q = sign > 0 ? p.bias[m - 1].plus : p.bias[m - 1].minus;
          if (mask >> bit++ & 1) {
            w *= q;
            p.apply(c, m, sign);
          } else {
            w *= 1 - q;
          }
        }
    law[c] += w;
  }
  return law;
}

void expect_same_law(const std::vector<Outcome>& got, const std::map<std::vector<double>, double>& want) {
  std::map<std::vector<double>, double> g;
  for (const auto& o : got) g[o.values] += o.prob;
  for (const auto& [s, w] : want) EXPECT_NEAR(g[s], w, 1e-12);
  for (const auto& [s, w] : g) EXPECT_NEAR(want.count(s) ? want.at(s) : 0.0, w, 1e-12);
}

}  // namespace

TEST(Urn, BivariateActionsOnTenTen) {
  auto ex = urn_bivariate(10, 10, 2, {}, 1);
  EXPECT_EQ(ex.variables, (std::vector<std::string>{"Kb", "Kr"}));
  EXPECT_EQ(*action(ex, "A1+").apply({10, 10}), (State{11, 9}));
  EXPECT_EQ(*action(ex, "A1-").apply({10, 10}), (State{9, 11}));
  EXPECT_EQ(*action(ex, "A2+").apply({10, 10}), (State{10, 11}));
  EXPECT_FALSE(action(ex, "A2-").apply({4, 0}).has_value());
  EXPECT_FALSE(action(ex, "A1+").apply({4, 0}).has_value());
}

TEST(Urn, BivariateRejectsShallowUrns) {
  EXPECT_THROW(urn_bivariate(3, 10, 3, {}, 1), InvalidArgument);
  EXPECT_THROW(urn_bivariate(10, 2, 3, {}, 1), InvalidArgument);
  EXPECT_THROW(urn_bivariate(10, 10, 2, {{1.5, 0.5}}, 1), InvalidArgument);
}

TEST(Urn, ZeroBiasesLeaveInitialState) {
  auto ex = urn_bivariate(10, 7, 3, {{0.0, 0.0}}, 1);
  auto d = ex.sampler(50, 9);
  for (const auto& row : d.rows) EXPECT_EQ(row, (std::vector<double>{10, 7}));
}

TEST(Urn, ChainSwapActions) {
  auto ex = urn_chain(3, {5, 5, 5}, 1, {}, 1);
  // causal order K3, K2, K1
  EXPECT_EQ(ex.variables, (std::vector<std::string>{"K3", "K2", "K1"}));
  EXPECT_EQ(*action(ex, "A2+").apply({5, 5, 5}), (State{5, 6, 4}));
  EXPECT_EQ(*action(ex, "A3-").apply({5, 5, 5}), (State{4, 6, 5}));
  EXPECT_EQ(*action(ex, "A1-").apply({5, 5, 5}), (State{5, 5, 4}));
}

TEST(Urn, StructureMatrices) {
  auto p = urn_chain_process(4, {5, 6, 7, 8}, 2, {});
  auto lin = p.linear(p.bias);
  // K_j = k0_j + N_j - N_{j+1}: offsets accumulate from the last type down.
  Eigen::MatrixXd a_expected(4, 4);
  a_expected << 0, 0, 0, 0, -1, 0, 0, 0, -1, -1, 0, 0, -1, -1, -1, 0;
  EXPECT_TRUE(lin.a().isApprox(a_expected));
  EXPECT_DOUBLE_EQ(lin.offsets()[0], 8);
  EXPECT_DOUBLE_EQ(lin.offsets()[3], 26);

  auto b = bundles_process(4, 2, {});
  Eigen::MatrixXd bundles_expected = Eigen::MatrixXd::Zero(4, 4);
  bundles_expected(1, 0) = bundles_expected(2, 1) = bundles_expected(3, 2) = 1;
  EXPECT_TRUE(b.linear(b.bias).a().isApprox(bundles_expected));
}

TEST(Urn, LinearModelMatchesBoundedRunsAwayFromTheBoundary) {
  for (auto proc : {urn_chain_process(3, {10, 10, 10}, 3, {{0.6, 0.3}}), bundles_process(3, 2, {}, {20, 20, 20}),
                    urn_bivariate_process(9, 9, 4, {{0.2, 0.7}, {0.5, 0.5}})}) {
    ASSERT_TRUE(proc.boundary_free());
    auto lin = proc.linear(proc.bias);
    for (std::uint64_t r = 0; r < 300; ++r) {
      CounterRng rng(77, r);
      auto run = proc.run(rng, proc.bias);
      EXPECT_FALSE(run.refused);
      EXPECT_EQ(lin.evaluate(run.noise), run.counts);
    }
  }
}

TEST(Urn, ExactLawMatchesBruteForce) {
  // near the boundary (DP path) and away from it (enumeration path)
  for (auto proc : {urn_chain_process(3, {1.5, 1.5, 1.5}, 1, {{0.7, 0.4}}),
                    urn_bivariate_process(3, 3, 2, {{0.3, 0.6}, {0.8, 0.1}}), bundles_process(3, 1, {{0.4, 0.5}}),
                    bundles_process(2, 2, {{0.4, 0.5}}, {4, 4})}) {
    expect_same_law(proc.exact(proc.bias), brute_force_law(proc));
  }
}

TEST(Urn, RefusedRemovalsAreFlagged) {
  auto p = bundles_process(3, 4, {{0.1, 0.9}});
  EXPECT_FALSE(p.boundary_free());
  bool any = false;
  for (std::uint64_t r = 0; r < 50 && !any; ++r) {
    CounterRng rng(5, r);
    any = p.run(rng, p.bias).refused;
  }
  EXPECT_TRUE(any);
}

TEST(Bundles, PackageActions) {
  auto ex = bundles_chain(4, 1, {}, 1);
  EXPECT_EQ(ex.variables, (std::vector<std::string>{"K4", "K3", "K2", "K1"}));
  // from empty, A3+ gives one ball each of types 1..3
  EXPECT_EQ(*action(ex, "A3+").apply({0, 0, 0, 0}), (State{0, 1, 1, 1}));
  EXPECT_FALSE(action(ex, "A3-").apply({0, 1, 1, 0}).has_value());
  EXPECT_EQ(*action(ex, "A1-").apply({0, 1, 1, 1}), (State{0, 1, 1, 0}));
}

TEST(Bundles, LastTypeCountsOnlyItsOwnPackages) {
  auto p = bundles_process(3, 3, {{0.6, 0.2}}, {0, 0, 0});
  for (std::uint64_t r = 0; r < 200; ++r) {
    CounterRng rng(8, r);
    auto run = p.run(rng, p.bias);
    EXPECT_EQ(run.counts[0], run.noise[0]);  // K3 = N3
  }
}

TEST(Urn, ShortestCompositionForSingleTypeChange) {
  auto ex = urn_chain(4, {5, 5, 5, 5}, 1, {}, 1);
  const State s{5, 5, 5, 5};
  for (std::size_t j = 1; j <= 4; ++j) {
    const std::size_t p = 4 - j;
    auto path = shortest_composition(
        ex.unit_actions, s,
        [&](const State& t) {
          for (std::size_t i = 0; i < 4; ++i)
            if ((i == p) != (t[i] != s[i])) return false;
          return true;
        },
        6);
    ASSERT_TRUE(path.has_value());
    EXPECT_EQ(path->size(), j);
  }
}

TEST(Urn, GroundTruthIsTheOnlyValidGraphInUnitMode) {
  auto ex2 = urn_bivariate(10, 10, 2, {}, 1);
  auto v2 = valid_graphs(evidence(ex2));
  ASSERT_EQ(v2.size(), 1u);
  EXPECT_EQ(v2[0].graph, *ex2.ground_truth);
  EXPECT_EQ(verdict(v2[0].report, "A1+").nodes, std::vector<std::string>{"Kb"});
  EXPECT_EQ(verdict(v2[0].report, "A2-").nodes, std::vector<std::string>{"Kr"});

  auto ex4 = urn_chain(4, {6, 6, 6, 6}, 2, {}, 1);
  auto v4 = valid_graphs(evidence(ex4, 60));
  ASSERT_EQ(v4.size(), 1u);
  EXPECT_EQ(v4[0].graph, *ex4.ground_truth);
  EXPECT_EQ(v4[0].graph.edge_count(), 6u);
}

TEST(Urn, GroundTruthIsTheOnlyValidGraphInStatisticalMode) {
  auto ex2 = urn_bivariate(10, 10, 2, {}, 1);
  auto v2 = valid_graphs(*ex2.baseline, ex2.statistical);
  ASSERT_EQ(v2.size(), 1u);
  EXPECT_EQ(v2[0].graph, *ex2.ground_truth);

  auto ex3 = urn_chain(3, {3, 3, 3}, 1, {}, 1);
  auto v3 = valid_graphs(*ex3.baseline, ex3.statistical);
  ASSERT_EQ(v3.size(), 1u);
  EXPECT_EQ(v3[0].graph, *ex3.ground_truth);
}

TEST(Urn, TypeNEndpointReversesEveryEdge) {
  auto one = urn_chain(3, {4, 4, 4}, 1, {}, 1, Endpoint::TypeOne);
  auto other = urn_chain(3, {4, 4, 4}, 1, {}, 1, Endpoint::TypeN);
  const auto& g1 = *one.ground_truth;
  const auto& gn = *other.ground_truth;
  EXPECT_EQ(g1.edge_count(), gn.edge_count());
  for (const auto& [u, v] : g1.named_edges()) EXPECT_TRUE(gn.has_edge(v, u)) << u << "->" << v;
  auto v = valid_graphs(evidence(other, 60));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].graph, gn);
}

TEST(Bundles, GroundTruthValidates) {
  auto ex = bundles_chain(3, 1, {}, 1, {4, 4, 4});
  EXPECT_TRUE(classify_unit(*ex.ground_truth, evidence(ex, 100)).valid);
  EXPECT_TRUE(classify_statistical(*ex.ground_truth, *ex.baseline, ex.statistical).valid);
}

TEST(Rabbits, ScenariosReverseTheDirection) {
  auto s1 = rabbits(3, 1000, 1, 1);
  auto s2 = rabbits(3, 60, 100, 2);
  EXPECT_EQ(bivariate_direction(evidence(s1)), Direction::YcausesX);
  EXPECT_EQ(bivariate_direction(evidence(s2)), Direction::XcausesY);
  EXPECT_TRUE(classify_unit(*s1.ground_truth, evidence(s1)).valid);
  EXPECT_TRUE(classify_unit(*s2.ground_truth, evidence(s2)).valid);
}

TEST(Rabbits, ParametersOutsideTheRegimeThrow) {
  EXPECT_THROW(rabbits(3, 4, 1, 1), InvalidArgument);
  EXPECT_THROW(rabbits(3, 1000, 1, 2), InvalidArgument);
  EXPECT_THROW(rabbits(0, 10, 1, 1), InvalidArgument);
}

TEST(Macro, ChoiceOfMicroActionsReversesTheMacroArrow) {
  auto m1 = macro_pair(MacroChoice::ActOnOnes);
  auto m2 = macro_pair(MacroChoice::ActOnTwos);
  EXPECT_EQ(bivariate_direction(evidence(m1)), Direction::XcausesY);
  EXPECT_EQ(bivariate_direction(evidence(m2)), Direction::YcausesX);
}

TEST(Macro, AverageMovesByHalfTheNetShift) {
  const State s{1, 2, 3, -4};
  for (double c : {-3.0, 0.0, 2.5}) {
    auto t = macro_shift(s, 2, c);
    EXPECT_DOUBLE_EQ(macro_observe(t)[0] - macro_observe(s)[0], 1.0);
  }
}

TEST(BallTrack, GroundTruthValidatesBothActions) {
  auto ex = ball_track(0.2, 0.5, 1);
  auto r = classify_statistical(*ex.ground_truth, *ex.baseline, ex.statistical);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(verdict(r, "A1").nodes, std::vector<std::string>{"X"});
  EXPECT_EQ(verdict(r, "A2").nodes, std::vector<std::string>{"Y"});
  EXPECT_EQ(bivariate_direction(*ex.baseline, ex.statistical), Direction::XcausesY);
}

TEST(Farmers, ElasticityDecidesTheDirection) {
  auto e0 = farmers(2, 0);
  auto e1 = farmers(2, 1);
  auto eh = farmers(2, 0.5);
  EXPECT_EQ(bivariate_direction(*e0.baseline, e0.statistical), Direction::XcausesY);
  EXPECT_EQ(bivariate_direction(*e1.baseline, e1.statistical), Direction::YcausesX);
  EXPECT_EQ(bivariate_direction(*eh.baseline, eh.statistical), Direction::Undetermined);
  EXPECT_FALSE(eh.ground_truth.has_value());
  EXPECT_TRUE(valid_graphs(*eh.baseline, eh.statistical).empty());
  auto generic = farmers(3, 0.3);
  EXPECT_EQ(bivariate_direction(*generic.baseline, generic.statistical), Direction::Undetermined);
}

TEST(Exemplars, SamplersAreDeterministic) {
  for (const auto& ex : {urn_bivariate(10, 10, 2, {}, 1), bundles_chain(3, 2, {}, 1), farmers(2, 0),
                         ball_track(0.1, 0, 1), macro_pair(MacroChoice::ActOnOnes)}) {
    auto a = ex.sampler(40, 11), b = ex.sampler(40, 11), c = ex.sampler(40, 12);
    EXPECT_EQ(a.rows, b.rows) << ex.name;
    EXPECT_NE(a.rows, c.rows) << ex.name;
  }
}
