#pragma once

// JSON views of the result types, plus the small text format for graphs used
// on the command line ("A->B,B->C"). Every top-level document carries
// "spec_version" and is checked against schemas/*.json by the test suite.

#include "json.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "phenocausal/actions.hpp"
#include "phenocausal/discovery.hpp"
#include "phenocausal/exemplars.hpp"
#include "phenocausal/graph.hpp"
#include "phenocausal/verify.hpp"

namespace phenocausal {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSpecVersion = "1.0.0";

inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const Dag& g) {
  Json edges = Json::array();
  for (const auto& [u, v] : g.named_edges()) edges.push_back({u, v});
  return {{"nodes", g.names()}, {"edges", edges}};
}

inline Dag dag_from_json(const Json& j) {
  std::vector<NamedEdge> e;
  for (const auto& x : j.at("edges")) e.emplace_back(x.at(0).get<std::string>(), x.at(1).get<std::string>());
  return Dag(j.at("nodes").get<std::vector<std::string>>(), e);
}

/// "A->B,B->C" over the given nodes; blanks are ignored, an empty string is
/// the empty graph.
inline Dag parse_graph(const std::vector<std::string>& nodes, const std::string& text) {
  std::vector<NamedEdge> e;
  std::string clean;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) clean += c;
  std::stringstream ss(clean);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto k = item.find("->");
    if (k == std::string::npos || k == 0 || k + 2 >= item.size())
      throw InvalidArgument("bad edge '" + item + "', expected FROM->TO");
    e.emplace_back(item.substr(0, k), item.substr(k + 2));
  }
  return Dag(nodes, e);
}

inline Json to_json(const ActionVerdict& v) {
  Json j{{"action", v.action}, {"kind", to_string(v.kind)}, {"nodes", v.nodes}};
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (!v.alternatives.empty()) j["alternatives"] = v.alternatives;
  return j;
}

inline Json to_json(const ClassificationReport& r) {
  Json vs = Json::array();
  for (const auto& v : r.verdicts) vs.push_back(to_json(v));
  return {{"graph", to_json(r.graph)}, {"mode", r.mode}, {"valid", r.valid}, {"verdicts", vs}};
}

inline Json to_json(const BivariateFit& f) {
  return {{"x", f.x},
          {"y", f.y},
          {"verdict", to_string(f.verdict)},
          {"coefficient", number(f.coefficient)},
          {"confidence", number(f.confidence)},
          {"stat_xy", number(f.stat_xy)},
          {"stat_yx", number(f.stat_yx)},
          {"slope_xy", number(f.slope_xy)},
          {"slope_yx", number(f.slope_yx)},
          {"normality_p_xy", number(f.normality_p_xy)},
          {"normality_p_yx", number(f.normality_p_yx)},
          {"diagnostic", f.diagnostic}};
}

inline Json to_json(const DiscoveryResult& r) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < r.a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < r.a.cols(); ++k) row.push_back(number(r.a(i, k)));
    a.push_back(row);
  }
  Json scores = Json::array();
  for (const auto& s : r.scores)
    scores.push_back({{"from", s.from}, {"to", s.to}, {"coefficient", number(s.coefficient)},
                      {"standardized", number(s.standardized)}});
  Json order_scores = Json::array();
  for (const auto& [n, v] : r.order_scores) order_scores.push_back({{"node", n}, {"score", number(v)}});
  return {{"dag", to_json(r.dag)},
          {"structure_matrix", a},
          {"order", r.order},
          {"scores", scores},
          {"order_scores", order_scores},
          {"method", r.method},
          {"statistic", r.statistic},
          {"prune_threshold", r.prune_threshold},
          {"seed", r.seed}};
}

inline Json to_json(const EnvironmentShift& s) {
  Json tests = Json::array();
  for (const auto& t : s.tests)
    tests.push_back({{"node", t.node},
                     {"g_stat", number(t.g_stat)},
                     {"df", number(t.df)},
                     {"p_value", number(t.p_value)},
                     {"contexts_used", t.contexts_used},
                     {"inconclusive", t.inconclusive}});
  return {{"environment", s.environment}, {"changed", s.changed}, {"inconclusive", s.inconclusive}, {"tests", tests}};
}

inline Json to_json(const TrialRecord& r) {
  Json m = Json::object();
  for (const auto& [k, v] : r.measures) m[k] = number(v);
  return {{"verifier", r.verifier}, {"trial", r.trial},  {"seed", r.seed},       {"ok", r.ok},
          {"rejected", r.rejected}, {"detail", r.detail}, {"instance", r.instance}, {"measures", m},
          {"changed", r.changed}};
}

/// Failures carry the full record; passing trials are summarized unless
/// `entries` is set.
inline Json to_json(const VerificationReport& rep, bool entries = false) {
  Json tally = Json::object();
  for (const auto& [k, t] : rep.tally) tally[k] = {{"run", t.run}, {"rejected", t.rejected}, {"failed", t.failed}};
  Json fails = Json::array();
  for (const auto& f : rep.failures) fails.push_back(to_json(f));
  Json j{{"pass", rep.pass()}, {"trials", rep.trials}, {"verifiers", tally}, {"failures", fails}, {"notes", rep.notes}};
  if (entries) {
    Json all = Json::array();
    for (const auto& e : rep.entries) all.push_back(to_json(e));
    j["entries"] = all;
  }
  return j;
}

inline Json to_json(const Exemplar& ex) {
  Json params = Json::object();
  for (const auto& [k, v] : ex.params) params[k] = number(v);
  Json j{{"name", ex.name}, {"variables", ex.variables}, {"parameters", params}};
  j["ground_truth"] = ex.ground_truth ? to_json(*ex.ground_truth) : Json(nullptr);
  j["unique"] = ex.unique;
  Json unit = Json::array();
  for (const auto& a : ex.unit_actions) unit.push_back({{"label", a.label}, {"kind", a.spec.kind}, {"params", a.spec.params}});
  Json stat = Json::array();
  for (const auto& a : ex.statistical) stat.push_back(a.label);
  j["unit_actions"] = unit;
  j["statistical_actions"] = stat;
  if (ex.linear) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < ex.linear->a().rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < ex.linear->a().cols(); ++k) row.push_back(number(ex.linear->a()(i, k)));
      a.push_back(row);
    }
    j["structure_matrix"] = a;
  }
  return j;
}

/// Wraps a payload as a top-level document.
inline Json document(const std::string& kind, std::uint64_t seed, Json payload) {
  Json j{{"spec_version", kSpecVersion}, {"kind", kind}, {"seed", seed}};
  for (auto it = payload.begin(); it != payload.end(); ++it) j[it.key()] = it.value();
  return j;
}

}  // namespace phenocausal
