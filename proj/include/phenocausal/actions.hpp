#pragma once

// Classifying elementary actions against a candidate graph.
//
// Statistical mode: an action is a replacement joint. It belongs to node j when
// P(X_j | PA_j) is the only causal conditional it changes.
//
// Unit mode: an action is a (partial) map on system states. For a unit we look
// at every state reachable by at most two actions. The graph is valid when the
// actions can be split into classes A_j such that, within each unit, the states
// reached without using A_i still obey one deterministic law x_i = m_i(pa_i)
// for every node i. The laws are unknown and only required to exist.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phenocausal/discrete.hpp"
#include "phenocausal/errors.hpp"
#include "phenocausal/graph.hpp"
#include "phenocausal/rng.hpp"
#include "phenocausal/scm.hpp"

namespace phenocausal {

inline constexpr std::size_t kDefaultUnitTrials = 1000;
inline constexpr std::size_t kUnitEnumerationCap = std::size_t{1} << 16;
inline constexpr std::size_t kDefaultValidGraphCap = 5;

struct StatisticalAction {
  std::string label;
  DiscreteJoint effect;
};

/// Builds a statistical action from a generator applied to the baseline.
inline StatisticalAction make_statistical_action(
    std::string label, const DiscreteJoint& baseline,
    const std::function<DiscreteJoint(const DiscreteJoint&)>& generator) {
  return {std::move(label), generator(baseline)};
}

using State = std::vector<double>;

/// Serializable description of a unit action.
///   add-constant  {component, delta, floor}: inapplicable if the result drops below floor
///   swap-count    {from, to, amount}: moves `amount` from one component to another, refused if short
///   replace-count {component, value}
///   builtin       arbitrary map, label only
struct MapSpec {
  std::string kind = "builtin";
  std::vector<double> params;
};

struct UnitAction {
  std::string label;
  std::function<std::optional<State>(const State&)> apply;
  MapSpec spec;
};

inline UnitAction add_constant(std::string label, std::size_t component, double delta,
                               double floor = -std::numeric_limits<double>::infinity()) {
  return {std::move(label),
          [=](const State& s) -> std::optional<State> {
            auto t = s;
            t.at(component) += delta;
            if (t[component] < floor) return std::nullopt;
            return t;
          },
          {"add-constant", {double(component), delta, floor}}};
}

inline UnitAction swap_count(std::string label, std::size_t from, std::size_t to, double amount = 1.0) {
  return {std::move(label),
          [=](const State& s) -> std::optional<State> {
            if (s.at(from) < amount) return std::nullopt;
            auto t = s;
            t[from] -= amount;
            t.at(to) += amount;
            return t;
          },
          {"swap-count", {double(from), double(to), amount}}};
}

inline UnitAction replace_count(std::string label, std::size_t component, double value) {
  return {std::move(label),
          [=](const State& s) -> std::optional<State> {
            auto t = s;
            t.at(component) = value;
            return t;
          },
          {"replace-count", {double(component), value}}};
}

inline UnitAction from_map_spec(const std::string& label, const MapSpec& spec) {
  auto need = [&](std::size_t k) {
    if (spec.params.size() != k)
      throw InvalidArgument("map-spec '" + spec.kind + "' expects " + std::to_string(k) + " parameters");
  };
  auto index = [](double v) {
    if (v < 0 || v != std::floor(v)) throw InvalidArgument("map-spec component must be a non-negative integer");
    return std::size_t(v);
  };
  if (spec.kind == "add-constant") {
    if (spec.params.size() == 2) return add_constant(label, index(spec.params[0]), spec.params[1]);
    need(3);
    return add_constant(label, index(spec.params[0]), spec.params[1], spec.params[2]);
  }
  if (spec.kind == "swap-count") {
    need(3);
    return swap_count(label, index(spec.params[0]), index(spec.params[1]), spec.params[2]);
  }
  if (spec.kind == "replace-count") {
    need(2);
    return replace_count(label, index(spec.params[0]), spec.params[1]);
  }
  throw InvalidArgument("unknown map-spec kind '" + spec.kind + "'");
}

/// A system whose units are states; `observe` yields the modeled variables.
struct UnitSystem {
  std::vector<std::string> variables;
  std::function<std::vector<double>(const State&)> observe;
  std::function<State(CounterRng&)> sample;
  std::vector<State> states;  // when non-empty and small, used instead of sampling
};

/// Units of a GeneralScm are its value vectors; actions act on those directly.
inline UnitSystem unit_system(const GeneralScm& scm) {
  return {scm.names(),
          [](const State& s) { return s; },
          [scm](CounterRng& rng) {
            std::vector<double> noise(scm.size());
            for (std::size_t j = 0; j < scm.size(); ++j) noise[j] = noise_spec(scm, j).sample(rng);
            return scm.evaluate(noise);
          },
          {}};
}

enum class VerdictKind { Assigned, Identity, Violation };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Assigned: return "assigned";
    case VerdictKind::Identity: return "identity";
    case VerdictKind::Violation: return "violation";
  }
  return "?";
}

struct ActionVerdict {
  std::string action;
  VerdictKind kind = VerdictKind::Identity;
  std::vector<std::string> nodes;  // the assigned node, or the nodes involved in a violation
  std::string reason;
  std::vector<std::string> alternatives;  // other nodes this action could be assigned to
};

/// Label of the pseudo-verdict recording that the baseline does not fit the graph.
inline const std::string kBaselineLabel = "(baseline)";

struct ClassificationReport {
  Dag graph{std::vector<std::string>{}};
  std::string mode;
  std::vector<ActionVerdict> verdicts;
  bool valid = true;
};

namespace detail {

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

inline ClassificationReport finish(ClassificationReport r) {
  r.valid = std::none_of(r.verdicts.begin(), r.verdicts.end(),
                         [](const ActionVerdict& v) { return v.kind == VerdictKind::Violation; });
  return r;
}

}  // namespace detail

/// Per-action change sets against the baseline. A baseline that does not
/// factorize over g makes g invalid regardless of the actions; this shows up
/// as a violation entry labeled "(baseline)".
inline ClassificationReport classify_statistical(const Dag& g, const DiscreteJoint& baseline,
                                                 const std::vector<StatisticalAction>& actions,
                                                 double eps = kExactEps, bool explain = true) {
  ClassificationReport r{g, "statistical", {}, true};
  const double residual = factorization_residual(baseline, g);
  if (residual > eps) {
    ActionVerdict v{kBaselineLabel, VerdictKind::Violation, {}, "baseline is not Markov to the graph", {}};
    if (explain)
      for (const auto& ci : markov_violations(baseline, g, eps, 1)) {
        v.nodes = ci.a;
        v.nodes.insert(v.nodes.end(), ci.b.begin(), ci.b.end());
        v.reason += ": " + detail::join(ci.a) + " not independent of " + detail::join(ci.b) +
                    (ci.c.empty() ? std::string() : " given " + detail::join(ci.c));
      }
    r.verdicts.push_back(std::move(v));
  }
  const auto base = factorize(baseline, g);
  for (const auto& a : actions) {
    if (!a.effect.same_variables(baseline))
      throw InvalidArgument("action '" + a.label + "' has different variables than the baseline");
    const auto eff = factorize(a.effect, g);
    NodeSet changed;
    for (NodeId j = 0; j < g.size(); ++j)
      if (conditional_distance(base[j], eff[j]) > eps) changed.insert(j);
    ActionVerdict v{a.label, VerdictKind::Identity, g.names_of(changed), {}, {}};
    if (changed.size() == 1) v.kind = VerdictKind::Assigned;
    if (changed.size() >= 2) {
      v.kind = VerdictKind::Violation;
      v.reason = "changes more than one causal conditional";
    }
    r.verdicts.push_back(std::move(v));
  }
  return detail::finish(std::move(r));
}

/// Everything the unit-level check needs, gathered once and reusable for any graph.
struct UnitEvidence {
  std::vector<std::string> variables;
  std::vector<std::string> actions;
  std::vector<char> inapplicable;  // refused on some sampled unit
  std::vector<char> identity;      // never changes the observed variables
  struct Unit {
    std::vector<std::int64_t> base;
    std::vector<std::optional<std::vector<std::int64_t>>> one;  // [a]
    std::vector<std::optional<std::vector<std::int64_t>>> two;  // [a * A + b]: b after a
  };
  std::vector<Unit> units;
  double eps = kExactEps;
};

inline UnitEvidence collect_unit_evidence(const UnitSystem& sys, const std::vector<UnitAction>& actions,
                                          std::size_t trials, std::uint64_t seed, double eps = kExactEps) {
  if (!(eps > 0)) throw InvalidArgument("unit classification needs eps > 0");
  const auto na = actions.size();
  UnitEvidence ev;
  ev.variables = sys.variables;
  ev.eps = eps;
  for (const auto& a : actions) ev.actions.push_back(a.label);
  ev.inapplicable.assign(na, 0);
  ev.identity.assign(na, 1);
  auto key = [&](const State& s) {
    auto x = sys.observe(s);
    if (x.size() != sys.variables.size()) throw InvalidArgument("observe() returned the wrong arity");
    std::vector<std::int64_t> k(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) k[i] = std::llround(x[i] / eps);
    return k;
  };
  std::vector<State> units;
  if (!sys.states.empty() && sys.states.size() <= kUnitEnumerationCap) {
    units = sys.states;
  } else {
    if (!sys.sample) throw InvalidArgument("unit system has neither states nor a sampler");
    for (std::size_t t = 0; t < trials; ++t) {
      CounterRng rng(seed, t);
      units.push_back(sys.sample(rng));
    }
  }
  for (const auto& s0 : units) {
    UnitEvidence::Unit u;
    u.base = key(s0);
    u.one.resize(na);
    u.two.resize(na * na);
    std::vector<std::optional<State>> first(na);
    for (std::size_t a = 0; a < na; ++a) {
      first[a] = actions[a].apply(s0);
      if (!first[a]) {
        ev.inapplicable[a] = 1;
        continue;
      }
      u.one[a] = key(*first[a]);
      if (*u.one[a] != u.base) ev.identity[a] = 0;
    }
    for (std::size_t a = 0; a < na; ++a) {
      if (!first[a]) continue;
      for (std::size_t b = 0; b < na; ++b) {
        auto s2 = actions[b].apply(*first[a]);
        if (!s2) continue;
        u.two[a * na + b] = key(*s2);
        if (*u.two[a * na + b] != *u.one[a]) ev.identity[b] = 0;
      }
    }
    ev.units.push_back(std::move(u));
  }
  for (std::size_t a = 0; a < na; ++a)
    if (ev.inapplicable[a]) ev.identity[a] = 0;
  return ev;
}

namespace detail {

class UnitSolver {
 public:
  static constexpr int kFree = -1;
  static constexpr int kExcluded = -2;

  UnitSolver(const Dag& g, const UnitEvidence& ev) : g_(g), ev_(ev), na_(ev.actions.size()) {
    idx_ = std::vector<std::size_t>(g.size());
    for (NodeId i = 0; i < g.size(); ++i) {
      auto it = std::find(ev.variables.begin(), ev.variables.end(), g.name(i));
      if (it == ev.variables.end() || ev.variables.size() != g.size())
        throw InvalidArgument("graph nodes do not match the unit system's variables");
      idx_[i] = std::size_t(it - ev.variables.begin());
    }
    forced_.resize(na_);
    for (std::size_t a = 0; a < na_; ++a)
      for (const auto& u : ev.units)
        if (u.one[a])
          for (NodeId i = 0; i < g.size(); ++i)
            if (changed_alone(u.base, *u.one[a], i)) forced_[a].insert(i);
  }

  const NodeSet& forced(std::size_t a) const { return forced_[a]; }

  /// Whether the states reachable without class-i actions obey one law for x_i.
  bool consistent(const std::vector<int>& cls, NodeId i) const {
    std::vector<std::size_t> use;
    for (std::size_t a = 0; a < na_; ++a)
      if (cls[a] >= 0 && NodeId(cls[a]) != i) use.push_back(a);
    std::map<std::vector<std::int64_t>, std::int64_t> law;
    const auto& pa = g_.parents(i);
    std::vector<std::int64_t> k(pa.size());
    for (const auto& u : ev_.units) {
      law.clear();
      auto add = [&](const std::vector<std::int64_t>& x) {
        for (std::size_t q = 0; q < pa.size(); ++q) k[q] = x[idx_[pa[q]]];
        auto [it, fresh] = law.emplace(k, x[idx_[i]]);
        return fresh || it->second == x[idx_[i]];
      };
      if (!add(u.base)) return false;
      for (auto a : use) {
        if (u.one[a] && !add(*u.one[a])) return false;
        for (auto b : use)
          if (u.two[a * na_ + b] && !add(*u.two[a * na_ + b])) return false;
      }
    }
    return true;
  }

  /// All nodes other than j still consistent after assigning an action to j.
  bool consistent_except(const std::vector<int>& cls, NodeId j) const {
    for (NodeId i = 0; i < g_.size(); ++i)
      if (i != j && !consistent(cls, i)) return false;
    return true;
  }

  std::vector<NodeId> candidates(std::size_t a) const {
    if (forced_[a].size() == 1) return {forced_[a][0]};
    if (forced_[a].size() > 1) return {};
    std::vector<NodeId> c;
    for (NodeId i = 0; i < g_.size(); ++i) c.push_back(i);
    return c;
  }

  void search(std::vector<int>& cls, std::size_t a, std::vector<std::vector<int>>& found, std::size_t cap) const {
    if (found.size() >= cap) return;
    while (a < na_ && cls[a] != kFree) ++a;
    if (a == na_) {
      found.push_back(cls);
      return;
    }
    for (auto j : candidates(a)) {
      cls[a] = int(j);
      if (consistent_except(cls, j)) search(cls, a + 1, found, cap);
      cls[a] = kFree;
      if (found.size() >= cap) return;
    }
  }

 private:
  bool changed_alone(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y, NodeId i) const {
    if (x[idx_[i]] == y[idx_[i]]) return false;
    for (auto p : g_.parents(i))
      if (x[idx_[p]] != y[idx_[p]]) return false;
    return true;
  }

  const Dag& g_;
  const UnitEvidence& ev_;
  std::size_t na_;
  std::vector<std::size_t> idx_;
  std::vector<NodeSet> forced_;
};

}  // namespace detail

/// Unit-level classification from collected evidence. Up to `max_solutions`
/// class assignments are enumerated to expose ambiguous actions.
inline ClassificationReport classify_unit(const Dag& g, const UnitEvidence& ev, std::size_t max_solutions = 64) {
  using detail::UnitSolver;
  const auto na = ev.actions.size();
  UnitSolver solver(g, ev);
  ClassificationReport r{g, "unit", std::vector<ActionVerdict>(na), true};
  std::vector<int> cls(na, UnitSolver::kFree);
  for (std::size_t a = 0; a < na; ++a) {
    auto& v = r.verdicts[a];
    v.action = ev.actions[a];
    if (ev.inapplicable[a]) {
      v.kind = VerdictKind::Violation;
      v.reason = "inapplicable";
      cls[a] = UnitSolver::kExcluded;
    } else if (ev.identity[a]) {
      v.kind = VerdictKind::Identity;
      cls[a] = UnitSolver::kExcluded;
    } else if (solver.forced(a).size() >= 2) {
      v.kind = VerdictKind::Violation;
      v.nodes = g.names_of(solver.forced(a));
      v.reason = "breaks the equations of several nodes";
      cls[a] = UnitSolver::kExcluded;
    }
  }
  const bool blocked = std::any_of(r.verdicts.begin(), r.verdicts.end(),
                                   [](const ActionVerdict& v) { return v.kind == VerdictKind::Violation; });
  std::vector<std::vector<int>> found;
  if (!blocked) {
    auto work = cls;
    solver.search(work, 0, found, max_solutions);
  }
  if (!found.empty()) {
    for (std::size_t a = 0; a < na; ++a) {
      if (cls[a] != UnitSolver::kFree) continue;
      auto& v = r.verdicts[a];
      v.kind = VerdictKind::Assigned;
      v.nodes = {g.name(NodeId(found[0][a]))};
      std::set<int> alt;
      for (const auto& s : found)
        if (s[a] != found[0][a]) alt.insert(s[a]);
      for (int j : alt) v.alternatives.push_back(g.name(NodeId(j)));
    }
    return detail::finish(std::move(r));
  }
  // No consistent split exists: attribute greedily, in action order.
  for (std::size_t a = 0; a < na; ++a) {
    if (cls[a] != UnitSolver::kFree) continue;
    auto& v = r.verdicts[a];
    bool placed = false;
    for (auto j : solver.candidates(a)) {
      cls[a] = int(j);
      if (solver.consistent_except(cls, j)) {
        placed = true;
        v.kind = VerdictKind::Assigned;
        v.nodes = {g.name(j)};
        break;
      }
    }
    if (!placed) {
      cls[a] = UnitSolver::kExcluded;
      v.kind = VerdictKind::Violation;
      v.nodes = g.names_of(solver.forced(a));
      v.reason = "no node keeps the other equations consistent";
    }
  }
  return detail::finish(std::move(r));
}

inline ClassificationReport classify_unit(const Dag& g, const UnitSystem& sys, const std::vector<UnitAction>& actions,
                                          std::size_t trials, std::uint64_t seed, double eps = kExactEps) {
  return classify_unit(g, collect_unit_evidence(sys, actions, trials, seed, eps));
}

inline ClassificationReport classify_unit(const Dag& g, const GeneralScm& scm, const std::vector<UnitAction>& actions,
                                          std::size_t trials, std::uint64_t seed, double eps = kExactEps) {
  return classify_unit(g, unit_system(scm), actions, trials, seed, eps);
}

struct GraphVerdict {
  Dag graph;
  ClassificationReport report;
};

inline std::vector<GraphVerdict> valid_graphs(const DiscreteJoint& baseline,
                                              const std::vector<StatisticalAction>& actions,
                                              double eps = kExactEps, std::size_t cap = kDefaultValidGraphCap) {
  std::vector<GraphVerdict> out;
  for (auto& g : enumerate_dags(baseline.names(), cap)) {
    auto r = classify_statistical(g, baseline, actions, eps, false);
    if (r.valid) out.push_back({std::move(g), std::move(r)});
  }
  return out;
}

inline std::vector<GraphVerdict> valid_graphs(const UnitEvidence& ev, std::size_t cap = kDefaultValidGraphCap) {
  std::vector<GraphVerdict> out;
  for (auto& g : enumerate_dags(ev.variables, cap)) {
    auto r = classify_unit(g, ev);
    if (r.valid) out.push_back({std::move(g), std::move(r)});
  }
  return out;
}

enum class Direction { XcausesY, YcausesX, Confounded, Undetermined };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::XcausesY: return "XcausesY";
    case Direction::YcausesX: return "YcausesX";
    case Direction::Confounded: return "Confounded";
    case Direction::Undetermined: return "Undetermined";
  }
  return "?";
}

/// X and Y are the first and second variable. A single valid graph decides
/// the verdict; none or several valid graphs leave it undetermined.
inline Direction direction_from(const std::vector<GraphVerdict>& valid) {
  if (valid.size() != 1) return Direction::Undetermined;
  const auto& g = valid[0].graph;
  if (g.has_edge(0, 1)) return Direction::XcausesY;
  if (g.has_edge(1, 0)) return Direction::YcausesX;
  return Direction::Confounded;
}

inline Direction bivariate_direction(const DiscreteJoint& baseline, const std::vector<StatisticalAction>& actions,
                                     double eps = kExactEps) {
  if (baseline.arity() != 2) throw InvalidArgument("bivariate_direction needs exactly two variables");
  return direction_from(valid_graphs(baseline, actions, eps));
}

inline Direction bivariate_direction(const UnitEvidence& ev) {
  if (ev.variables.size() != 2) throw InvalidArgument("bivariate_direction needs exactly two variables");
  return direction_from(valid_graphs(ev));
}

}  // namespace phenocausal
