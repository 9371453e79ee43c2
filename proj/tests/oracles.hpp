#pragma once

// Brute-force reference computations used only by tests. Nothing here calls
// into the library algorithms it is used to check.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "phenocausal/discrete.hpp"
#include "phenocausal/graph.hpp"

namespace oracle {

using phenocausal::Dag;
using phenocausal::NodeId;
using phenocausal::NodeSet;

/// All simple paths (ignoring direction) from a to b, as node sequences.
inline std::vector<std::vector<NodeId>> simple_paths(const Dag& g, NodeId a, NodeId b) {
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> path{a};
  std::vector<char> on(g.size(), 0);
  on[a] = 1;
  std::function<void(NodeId)> walk = [&](NodeId v) {
    if (v == b) {
      out.push_back(path);
      return;
    }
    std::vector<NodeId> nb(g.parents(v));
    nb.insert(nb.end(), g.children(v).begin(), g.children(v).end());
    for (auto w : nb) {
      if (on[w]) continue;
      on[w] = 1;
      path.push_back(w);
      walk(w);
      path.pop_back();
      on[w] = 0;
    }
  };
  walk(a);
  return out;
}

inline bool descendant_or_self_in(const Dag& g, NodeId v, const NodeSet& c) {
  std::vector<NodeId> stack{v};
  std::vector<char> seen(g.size(), 0);
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    if (seen[u]) continue;
    seen[u] = 1;
    if (c.contains(u)) return true;
    for (auto w : g.children(u)) stack.push_back(w);
  }
  return false;
}

/// Chain/fork blocked by a conditioned middle node; collider blocked unless the
/// middle node or one of its descendants is conditioned on.
inline bool path_blocked(const Dag& g, const std::vector<NodeId>& p, const NodeSet& c) {
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const bool into_from_left = g.has_edge(p[k - 1], p[k]);
    const bool into_from_right = g.has_edge(p[k + 1], p[k]);
    const bool collider = into_from_left && into_from_right;
    if (collider) {
      if (!descendant_or_self_in(g, p[k], c)) return true;
    } else if (c.contains(p[k])) {
      return true;
    }
  }
  return false;
}

inline bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
  for (auto x : a)
    for (auto y : b)
      for (const auto& p : simple_paths(g, x, y))
        if (!path_blocked(g, p, c)) return false;
  return true;
}

inline bool backdoor_admissible(const Dag& g, NodeId x, NodeId y, const NodeSet& z) {
  for (auto v : z)
    if (v != x && descendant_or_self_in(g, x, NodeSet{v}) ) return false;
  for (const auto& p : simple_paths(g, x, y)) {
    if (p.size() < 2 || !g.has_edge(p[1], p[0])) continue;  // not a backdoor path
    if (!path_blocked(g, p, z)) return false;
  }
  return true;
}

/// Whether a directed path u ~> v exists whose interior avoids s.
inline bool directed_path_avoiding(const Dag& g, NodeId u, NodeId v, const NodeSet& s) {
  std::function<bool(NodeId, std::vector<char>&)> go = [&](NodeId w, std::vector<char>& seen) {
    for (auto c : g.children(w)) {
      if (c == v) return true;
      if (s.contains(c) || seen[c]) continue;
      seen[c] = 1;
      if (go(c, seen)) return true;
    }
    return false;
  };
  std::vector<char> seen(g.size(), 0);
  return go(u, seen);
}

/// Edge set of the path-collapsed graph on s, as (name, name) pairs.
inline std::vector<std::pair<std::string, std::string>> collapsed_edges(const Dag& g, const NodeSet& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto u : s)
    for (auto v : s)
      if (u != v && directed_path_avoiding(g, u, v, s)) out.emplace_back(g.name(u), g.name(v));
  return out;
}

/// Whether some outside node reaches two members of s through s-avoiding paths.
inline bool sufficient(const Dag& g, const NodeSet& s) {
  for (NodeId c = 0; c < g.size(); ++c) {
    if (s.contains(c)) continue;
    int hits = 0;
    for (auto v : s) hits += directed_path_avoiding(g, c, v, s) ? 1 : 0;
    if (hits >= 2) return false;
  }
  return true;
}

/// Random strictly positive conditional tables for each node, multiplied out
/// directly; returns flat probabilities in row-major order over `cards`.
struct RandomNetwork {
  std::vector<std::size_t> cards;
  std::vector<std::vector<double>> cpt;  // per node: [ctx * card + v]
  std::vector<double> joint;
};

inline double cpt_lookup(const Dag& g, const RandomNetwork& net, NodeId j,
                         const std::vector<std::size_t>& state) {
  std::size_t ctx = 0;
  for (auto p : g.parents(j)) ctx = ctx * net.cards[p] + state[p];
  return net.cpt[j][ctx * net.cards[j] + state[j]];
}

inline RandomNetwork random_network(const Dag& g, const std::vector<std::size_t>& cards,
                                    phenocausal::CounterRng& rng, double floor = 0.05) {
  RandomNetwork net;
  net.cards = cards;
  for (NodeId j = 0; j < g.size(); ++j) {
    std::size_t ctx = 1;
    for (auto p : g.parents(j)) ctx *= cards[p];
    std::vector<double> t(ctx * cards[j]);
    for (std::size_t c = 0; c < ctx; ++c) {
      double s = 0.0;
      for (std::size_t v = 0; v < cards[j]; ++v) s += (t[c * cards[j] + v] = floor + rng.uniform());
      for (std::size_t v = 0; v < cards[j]; ++v) t[c * cards[j] + v] /= s;
    }
    net.cpt.push_back(std::move(t));
  }
  std::size_t total = 1;
  for (auto c : cards) total *= c;
  net.joint.assign(total, 0.0);
  std::vector<std::size_t> state(g.size(), 0);
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t x = f;
    for (std::size_t i = g.size(); i-- > 0;) {
      state[i] = x % cards[i];
      x /= cards[i];
    }
    double p = 1.0;
    for (NodeId j = 0; j < g.size(); ++j) p *= cpt_lookup(g, net, j, state);
    net.joint[f] = p;
  }
  return net;
}

inline phenocausal::DiscreteJoint as_joint(const Dag& g, const RandomNetwork& net) {
  std::vector<phenocausal::Variable> vars;
  for (NodeId i = 0; i < g.size(); ++i) vars.push_back({g.name(i), net.cards[i], {}});
  return phenocausal::DiscreteJoint::from_weights(vars, net.joint);
}

/// Complete graph over K1..Kn with K_i -> K_j for every i > j.
inline Dag descending_complete(std::size_t n) {
  std::vector<std::pair<std::string, std::string>> e;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j < i; ++j) e.emplace_back("K" + std::to_string(i), "K" + std::to_string(j));
  return Dag(phenocausal::default_names(n, "K"), e);
}

}  // namespace oracle
