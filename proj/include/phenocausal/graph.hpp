#pragma once

// DAG value type and the graph-theoretic queries used by every other module:
// d-separation, graphical causal sufficiency, marginal DAGs and backdoor
// admissibility. Node sets are always reported in node order.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phenocausal/errors.hpp"
#include "phenocausal/rng.hpp"

namespace phenocausal {

using NodeId = std::size_t;

/// Default cap on node count for exhaustive graph operations.
inline constexpr std::size_t kExhaustiveNodeCap = 7;

/// Sorted, duplicate-free set of node indices.
class NodeSet {
 public:
  NodeSet() = default;
  NodeSet(std::initializer_list<NodeId> ids) : ids_(ids) { normalize(); }
  explicit NodeSet(std::vector<NodeId> ids) : ids_(std::move(ids)) { normalize(); }

  static NodeSet from_mask(std::uint64_t mask) {
    NodeSet s;
    for (NodeId i = 0; mask != 0; ++i, mask >>= 1)
      if (mask & 1U) s.ids_.push_back(i);
    return s;
  }

  bool contains(NodeId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }
  void insert(NodeId id) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) ids_.insert(it, id);
  }
  void erase(NodeId id) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it != ids_.end() && *it == id) ids_.erase(it);
  }

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  auto begin() const noexcept { return ids_.begin(); }
  auto end() const noexcept { return ids_.end(); }
  NodeId operator[](std::size_t i) const { return ids_[i]; }
  const std::vector<NodeId>& ids() const noexcept { return ids_; }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (auto id : ids_) m |= std::uint64_t{1} << id;
    return m;
  }

  bool disjoint(const NodeSet& other) const {
    std::vector<NodeId> out;
    std::set_intersection(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
    return out.empty();
  }
  bool subset_of(const NodeSet& other) const {
    return std::includes(other.begin(), other.end(), begin(), end());
  }
  NodeSet united(const NodeSet& other) const {
    NodeSet r;
    std::set_union(begin(), end(), other.begin(), other.end(), std::back_inserter(r.ids_));
    return r;
  }
  NodeSet minus(const NodeSet& other) const {
    NodeSet r;
    std::set_difference(begin(), end(), other.begin(), other.end(), std::back_inserter(r.ids_));
    return r;
  }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  void normalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }
  std::vector<NodeId> ids_;
};

using Edge = std::pair<NodeId, NodeId>;
using NamedEdge = std::pair<std::string, std::string>;

/// Directed acyclic graph over named variables. Immutable once built; the
/// constructor rejects cycles, self-loops, duplicate edges and unknown endpoints.
class Dag {
 public:
  Dag() = default;

  explicit Dag(std::vector<std::string> nodes, const std::vector<NamedEdge>& edges = {})
      : names_(std::move(nodes)) {
    check_names();
    std::vector<Edge> ids;
    ids.reserve(edges.size());
    for (const auto& [u, v] : edges) ids.emplace_back(index_of(u), index_of(v));
    build(ids);
  }

  static Dag from_edges(std::vector<std::string> nodes, const std::vector<Edge>& edges) {
    Dag g;
    g.names_ = std::move(nodes);
    g.check_names();
    g.build(edges);
    return g;
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(NodeId id) const { return names_.at(id); }

  std::optional<NodeId> find(const std::string& name) const {
    for (NodeId i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }
  NodeId index_of(const std::string& name) const {
    if (auto id = find(name)) return *id;
    throw InvalidArgument("unknown node '" + name + "'");
  }

  NodeSet set(std::initializer_list<std::string> names) const {
    NodeSet s;
    for (const auto& n : names) s.insert(index_of(n));
    return s;
  }
  NodeSet set(const std::vector<std::string>& names) const {
    NodeSet s;
    for (const auto& n : names) s.insert(index_of(n));
    return s;
  }
  NodeSet all() const {
    std::vector<NodeId> ids(size());
    for (NodeId i = 0; i < size(); ++i) ids[i] = i;
    return NodeSet(std::move(ids));
  }
  std::vector<std::string> names_of(const NodeSet& s) const {
    std::vector<std::string> out;
    for (auto id : s) out.push_back(names_[id]);
    return out;
  }

  const std::vector<NodeId>& parents(NodeId id) const { return parents_.at(id); }
  const std::vector<NodeId>& children(NodeId id) const { return children_.at(id); }
  bool has_edge(NodeId u, NodeId v) const {
    const auto& c = children_.at(u);
    return std::binary_search(c.begin(), c.end(), v);
  }
  bool has_edge(const std::string& u, const std::string& v) const {
    return has_edge(index_of(u), index_of(v));
  }

  /// All edges sorted by (parent, child).
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (NodeId u = 0; u < size(); ++u)
      for (auto v : children_[u]) out.emplace_back(u, v);
    return out;
  }
  std::vector<NamedEdge> named_edges() const {
    std::vector<NamedEdge> out;
    for (auto [u, v] : edges()) out.emplace_back(names_[u], names_[v]);
    return out;
  }
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& c : children_) n += c.size();
    return n;
  }

  /// Stable topological order (Kahn's algorithm, smallest index first).
  const std::vector<NodeId>& topological_order() const noexcept { return topo_; }

  NodeSet descendants(NodeId id) const {
    NodeSet out;
    std::vector<NodeId> stack(children_.at(id));
    std::vector<char> seen(size(), 0);
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = 1;
      out.insert(v);
      for (auto c : children_[v]) stack.push_back(c);
    }
    return out;
  }

  /// Ancestors of the set, including the set itself.
  NodeSet ancestors_inclusive(const NodeSet& s) const {
    std::vector<char> seen(size(), 0);
    std::vector<NodeId> stack(s.begin(), s.end());
    NodeSet out;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = 1;
      out.insert(v);
      for (auto p : parents_[v]) stack.push_back(p);
    }
    return out;
  }

  Dag with_edge(NodeId u, NodeId v) const {
    auto e = edges();
    e.emplace_back(u, v);
    return from_edges(names_, e);
  }
  Dag without_edge(NodeId u, NodeId v) const {
    auto e = edges();
    std::erase(e, Edge{u, v});
    return from_edges(names_, e);
  }

  /// Graph with node i renamed to names[perm[i]] and reordered so that node
  /// perm[i] of the result corresponds to node i of this graph.
  Dag permuted(const std::vector<NodeId>& perm) const {
    std::vector<std::string> names(size());
    for (NodeId i = 0; i < size(); ++i) names[perm[i]] = names_[i];
    std::vector<Edge> e;
    for (auto [u, v] : edges()) e.emplace_back(perm[u], perm[v]);
    return from_edges(std::move(names), e);
  }

  friend bool operator==(const Dag& a, const Dag& b) {
    return a.names_ == b.names_ && a.children_ == b.children_;
  }

 private:
  void check_names() const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j]) throw InvalidArgument("duplicate node '" + names_[i] + "'");
  }

  void build(const std::vector<Edge>& edges) {
    const auto n = names_.size();
    parents_.assign(n, {});
    children_.assign(n, {});
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw InvalidArgument("edge endpoint is not a declared node");
      if (u == v) throw InvalidArgument("self-loop on '" + names_[u] + "'");
      auto& c = children_[u];
      if (std::find(c.begin(), c.end(), v) != c.end())
        throw InvalidArgument("duplicate edge " + names_[u] + " -> " + names_[v]);
      c.push_back(v);
      parents_[v].push_back(u);
    }
    for (auto& c : children_) std::sort(c.begin(), c.end());
    for (auto& p : parents_) std::sort(p.begin(), p.end());

    std::vector<std::size_t> indeg(n);
    for (NodeId v = 0; v < n; ++v) indeg[v] = parents_[v].size();
    topo_.clear();
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < n; ++v)
      if (indeg[v] == 0) ready.push_back(v);
    while (!ready.empty()) {
      auto it = std::min_element(ready.begin(), ready.end());
      auto v = *it;
      ready.erase(it);
      topo_.push_back(v);
      for (auto c : children_[v])
        if (--indeg[c] == 0) ready.push_back(c);
    }
    if (topo_.size() != n) throw CycleError("graph contains a directed cycle");
  }

  std::vector<std::string> names_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> topo_;
};

// ---------------------------------------------------------------------------
// d-separation

namespace detail {

inline void require_in_graph(const Dag& g, const NodeSet& s) {
  for (auto id : s)
    if (id >= g.size()) throw InvalidArgument("node set refers to a node outside the graph");
}

/// Nodes reachable from `source` by an active trail given `given` (Bayes-ball).
inline std::vector<char> active_reachable(const Dag& g, const NodeSet& source, const NodeSet& given) {
  const auto n = g.size();
  std::vector<char> in_given(n, 0), anc_given(n, 0), reach(n, 0);
  for (auto z : given) in_given[z] = 1;
  for (auto z : g.ancestors_inclusive(given)) anc_given[z] = 1;

  // visited[v][0]: arrived from a child (moving up); visited[v][1]: from a parent.
  std::vector<std::array<char, 2>> visited(n, {0, 0});
  std::deque<std::pair<NodeId, int>> queue;
  for (auto s : source) queue.emplace_back(s, 0);
  while (!queue.empty()) {
    auto [v, from_parent] = queue.front();
    queue.pop_front();
    if (visited[v][from_parent]) continue;
    visited[v][from_parent] = 1;
    if (!in_given[v]) reach[v] = 1;
    if (from_parent == 0) {
      if (!in_given[v]) {
        for (auto p : g.parents(v)) queue.emplace_back(p, 0);
        for (auto c : g.children(v)) queue.emplace_back(c, 1);
      }
    } else {
      if (!in_given[v])
        for (auto c : g.children(v)) queue.emplace_back(c, 1);
      if (anc_given[v])
        for (auto p : g.parents(v)) queue.emplace_back(p, 0);
    }
  }
  return reach;
}

}  // namespace detail

/// True iff every path between `a` and `b` is blocked by `c`.
/// Throws InvalidArgument when the three sets overlap.
inline bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
  detail::require_in_graph(g, a);
  detail::require_in_graph(g, b);
  detail::require_in_graph(g, c);
  if (!a.disjoint(b) || !a.disjoint(c) || !b.disjoint(c))
    throw InvalidArgument("d_separated: node sets must be pairwise disjoint");
  if (a.empty() || b.empty()) return true;
  const auto reach = detail::active_reachable(g, a, c);
  for (auto v : b)
    if (reach[v]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Sufficiency and marginalization

/// Members of `s` reachable from `start` by directed paths whose intermediate
/// nodes all lie outside `s`. `start` itself is never reported.
inline NodeSet first_hits_in(const Dag& g, NodeId start, const NodeSet& s) {
  NodeSet out;
  std::vector<char> seen(g.size(), 0);
  std::vector<NodeId> stack(g.children(start).begin(), g.children(start).end());
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    if (s.contains(v)) {
      out.insert(v);
      continue;
    }
    for (auto c : g.children(v)) stack.push_back(c);
  }
  return out;
}

/// First node outside `s` that causes two or more members of `s` through
/// paths avoiding `s`, if any.
inline std::optional<NodeId> hidden_common_cause(const Dag& g, const NodeSet& s) {
  detail::require_in_graph(g, s);
  for (NodeId c = 0; c < g.size(); ++c) {
    if (s.contains(c)) continue;
    if (first_hits_in(g, c, s).size() >= 2) return c;
  }
  return std::nullopt;
}

inline bool is_graphically_causally_sufficient(const Dag& g, const NodeSet& s) {
  return !hidden_common_cause(g, s).has_value();
}

/// Collapses every directed path through nodes outside `s` into a single edge.
/// No sufficiency check; `marginal_dag` is the checked entry point.
inline Dag collapse_directed_paths(const Dag& g, const NodeSet& s) {
  detail::require_in_graph(g, s);
  std::vector<std::string> names;
  std::vector<NodeId> new_id(g.size(), 0);
  for (auto id : s) {
    new_id[id] = names.size();
    names.push_back(g.name(id));
  }
  std::vector<Edge> edges;
  for (auto u : s)
    for (auto v : first_hits_in(g, u, s)) edges.emplace_back(new_id[u], new_id[v]);
  return Dag::from_edges(std::move(names), edges);
}

/// Marginal DAG on a graphically causally sufficient subset. Nodes keep the
/// relative order they have in `g`.
inline Dag marginal_dag(const Dag& g, const NodeSet& s) {
  if (auto c = hidden_common_cause(g, s)) {
    throw SufficiencyViolation(g.name(*c), "marginal_dag: '" + g.name(*c) +
                                               "' is a hidden common cause of the retained set");
  }
  return collapse_directed_paths(g, s);
}

/// Backdoor criterion for the ordered pair (x, y): `z` contains no descendant
/// of x and blocks every path between x and y that starts with an edge into x.
inline bool backdoor_admissible(const Dag& g, NodeId x, NodeId y, const NodeSet& z) {
  if (x == y) throw InvalidArgument("backdoor_admissible: x and y must differ");
  if (z.contains(x) || z.contains(y))
    throw InvalidArgument("backdoor_admissible: z must exclude x and y");
  detail::require_in_graph(g, z);
  const auto desc = g.descendants(x);
  if (!z.disjoint(desc)) return false;
  auto cut = g;
  for (auto c : g.children(x)) cut = cut.without_edge(x, c);
  return d_separated(cut, NodeSet{x}, NodeSet{y}, z);
}

// ---------------------------------------------------------------------------
// Enumeration and random generation

/// Every labeled DAG over `names`. Throws CapExceeded above `cap` nodes.
inline std::vector<Dag> enumerate_dags(const std::vector<std::string>& names,
                                       std::size_t cap = 5) {
  const auto n = names.size();
  if (n > cap) throw CapExceeded("enumerate_dags: node count above exhaustive cap");
  std::vector<Edge> pairs;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<Dag> out;
  std::vector<int> state(pairs.size(), 0);  // 0 none, 1 i->j, 2 j->i
  while (true) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (state[k] == 1) edges.push_back(pairs[k]);
      if (state[k] == 2) edges.emplace_back(pairs[k].second, pairs[k].first);
    }
    try {
      out.push_back(Dag::from_edges(names, edges));
    } catch (const CycleError&) {
    }
    std::size_t k = 0;
    while (k < state.size() && state[k] == 2) state[k++] = 0;
    if (k == state.size()) break;
    ++state[k];
  }
  return out;
}

/// Random DAG: a random causal order, each forward pair joined with `edge_prob`.
inline Dag random_dag(const std::vector<std::string>& names, double edge_prob, CounterRng& rng) {
  const auto n = names.size();
  std::vector<NodeId> order(n);
  for (NodeId i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(edge_prob)) edges.emplace_back(order[i], order[j]);
  return Dag::from_edges(names, edges);
}

inline std::vector<std::string> default_names(std::size_t n, const std::string& prefix = "X") {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace phenocausal
