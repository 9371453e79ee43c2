#pragma once

// Exact small-instance checks: changes of p(x) propagate to p(y) and p(x|y);
// embedding urns into controller variables keeps the joint Markov; a single
// changed factor stays single after marginalizing to a sufficient subset;
// backdoor adjustment in the marginal DAG agrees with truncated factorization
// in the full one. Each check returns a TrialRecord; randomized_suite draws
// instances from per-trial seeds so any record can be replayed.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phenocausal/discrete.hpp"
#include "phenocausal/errors.hpp"
#include "phenocausal/exemplars.hpp"
#include "phenocausal/graph.hpp"
#include "phenocausal/rng.hpp"
#include "phenocausal/scm.hpp"

namespace phenocausal {

struct TrialRecord {
  std::string verifier;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  bool rejected = false;  // precondition failed; not counted as a failure
  std::string detail;
  std::string instance;
  std::vector<std::pair<std::string, double>> measures;
  std::vector<std::string> changed;

  double measure(const std::string& key) const {
    for (const auto& [k, v] : measures)
      if (k == key) return v;
    throw InvalidArgument("no measure '" + key + "'");
  }
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct VerifierTally {
  std::size_t run = 0, rejected = 0, failed = 0;
};

struct VerificationReport {
  std::size_t trials = 0;
  std::vector<TrialRecord> entries;   // sorted by (verifier, trial)
  std::vector<TrialRecord> failures;  // subset of entries with ok == false
  std::vector<std::string> notes;     // counterexamples to side claims, logged not asserted
  std::map<std::string, VerifierTally> tally;

  bool pass() const { return failures.empty(); }

  void add(TrialRecord r) {
    auto& t = tally[r.verifier];
    ++t.run;
    ++trials;
    if (r.rejected) ++t.rejected;
    if (!r.ok) {
      ++t.failed;
      failures.push_back(r);
    }
    entries.push_back(std::move(r));
  }
};

namespace detail {

inline std::string set_text(const std::vector<std::string>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s + "}";
}

inline std::string graph_text(const Dag& g) {
  std::string s;
  for (const auto& [u, v] : g.named_edges()) s += (s.empty() ? "" : " ") + u + "->" + v;
  return s.empty() ? "(no edges)" : s;
}

inline std::vector<double> random_simplex(std::size_t k, CounterRng& rng, double lo = 0.05) {
  std::vector<double> v(k);
  double s = 0.0;
  for (auto& x : v) s += (x = lo + rng.uniform());
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random instances

/// Random conditional for node j of g: every row drawn at random, then mixed
/// with the uniform row at weight `uniform_mix` so it is strictly positive.
inline ConditionalTable random_conditional(const Dag& g, NodeId j, const std::vector<Variable>& vars,
                                           CounterRng& rng, double uniform_mix = 1e-3) {
  ConditionalTable t;
  t.target = vars.at(j);
  std::size_t ctx = 1;
  for (auto p : g.parents(j)) {
    t.conditioning.push_back(vars.at(p));
    ctx *= vars.at(p).cardinality;
  }
  const auto k = t.target.cardinality;
  t.table.resize(ctx * k);
  t.defined.assign(ctx, 1);
  for (std::size_t c = 0; c < ctx; ++c) {
    double s = 0.0;
    for (std::size_t v = 0; v < k; ++v) s += (t.table[c * k + v] = rng.uniform());
    for (std::size_t v = 0; v < k; ++v)
      t.table[c * k + v] = (1 - uniform_mix) * (s > 0 ? t.table[c * k + v] / s : 1.0 / double(k)) +
                           uniform_mix / double(k);
  }
  return t;
}

/// Random strictly positive joint that is Markov to g (variables in node order).
inline DiscreteJoint random_markov_joint(const Dag& g, const std::vector<std::size_t>& cards, CounterRng& rng,
                                         double uniform_mix = 1e-3) {
  std::vector<Variable> vars;
  for (NodeId i = 0; i < g.size(); ++i) vars.push_back({g.name(i), cards.at(i), {}});
  std::vector<ConditionalTable> f;
  for (NodeId j = 0; j < g.size(); ++j) f.push_back(random_conditional(g, j, vars, rng, uniform_mix));
  return compose(f, g, vars);
}

/// Random graphically causally sufficient subset by rejection; prefers at
/// least `min_size` members and falls back to a single node.
inline NodeSet random_sufficient_subset(const Dag& g, CounterRng& rng, std::size_t min_size = 2,
                                        std::size_t attempts = 200) {
  for (std::size_t a = 0; a < attempts; ++a) {
    NodeSet s;
    for (NodeId i = 0; i < g.size(); ++i)
      if (rng.bernoulli(0.5)) s.insert(i);
    if (s.size() < std::min(min_size, g.size())) continue;
    if (is_graphically_causally_sufficient(g, s)) return s;
  }
  return NodeSet{NodeId(rng.uniform_int(0, std::int64_t(g.size()) - 1))};
}

// ---------------------------------------------------------------------------
// Changes of p(x) in a square positive full-rank joint

/// p_xy is a joint over (X, Y) with X first. Builds p~(x, y) = p~(x) p(y|x)
/// and checks that a change of p(x) by more than `tol` in TV moves both p(y)
/// and some row of p(x|y) by more than `floor`.
inline TrialRecord verify_identifiability(const DiscreteJoint& p_xy, const std::vector<double>& new_marginal,
                                          double tol = 1e-3, double floor = 1e-12) {
  TrialRecord r;
  r.verifier = "prop1";
  if (p_xy.arity() != 2) throw InvalidArgument("identifiability check needs a joint over two variables");
  const auto kx = p_xy.variables()[0].cardinality, ky = p_xy.variables()[1].cardinality;
  if (new_marginal.size() != kx) throw InvalidArgument("new marginal has the wrong length");
  Eigen::MatrixXd m(kx, ky);
  double min_entry = 1.0;
  for (std::size_t x = 0; x < kx; ++x)
    for (std::size_t y = 0; y < ky; ++y) {
      m(Eigen::Index(x), Eigen::Index(y)) = p_xy[x * ky + y];
      min_entry = std::min(min_entry, p_xy[x * ky + y]);
    }
  std::ostringstream inst;
  inst.precision(17);
  inst << "p=" << m.format(Eigen::IOFormat(Eigen::FullPrecision, Eigen::DontAlignCols, ",", ";", "", "", "[", "]"))
       << " new_px=";
  for (std::size_t x = 0; x < kx; ++x) inst << (x ? "," : "[") << new_marginal[x];
  inst << "]";
  r.instance = inst.str();
  r.measures.emplace_back("min_entry", min_entry);
  if (kx != ky) {
    r.rejected = true;
    r.detail = "rejected: |X| != |Y|";
    return r;
  }
  const double smin = m.jacobiSvd().singularValues().minCoeff();
  r.measures.emplace_back("min_singular_value", smin);
  if (!(min_entry > 0)) {
    r.rejected = true;
    r.detail = "rejected: p(x,y) not strictly positive";
    return r;
  }
  if (!(smin > 1e-10)) {
    r.rejected = true;
    r.detail = "rejected: p(x,y) is rank deficient";
    return r;
  }
  Eigen::VectorXd px = m.rowwise().sum(), py = m.colwise().sum().transpose();
  Eigen::VectorXd qx = Eigen::Map<const Eigen::VectorXd>(new_marginal.data(), Eigen::Index(kx));
  Eigen::MatrixXd q(kx, ky);
  for (Eigen::Index x = 0; x < Eigen::Index(kx); ++x) q.row(x) = qx[x] * m.row(x) / px[x];
  Eigen::VectorXd qy = q.colwise().sum().transpose();
  const double tv_x = 0.5 * (qx - px).cwiseAbs().sum();
  const double tv_y = 0.5 * (qy - py).cwiseAbs().sum();
  double tv_xgy = 0.0;
  for (Eigen::Index y = 0; y < Eigen::Index(ky); ++y) {
    if (!(qy[y] > 0)) continue;
    tv_xgy = std::max(tv_xgy, 0.5 * (q.col(y) / qy[y] - m.col(y) / py[y]).cwiseAbs().sum());
  }
  r.measures.emplace_back("tv_px", tv_x);
  r.measures.emplace_back("tv_py", tv_y);
  r.measures.emplace_back("tv_px_given_y", tv_xgy);
  if (!(tv_x > tol)) {
    r.detail = "p(x) unchanged within tolerance; nothing to check";
    return r;
  }
  r.ok = tv_y > floor && tv_xgy > floor;
  if (!r.ok) r.detail = tv_y <= floor ? "p(y) did not change" : "p(x|y) did not change";
  return r;
}

// ---------------------------------------------------------------------------
// Embedding actions into controller variables

/// Coin biases of one action family as a function of its controllers' values.
struct ControlledAction {
  std::string action;  // family label, e.g. "A1"
  std::vector<std::string> controllers;
  std::function<CoinBias(const std::vector<double>&)> bias;
};

/// Controllers are ordinary structural nodes: their parents may be other
/// controllers or system variables; their noise must be finite.
struct ControllerSpec {
  std::vector<ScmNode> controllers;
  std::vector<ControlledAction> actions;
};

struct EmbeddingNode {
  std::string name;
  std::vector<std::string> parents;
  // finite law of the node given its parents' values, as (value, probability)
  std::function<std::vector<std::pair<double, double>>(const std::vector<double>&)> law;
};

struct Embedding {
  GeneralScm scm;
  Dag graph;  // G~
  std::vector<std::string> x_names, y_names;
  std::vector<EmbeddingNode> nodes;  // in the order of graph's nodes
};

/// Joint SCM over the exemplar's variables and the controllers. Each system
/// variable keeps its linear equation; the coin biases of the action family
/// driving its noise become functions of the controllers of that family.
/// Edges: the exemplar's own edges, Y_i -> X_j when Y_i controls the family
/// of X_j, and whatever parents the controllers declare.
inline Embedding build_embedding(const Exemplar& ex, const ControllerSpec& spec) {
  if (!ex.urn) throw InvalidArgument("build_embedding needs an urn or bundles exemplar");
  const auto& proc = *ex.urn;
  if (!proc.boundary_free())
    throw InvalidArgument("build_embedding needs initial counts that never hit zero (linear regime)");
  const auto lin = proc.linear(proc.bias);
  const auto n = proc.n;

  Embedding emb{GeneralScm({}), Dag(std::vector<std::string>{}), proc.names, {}, {}};
  std::map<std::string, std::size_t> family_node;  // action label -> position
  for (std::size_t m = 1; m <= n; ++m) family_node[proc.labels[m - 1]] = proc.pos(m);
  std::vector<const ControlledAction*> control(n, nullptr);
  for (const auto& ca : spec.actions) {
    auto it = family_node.find(ca.action);
    if (it == family_node.end()) throw InvalidArgument("unknown action family '" + ca.action + "'");
    if (control[it->second]) throw InvalidArgument("action family '" + ca.action + "' controlled twice");
    if (!ca.bias) throw InvalidArgument("action family '" + ca.action + "' has no bias mechanism");
    control[it->second] = &ca;
  }
  std::vector<std::string> names(proc.names);
  for (const auto& c : spec.controllers) {
    if (std::find(names.begin(), names.end(), c.name) != names.end())
      throw InvalidArgument("duplicate variable '" + c.name + "'");
    names.push_back(c.name);
    emb.y_names.push_back(c.name);
  }
  for (const auto& ca : spec.actions)
    for (const auto& y : ca.controllers)
      if (std::find(emb.y_names.begin(), emb.y_names.end(), y) == emb.y_names.end())
        throw InvalidArgument("unknown controller '" + y + "'");

  std::vector<ScmNode> scm_nodes;
  for (std::size_t p = 0; p < n; ++p) {
    EmbeddingNode node{proc.names[p], {}, {}};
    std::vector<double> coef;
    for (auto i : lin.graph().parents(p)) {
      node.parents.push_back(proc.names[i]);
      coef.push_back(lin.a()(Eigen::Index(p), Eigen::Index(i)));
    }
    const std::size_t n_sys = coef.size();
    const ControlledAction* ca = control[p];
    if (ca) node.parents.insert(node.parents.end(), ca->controllers.begin(), ca->controllers.end());
    const double off = lin.offsets()[Eigen::Index(p)];
    const CoinBias fixed = proc.bias[n - p - 1];
    const int rounds = proc.rounds;
    node.law = [coef, n_sys, ca, off, fixed, rounds](const std::vector<double>& pa) {
      double base = off;
      for (std::size_t k = 0; k < n_sys; ++k) base += coef[k] * pa[k];
      CoinBias b = fixed;
      if (ca) b = ca->bias(std::vector<double>(pa.begin() + std::ptrdiff_t(n_sys), pa.end()));
      std::vector<std::pair<double, double>> out;
      for (const auto& [v, w] : NoiseSpec::binomial_difference(rounds, b.plus, b.minus).pmf())
        if (w > 0) out.emplace_back(base + v, w);
      return out;
    };
    emb.nodes.push_back(node);
  }
  for (const auto& c : spec.controllers) {
    const auto pmf = c.noise.pmf();
    auto f = c.f;
    if (!f) throw InvalidArgument("controller '" + c.name + "' has no mechanism");
    emb.nodes.push_back({c.name, c.parents, [pmf, f](const std::vector<double>& pa) {
                           std::vector<std::pair<double, double>> out;
                           for (const auto& [v, w] : pmf)
                             if (w > 0) out.emplace_back(f(pa, v), w);
                           return out;
                         }});
  }
  std::vector<NamedEdge> edges;
  for (const auto& node : emb.nodes)
    for (const auto& pa : node.parents) edges.emplace_back(pa, node.name);
  emb.graph = Dag(names, edges);  // throws CycleError when G~ is not a DAG

  // Simulation view: system nodes sample their law by inverse CDF of a
  // uniform noise; controllers keep their own noise.
  for (std::size_t p = 0; p < n; ++p) {
    auto law = emb.nodes[p].law;
    scm_nodes.push_back({emb.nodes[p].name, emb.nodes[p].parents,
                         [law](const std::vector<double>& pa, double u) {
                           const auto pmf = law(pa);
                           double acc = 0.0;
                           for (const auto& [v, w] : pmf)
                             if (u < (acc += w)) return v;
                           return pmf.back().first;
                         },
                         NoiseSpec::uniform_real(0.0, 1.0)});
  }
  for (const auto& c : spec.controllers) scm_nodes.push_back(c);
  emb.scm = GeneralScm(std::move(scm_nodes));
  return emb;
}

/// Exact joint of an embedding by enumeration in topological order.
inline DiscreteJoint embedding_joint(const Embedding& emb, std::size_t cap = std::size_t{1} << 16) {
  const auto& g = emb.graph;
  std::vector<std::vector<NodeId>> pidx(g.size());
  for (NodeId j = 0; j < g.size(); ++j)
    for (const auto& p : emb.nodes[j].parents) pidx[j].push_back(g.index_of(p));
  const auto order = g.topological_order();
  std::vector<Outcome> leaves;
  std::vector<double> x(g.size(), 0.0);
  std::function<void(std::size_t, double)> walk = [&](std::size_t k, double w) {
    if (k == order.size()) {
      leaves.push_back({x, w});
      if (leaves.size() > cap * 64) throw CapExceeded("embedding enumeration above cap");
      return;
    }
    const auto j = order[k];
    std::vector<double> pa;
    for (auto i : pidx[j]) pa.push_back(x[i]);
    for (const auto& [v, p] : emb.nodes[j].law(pa)) {
      x[j] = v;
      walk(k + 1, w * p);
    }
  };
  walk(0, 1.0);
  auto joint = joints_on_common_support(g.names(), {leaves}).front();
  if (joint.size() > cap) throw CapExceeded("embedding state space above cap");
  return joint;
}

/// Exact check that the embedding's joint is Markov to G~ (or to `graph` when
/// given, e.g. a deliberately wrong one).
inline TrialRecord verify_embedding_markov(const Embedding& emb, double eps = 1e-12,
                                           const std::optional<Dag>& graph = std::nullopt) {
  TrialRecord r;
  r.verifier = "embedding";
  const Dag& g = graph ? *graph : emb.graph;
  r.instance = detail::graph_text(g);
  const auto joint = embedding_joint(emb);
  r.measures.emplace_back("states", double(joint.size()));
  r.measures.emplace_back("factorization_residual", factorization_residual(joint, g));
  const auto v = markov_violations(joint, g, eps, 1);
  r.ok = v.empty();
  if (!r.ok) {
    const auto& c = v.front();
    r.detail = "violated: " + detail::set_text(c.a) + " independent of " + detail::set_text(c.b) + " given " +
               detail::set_text(c.c);
    r.measures.emplace_back("residual", c.residual);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Boundary consistency

/// p is Markov to g; p~ replaces node j's conditional by `new_factor`. After
/// marginalizing both to the sufficient subset s, at most one conditional of
/// the marginal DAG may differ: j's own when j is in s, otherwise the single
/// member of s that j reaches first along directed paths.
inline TrialRecord verify_boundary_consistency(const Dag& g, const DiscreteJoint& p, NodeId j,
                                               const ConditionalTable& new_factor, const NodeSet& s,
                                               double eps = kExactEps) {
  TrialRecord r;
  r.verifier = "boundary";
  std::vector<std::string> snames = g.names_of(s);
  r.instance = "g: " + detail::graph_text(g) + "; j=" + g.name(j) + "; s=" + detail::set_text(snames);
  if (s.empty()) throw InvalidArgument("boundary check needs a nonempty subset");
  const double fr = factorization_residual(p, g);
  r.measures.emplace_back("factorization_residual", fr);
  if (fr > eps) {
    r.rejected = true;
    r.detail = "rejected: p is not Markov to g";
    return r;
  }
  if (*std::min_element(p.probs().begin(), p.probs().end()) <= 0) {
    r.rejected = true;
    r.detail = "rejected: p is not strictly positive";
    return r;
  }
  if (auto c = hidden_common_cause(g, s)) {
    r.rejected = true;
    r.detail = "rejected: subset not causally sufficient (hidden common cause " + g.name(*c) + ")";
    return r;
  }
  const auto q = soft_intervention(p, g, j, new_factor);
  std::vector<std::size_t> keep;
  for (auto i : s) keep.push_back(p.index_of(g.name(i)));
  const auto ps = p.marginal(keep), qs = q.marginal(keep);
  const auto gs = marginal_dag(g, s);
  const auto changed = changed_factors(ps, qs, gs, eps);
  r.changed = gs.names_of(changed);
  r.measures.emplace_back("changed_count", double(changed.size()));
  r.measures.emplace_back("tv_full", tv_distance(p, q));
  r.measures.emplace_back("tv_marginal", tv_distance(ps, qs));

  std::vector<std::string> allowed;
  if (s.contains(j)) {
    allowed.push_back(g.name(j));
  } else {
    const auto hits = first_hits_in(g, j, s);
    r.measures.emplace_back("first_hits", double(hits.size()));
    for (auto h : hits) allowed.push_back(g.name(h));
  }
  bool within = true;
  for (const auto& c : r.changed) within = within && std::find(allowed.begin(), allowed.end(), c) != allowed.end();
  r.ok = changed.size() <= 1 && within;
  if (!r.ok)
    r.detail = "changed " + detail::set_text(r.changed) + ", allowed " + detail::set_text(allowed);
  else if (allowed.size() > 1)
    r.detail = "note: " + g.name(j) + " reaches several members of s first";
  return r;
}

// ---------------------------------------------------------------------------
// Backdoor adjustment in the marginal DAG

/// For z backdoor-admissible for (x, y) in G_S: sum_z p(y|x,z) p(z) computed
/// from the marginal must equal p(y | do(x)) from truncated factorization in
/// g, entrywise within tol.
inline TrialRecord verify_backdoor_preservation(const Dag& g, const DiscreteJoint& p, const NodeSet& s, NodeId x,
                                                NodeId y, const NodeSet& z, double tol = 1e-9) {
  TrialRecord r;
  r.verifier = "backdoor";
  r.instance = "g: " + detail::graph_text(g) + "; s=" + detail::set_text(g.names_of(s)) + "; x=" + g.name(x) +
               "; y=" + g.name(y) + "; z=" + detail::set_text(g.names_of(z));
  if (!s.contains(x) || !s.contains(y)) throw InvalidArgument("x and y must lie in s");
  for (auto v : z)
    if (!s.contains(v)) throw InvalidArgument("z must lie in s");
  const auto gs = marginal_dag(g, s);
  auto in_gs = [&](NodeId v) { return *gs.find(g.name(v)); };
  NodeSet zs;
  for (auto v : z) zs.insert(in_gs(v));
  if (!backdoor_admissible(gs, in_gs(x), in_gs(y), zs)) {
    r.rejected = true;
    r.detail = "rejected: z is not backdoor admissible in the marginal DAG";
    return r;
  }
  const bool in_full = backdoor_admissible(g, x, y, z);
  r.measures.emplace_back("admissible_in_full_graph", in_full ? 1.0 : 0.0);

  // columns: z..., x, y
  std::vector<std::size_t> keep;
  for (auto v : z) keep.push_back(p.index_of(g.name(v)));
  keep.push_back(p.index_of(g.name(x)));
  keep.push_back(p.index_of(g.name(y)));
  const auto m = p.marginal(keep);
  const auto kx = p.variables()[keep[keep.size() - 2]].cardinality;
  const auto ky = p.variables()[keep.back()].cardinality;
  const auto nz = m.size() / (kx * ky);
  double worst = 0.0;
  for (std::size_t a = 0; a < kx; ++a) {
    const auto truncated = hard_intervention(p, g, x, a).marginal(std::vector<std::size_t>{keep.back()});
    for (std::size_t b = 0; b < ky; ++b) {
      double adj = 0.0;
      for (std::size_t c = 0; c < nz; ++c) {
        double pz = 0.0, pxz = 0.0;
        for (std::size_t aa = 0; aa < kx; ++aa)
          for (std::size_t bb = 0; bb < ky; ++bb) pz += m[(c * kx + aa) * ky + bb];
        for (std::size_t bb = 0; bb < ky; ++bb) pxz += m[(c * kx + a) * ky + bb];
        if (pxz > 0) adj += m[(c * kx + a) * ky + b] / pxz * pz;
      }
      worst = std::max(worst, std::abs(adj - truncated[b]));
    }
  }
  r.measures.emplace_back("max_abs_difference", worst);
  r.ok = worst <= tol && in_full;
  if (!r.ok) r.detail = in_full ? "adjustment and truncated factorization disagree" : "z not admissible in g";
  return r;
}

// ---------------------------------------------------------------------------
// Randomized suite

struct SuiteConfig {
  std::size_t prop_trials = 1000;
  std::size_t boundary_trials = 500;
  std::size_t embedding_trials = 20;
  std::size_t backdoor_trials = 200;
  std::size_t max_nodes = 6;
  double eps = kExactEps;
  double embedding_eps = 1e-12;
  double prop_tol = 1e-3;
  double prop_floor = 1e-12;
  std::size_t jobs = 1;
};

inline const std::vector<std::string>& verifier_names() {
  static const std::vector<std::string> v{"prop1", "boundary", "embedding", "backdoor"};
  return v;
}

/// Seed of trial t of a verifier under the suite seed.
inline std::uint64_t trial_seed(std::uint64_t suite_seed, const std::string& verifier, std::size_t t) {
  std::uint64_t salt = 0;
  for (char c : verifier) salt = salt * 131 + std::uint64_t(static_cast<unsigned char>(c));
  return derive_seed(derive_seed(suite_seed, salt), t);
}

namespace detail {

inline Dag random_instance_graph(CounterRng& rng, std::size_t max_nodes) {
  const auto n = std::size_t(rng.uniform_int(2, std::int64_t(std::max<std::size_t>(2, max_nodes))));
  return random_dag(default_names(n), rng.uniform(0.2, 0.8), rng);
}

inline TrialRecord prop_trial(std::uint64_t seed, const SuiteConfig& cfg) {
  CounterRng rng(seed, 0);
  const auto k = std::size_t(rng.uniform_int(2, 4));
  std::vector<double> w(k * k);
  for (auto& v : w) v = 0.02 + rng.uniform();
  auto p = DiscreteJoint::from_weights({{"X", k, {}}, {"Y", k, {}}}, w);
  std::vector<double> px(k, 0.0);
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = 0; y < k; ++y) px[x] += p[x * k + y];
  std::vector<double> q;
  for (int attempt = 0; attempt < 100; ++attempt) {
    q = random_simplex(k, rng, 0.01);
    double tv = 0.0;
    for (std::size_t x = 0; x < k; ++x) tv += 0.5 * std::abs(q[x] - px[x]);
    if (tv > cfg.prop_tol) break;
  }
  return verify_identifiability(p, q, cfg.prop_tol, cfg.prop_floor);
}

inline TrialRecord boundary_trial(std::uint64_t seed, const SuiteConfig& cfg) {
  CounterRng rng(seed, 0);
  auto g = random_instance_graph(rng, cfg.max_nodes);
  const std::vector<std::size_t> cards(g.size(), 2);
  auto p = random_markov_joint(g, cards, rng);
  const auto j = NodeId(rng.uniform_int(0, std::int64_t(g.size()) - 1));
  std::vector<Variable> vars;
  for (NodeId i = 0; i < g.size(); ++i) vars.push_back({g.name(i), 2, {}});
  auto t = random_conditional(g, j, vars, rng);
  auto s = random_sufficient_subset(g, rng);
  return verify_boundary_consistency(g, p, j, t, s, cfg.eps);
}

inline TrialRecord backdoor_trial(std::uint64_t seed, const SuiteConfig& cfg) {
  CounterRng rng(seed, 0);
  auto g = random_instance_graph(rng, cfg.max_nodes);
  auto p = random_markov_joint(g, std::vector<std::size_t>(g.size(), 2), rng);
  auto s = random_sufficient_subset(g, rng, 2);
  if (s.size() < 2) s = NodeSet{0, 1};  // two nodes are always sufficient when n == 2
  if (!is_graphically_causally_sufficient(g, s)) {
    TrialRecord r;
    r.verifier = "backdoor";
    r.rejected = true;
    r.detail = "rejected: no sufficient pair found";
    return r;
  }
  std::vector<NodeId> members(s.begin(), s.end());
  const auto xi = std::size_t(rng.uniform_int(0, std::int64_t(members.size()) - 1));
  auto yi = std::size_t(rng.uniform_int(0, std::int64_t(members.size()) - 2));
  if (yi >= xi) ++yi;
  const NodeId x = members[xi], y = members[yi];
  const auto gs = marginal_dag(g, s);
  auto in_gs = [&](NodeId v) { return *gs.find(g.name(v)); };
  NodeSet z;
  for (auto v : members)
    if (v != x && v != y && rng.bernoulli(0.5)) z.insert(v);
  NodeSet zs;
  for (auto v : z) zs.insert(in_gs(v));
  if (!backdoor_admissible(gs, in_gs(x), in_gs(y), zs)) {
    // parents of x in G_S block every backdoor path unless y is one of them
    z = NodeSet{};
    for (auto pa : gs.parents(in_gs(x))) z.insert(g.index_of(gs.name(pa)));
    if (z.contains(y)) {
      TrialRecord r;
      r.verifier = "backdoor";
      r.rejected = true;
      r.instance = "g: " + graph_text(g) + "; x=" + g.name(x) + "; y=" + g.name(y);
      r.detail = "rejected: y is a parent of x in the marginal DAG";
      return r;
    }
  }
  return verify_backdoor_preservation(g, p, s, x, y, z, 1e-9);
}

inline ScmNode binary_controller(std::string name, std::vector<std::string> parents, double p_one,
                                 std::function<double(const std::vector<double>&, double)> f) {
  return {std::move(name), std::move(parents), std::move(f),
          NoiseSpec::categorical({0.0, 1.0}, {1.0 - p_one, p_one})};
}

inline TrialRecord embedding_trial(std::uint64_t seed, const SuiteConfig& cfg) {
  CounterRng rng(seed, 0);
  const int rounds = int(rng.uniform_int(1, 2));
  auto ex = urn_bivariate(rounds + 1, 2 * rounds, rounds, {}, seed, {0.3, false});
  auto table = [&rng](std::size_t configs) {
    std::vector<CoinBias> b(configs);
    for (auto& c : b) c = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    return b;
  };
  auto pick = [](const std::vector<CoinBias>& b) {
    return [b](const std::vector<double>& v) {
      std::size_t k = 0;
      for (double x : v) k = 2 * k + (x > 0.5 ? 1 : 0);
      return b.at(k);
    };
  };
  const int shape = int(rng.uniform_int(0, 2));
  ControllerSpec spec;
  auto copy = [](const std::vector<double>&, double u) { return u; };
  if (shape == 0) {  // independent controllers, one per family
    spec.controllers = {binary_controller("Y1", {}, rng.uniform(0.2, 0.8), copy),
                        binary_controller("Y2", {}, rng.uniform(0.2, 0.8), copy)};
    spec.actions = {{"A1", {"Y1"}, pick(table(2))}, {"A2", {"Y2"}, pick(table(2))}};
  } else if (shape == 1) {  // chain, both feeding A2
    spec.controllers = {binary_controller("Y1", {}, rng.uniform(0.2, 0.8), copy),
                        binary_controller("Y2", {"Y1"}, rng.uniform(0.1, 0.4),
                                          [](const std::vector<double>& pa, double u) {
                                            return double(int(pa[0]) ^ int(u));
                                          })};
    spec.actions = {{"A2", {"Y1", "Y2"}, pick(table(4))}};
  } else {  // a system variable drives a controller of a later family
    const double kb0 = rounds + 1;
    spec.controllers = {binary_controller("Y1", {}, rng.uniform(0.2, 0.8), copy),
                        binary_controller("Y2", {"Kb"}, rng.uniform(0.1, 0.4),
                                          [kb0](const std::vector<double>& pa, double u) {
                                            return double(int(pa[0] > kb0) ^ int(u));
                                          })};
    spec.actions = {{"A1", {"Y1"}, pick(table(2))}, {"A2", {"Y2"}, pick(table(2))}};
  }
  auto emb = build_embedding(ex, spec);
  auto r = verify_embedding_markov(emb, cfg.embedding_eps);
  r.instance = "rounds=" + std::to_string(rounds) + " shape=" + std::to_string(shape) + " " + r.instance;
  return r;
}

}  // namespace detail

/// One trial of a verifier from its seed; identical seeds give identical records.
inline TrialRecord replay_trial(const std::string& verifier, std::uint64_t seed, const SuiteConfig& cfg = {}) {
  TrialRecord r;
  if (verifier == "prop1") r = detail::prop_trial(seed, cfg);
  else if (verifier == "boundary") r = detail::boundary_trial(seed, cfg);
  else if (verifier == "embedding") r = detail::embedding_trial(seed, cfg);
  else if (verifier == "backdoor") r = detail::backdoor_trial(seed, cfg);
  else throw InvalidArgument("unknown verifier '" + verifier + "'");
  r.verifier = verifier;
  r.seed = seed;
  return r;
}

/// Runs the requested verifiers (all when `which` is empty). Trials may run
/// on `cfg.jobs` threads; records are collected by index so the report does
/// not depend on the thread count.
inline VerificationReport randomized_suite(const SuiteConfig& cfg, std::uint64_t seed,
                                           const std::vector<std::string>& which = {}) {
  VerificationReport rep;
  const auto& list = which.empty() ? verifier_names() : which;
  for (const auto& v : list) {
    std::size_t n = 0;
    if (v == "prop1") n = cfg.prop_trials;
    else if (v == "boundary") n = cfg.boundary_trials;
    else if (v == "embedding") n = cfg.embedding_trials;
    else if (v == "backdoor") n = cfg.backdoor_trials;
    else throw InvalidArgument("unknown verifier '" + v + "'");
    std::vector<TrialRecord> out(n);
    auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        out[t] = replay_trial(v, trial_seed(seed, v, t), cfg);
        out[t].trial = t;
      }
    };
    const auto jobs = std::max<std::size_t>(1, std::min(cfg.jobs, n));
    if (jobs == 1) {
      work(0, n);
    } else {
      std::vector<std::future<void>> fs;
      for (std::size_t k = 0; k < jobs; ++k) fs.push_back(std::async(std::launch::async, work, n * k / jobs, n * (k + 1) / jobs));
      for (auto& f : fs) f.get();
    }
    for (auto& r : out) {
      if (r.detail.rfind("note:", 0) == 0) rep.notes.push_back(v + " trial " + std::to_string(r.trial) + ": " + r.detail);
      rep.add(std::move(r));
    }
    rep.tally[v];  // present even with zero trials
  }
  return rep;
}

}  // namespace phenocausal
