#pragma once

// Exact joint probability tables over finite variables: factorization over a
// DAG, conditional tables, hard/soft interventions, Markov checks and the
// detection of which causal conditionals differ between two joints.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phenocausal/errors.hpp"
#include "phenocausal/graph.hpp"

namespace phenocausal {

/// Cap on table entries for exact joints.
inline constexpr std::size_t kMaxTableEntries = std::size_t{1} << 20;
/// Default tolerance for "unchanged conditional" on exact arithmetic paths.
inline constexpr double kExactEps = 1e-9;

/// A finite variable. `values` optionally labels the states with numbers;
/// when empty, state i has value i.
struct Variable {
  std::string name;
  std::size_t cardinality = 0;
  std::vector<double> values;

  double value(std::size_t state) const {
    return values.empty() ? static_cast<double>(state) : values.at(state);
  }
  friend bool operator==(const Variable&, const Variable&) = default;
};

namespace detail {

inline std::size_t table_size(const std::vector<Variable>& vars) {
  std::size_t n = 1;
  for (const auto& v : vars) {
    if (v.cardinality == 0) throw InvalidArgument("variable '" + v.name + "' has cardinality 0");
    if (!v.values.empty() && v.values.size() != v.cardinality)
      throw InvalidArgument("variable '" + v.name + "' has mismatched value labels");
    if (n > kMaxTableEntries / v.cardinality)
      throw CapExceeded("joint table would exceed the entry cap");
    n *= v.cardinality;
  }
  return n;
}

inline std::vector<std::size_t> strides_of(const std::vector<Variable>& vars) {
  std::vector<std::size_t> s(vars.size(), 1);
  for (std::size_t i = vars.size(); i-- > 1;) s[i - 1] = s[i] * vars[i].cardinality;
  return s;
}

}  // namespace detail

/// Exact joint distribution; probabilities are stored row-major with the last
/// variable varying fastest.
class DiscreteJoint {
 public:
  DiscreteJoint() = default;

  DiscreteJoint(std::vector<Variable> vars, std::vector<double> probs, double tol = 1e-12)
      : vars_(std::move(vars)), probs_(std::move(probs)) {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      for (std::size_t j = i + 1; j < vars_.size(); ++j)
        if (vars_[i].name == vars_[j].name)
          throw InvalidArgument("duplicate variable '" + vars_[i].name + "'");
    if (probs_.size() != detail::table_size(vars_))
      throw InvalidArgument("probability table shape does not match cardinalities");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) throw InvalidArgument("negative or NaN probability");
      total += p;
    }
    if (std::abs(total - 1.0) > tol) throw InvalidArgument("probabilities do not sum to 1");
    strides_ = detail::strides_of(vars_);
  }

  /// Normalizes nonnegative weights into a joint.
  static DiscreteJoint from_weights(std::vector<Variable> vars, std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw InvalidArgument("weights must have positive total");
    for (double& w : weights) w /= total;
    return DiscreteJoint(std::move(vars), std::move(weights));
  }

  static DiscreteJoint uniform(std::vector<Variable> vars) {
    auto n = detail::table_size(vars);
    return DiscreteJoint(std::move(vars), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  const std::vector<Variable>& variables() const noexcept { return vars_; }
  std::size_t arity() const noexcept { return vars_.size(); }
  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double operator[](std::size_t flat) const { return probs_[flat]; }
  const std::vector<std::size_t>& strides() const noexcept { return strides_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& v : vars_) out.push_back(v.name);
    return out;
  }
  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name == name) return i;
    return std::nullopt;
  }
  std::size_t index_of(const std::string& name) const {
    if (auto i = find(name)) return *i;
    throw InvalidArgument("unknown variable '" + name + "'");
  }

  std::size_t state_of(std::size_t flat, std::size_t var) const {
    return (flat / strides_[var]) % vars_[var].cardinality;
  }
  std::vector<std::size_t> decode(std::size_t flat) const {
    std::vector<std::size_t> s(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) s[i] = state_of(flat, i);
    return s;
  }
  std::size_t encode(const std::vector<std::size_t>& states) const {
    std::size_t f = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) f += states.at(i) * strides_[i];
    return f;
  }

  /// Marginal over the listed variables, in the listed order.
  DiscreteJoint marginal(const std::vector<std::size_t>& keep) const {
    std::vector<Variable> vars;
    for (auto k : keep) vars.push_back(vars_.at(k));
    auto sub_strides = detail::strides_of(vars);
    std::vector<double> out(detail::table_size(vars), 0.0);
    for (std::size_t f = 0; f < probs_.size(); ++f) {
      if (probs_[f] == 0.0) continue;
      std::size_t g = 0;
      for (std::size_t i = 0; i < keep.size(); ++i) g += state_of(f, keep[i]) * sub_strides[i];
      out[g] += probs_[f];
    }
    DiscreteJoint m;
    m.vars_ = std::move(vars);
    m.probs_ = std::move(out);
    m.strides_ = std::move(sub_strides);
    return m;
  }
  DiscreteJoint marginal(const std::vector<std::string>& keep) const {
    std::vector<std::size_t> idx;
    for (const auto& n : keep) idx.push_back(index_of(n));
    return marginal(idx);
  }

  bool same_variables(const DiscreteJoint& other) const { return vars_ == other.vars_; }

  friend bool operator==(const DiscreteJoint&, const DiscreteJoint&) = default;

 private:
  std::vector<Variable> vars_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

/// p(target | conditioning). Row `ctx` (row-major over the conditioning
/// variables) holds the target distribution; rows whose context has zero
/// probability are flagged undefined and hold zeros.
struct ConditionalTable {
  Variable target;
  std::vector<Variable> conditioning;
  std::vector<double> table;
  std::vector<char> defined;

  std::size_t contexts() const { return defined.size(); }
  double prob(std::size_t ctx, std::size_t state) const {
    return table[ctx * target.cardinality + state];
  }

  /// Checks shape and per-row normalization.
  void validate(double tol = 1e-12) const {
    std::size_t ctx = 1;
    for (const auto& v : conditioning) ctx *= v.cardinality;
    if (defined.size() != ctx || table.size() != ctx * target.cardinality)
      throw InvalidArgument("conditional table for '" + target.name + "' has wrong shape");
    for (std::size_t c = 0; c < ctx; ++c) {
      if (!defined[c]) continue;
      double s = 0.0;
      for (std::size_t v = 0; v < target.cardinality; ++v) {
        if (!(prob(c, v) >= 0.0)) throw InvalidArgument("negative conditional probability");
        s += prob(c, v);
      }
      if (std::abs(s - 1.0) > tol)
        throw InvalidArgument("conditional row for '" + target.name + "' does not sum to 1");
    }
  }

  std::vector<std::string> conditioning_names() const {
    std::vector<std::string> out;
    for (const auto& v : conditioning) out.push_back(v.name);
    return out;
  }

  friend bool operator==(const ConditionalTable&, const ConditionalTable&) = default;
};

/// p(target | conditioning) computed from a joint.
inline ConditionalTable conditional(const DiscreteJoint& p, std::size_t target,
                                    const std::vector<std::size_t>& conditioning) {
  std::vector<std::size_t> keep(conditioning);
  keep.push_back(target);
  const auto m = p.marginal(keep);
  ConditionalTable t;
  t.target = p.variables()[target];
  for (auto c : conditioning) t.conditioning.push_back(p.variables()[c]);
  const auto k = t.target.cardinality;
  const auto ctx = m.size() / k;
  t.table.assign(m.size(), 0.0);
  t.defined.assign(ctx, 0);
  for (std::size_t c = 0; c < ctx; ++c) {
    double mass = 0.0;
    for (std::size_t v = 0; v < k; ++v) mass += m[c * k + v];
    if (mass <= 0.0) continue;
    t.defined[c] = 1;
    for (std::size_t v = 0; v < k; ++v) t.table[c * k + v] = m[c * k + v] / mass;
  }
  return t;
}

namespace detail {

/// Index of each graph node's variable within the joint; throws on mismatch.
inline std::vector<std::size_t> align(const DiscreteJoint& p, const Dag& g) {
  if (p.arity() != g.size())
    throw InvalidArgument("joint variables do not match graph nodes");
  std::vector<std::size_t> idx(g.size());
  for (NodeId i = 0; i < g.size(); ++i) {
    auto k = p.find(g.name(i));
    if (!k) throw InvalidArgument("graph node '" + g.name(i) + "' is not a joint variable");
    idx[i] = *k;
  }
  return idx;
}

}  // namespace detail

/// One conditional per graph node (in node order), each given its parents.
inline std::vector<ConditionalTable> factorize(const DiscreteJoint& p, const Dag& g) {
  const auto idx = detail::align(p, g);
  std::vector<ConditionalTable> out;
  out.reserve(g.size());
  for (NodeId j = 0; j < g.size(); ++j) {
    std::vector<std::size_t> pa;
    for (auto q : g.parents(j)) pa.push_back(idx[q]);
    out.push_back(conditional(p, idx[j], pa));
  }
  return out;
}

/// Joint over `vars` obtained as the product of per-node factors of `g`.
/// Throws UndefinedConditional when positive mass reaches an undefined row.
inline DiscreteJoint compose(const std::vector<ConditionalTable>& factors, const Dag& g,
                             const std::vector<Variable>& vars) {
  if (factors.size() != g.size()) throw InvalidArgument("one factor per node required");
  const auto n = detail::table_size(vars);
  const auto strides = detail::strides_of(vars);
  std::vector<std::size_t> idx(g.size());
  for (NodeId i = 0; i < g.size(); ++i) {
    auto it = std::find_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == g.name(i); });
    if (it == vars.end()) throw InvalidArgument("factor node missing from variable list");
    idx[i] = static_cast<std::size_t>(it - vars.begin());
    if (factors[i].target != *it) throw InvalidArgument("factor target does not match variable");
  }
  std::vector<double> probs(n, 0.0);
  const auto& topo = g.topological_order();
  for (std::size_t f = 0; f < n; ++f) {
    double prod = 1.0;
    for (auto j : topo) {
      const auto& t = factors[j];
      std::size_t ctx = 0;
      for (std::size_t k = 0; k < g.parents(j).size(); ++k) {
        const auto v = idx[g.parents(j)[k]];
        ctx = ctx * t.conditioning[k].cardinality + (f / strides[v]) % vars[v].cardinality;
      }
      if (!t.defined[ctx])
        throw UndefinedConditional("mass reaches an undefined context of '" + t.target.name + "'");
      prod *= t.prob(ctx, (f / strides[idx[j]]) % vars[idx[j]].cardinality);
      if (prod == 0.0) break;
    }
    probs[f] = prod;
  }
  return DiscreteJoint::from_weights(vars, std::move(probs));
}

// ---------------------------------------------------------------------------
// Distances and conditional comparison

inline double tv_distance(const DiscreteJoint& p, const DiscreteJoint& q) {
  if (!p.same_variables(q)) throw InvalidArgument("tv_distance: variable mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw InvalidArgument("tv_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

/// Max over contexts of the total-variation distance between two conditional
/// tables. Contexts undefined in both are skipped; contexts defined in exactly
/// one yield +infinity.
inline double conditional_distance(const ConditionalTable& a, const ConditionalTable& b) {
  if (a.target != b.target || a.conditioning != b.conditioning)
    throw InvalidArgument("conditional tables have different shapes");
  double worst = 0.0;
  const auto k = a.target.cardinality;
  for (std::size_t c = 0; c < a.contexts(); ++c) {
    if (!a.defined[c] && !b.defined[c]) continue;
    if (a.defined[c] != b.defined[c]) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t v = 0; v < k; ++v) s += std::abs(a.table[c * k + v] - b.table[c * k + v]);
    worst = std::max(worst, 0.5 * s);
  }
  return worst;
}

/// Nodes of `g` whose causal conditional differs between p and q by more than eps.
inline NodeSet changed_factors(const DiscreteJoint& p, const DiscreteJoint& q, const Dag& g,
                               double eps = kExactEps) {
  if (!p.same_variables(q)) throw InvalidArgument("changed_factors: variable mismatch");
  const auto fp = factorize(p, g);
  const auto fq = factorize(q, g);
  NodeSet out;
  for (NodeId j = 0; j < g.size(); ++j)
    if (conditional_distance(fp[j], fq[j]) > eps) out.insert(j);
  return out;
}

// ---------------------------------------------------------------------------
// Markov property

/// Residual of a ⟂ b | c: max over positive contexts of c of
/// TV(p(a,b|c), p(a|c) p(b|c)).
inline double ci_residual(const DiscreteJoint& p, const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b, const std::vector<std::size_t>& c) {
  std::vector<std::size_t> keep(c);
  keep.insert(keep.end(), a.begin(), a.end());
  keep.insert(keep.end(), b.begin(), b.end());
  const auto m = p.marginal(keep);
  std::size_t na = 1, nb = 1;
  for (auto i : a) na *= p.variables()[i].cardinality;
  for (auto i : b) nb *= p.variables()[i].cardinality;
  const auto nc = m.size() / (na * nb);
  double worst = 0.0;
  std::vector<double> pa(na), pb(nb);
  for (std::size_t ctx = 0; ctx < nc; ++ctx) {
    const double* block = m.probs().data() + ctx * na * nb;
    double mass = 0.0;
    std::fill(pa.begin(), pa.end(), 0.0);
    std::fill(pb.begin(), pb.end(), 0.0);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j) {
        pa[i] += block[i * nb + j];
        pb[j] += block[i * nb + j];
        mass += block[i * nb + j];
      }
    if (mass <= 0.0) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j)
        s += std::abs(block[i * nb + j] / mass - (pa[i] / mass) * (pb[j] / mass));
    worst = std::max(worst, 0.5 * s);
  }
  return worst;
}

/// A conditional independence implied by the graph but violated by the joint.
struct CiViolation {
  std::vector<std::string> a, b, c;
  double residual = 0.0;
};

/// Every d-separation statement (a ⟂ b | c) of `g` whose residual exceeds eps.
/// Each unordered {a, b} pair is tested once. Stops after `max_reports`.
inline std::vector<CiViolation> markov_violations(const DiscreteJoint& p, const Dag& g, double eps,
                                                  std::size_t max_reports = 1,
                                                  std::size_t node_cap = kExhaustiveNodeCap) {
  const auto idx = detail::align(p, g);
  const auto n = g.size();
  if (n > node_cap) throw CapExceeded("markov check: node count above exhaustive cap");
  std::vector<CiViolation> out;
  // role per node: 0 none, 1 a, 2 b, 3 c
  std::vector<int> role(n, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 4;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t x = code;
    NodeSet a, b, c;
    for (std::size_t i = 0; i < n; ++i, x /= 4) {
      role[i] = static_cast<int>(x % 4);
      if (role[i] == 1) a.insert(i);
      if (role[i] == 2) b.insert(i);
      if (role[i] == 3) c.insert(i);
    }
    if (a.empty() || b.empty() || a[0] > b[0]) continue;
    if (!d_separated(g, a, b, c)) continue;
    auto map = [&](const NodeSet& s) {
      std::vector<std::size_t> v;
      for (auto i : s) v.push_back(idx[i]);
      return v;
    };
    const double r = ci_residual(p, map(a), map(b), map(c));
    if (r > eps) {
      out.push_back({g.names_of(a), g.names_of(b), g.names_of(c), r});
      if (out.size() >= max_reports) return out;
    }
  }
  return out;
}

/// True iff every d-separation implied by `g` holds in p up to eps.
inline bool is_markov(const DiscreteJoint& p, const Dag& g, double eps = kExactEps) {
  return markov_violations(p, g, eps, 1).empty();
}

/// TV distance between p and the product of its own conditionals over g.
/// Zero iff p is Markov to g; linear in the table size, unlike the exhaustive
/// d-separation scan. Undefined rows contribute zero mass, which shows up as a
/// deficit.
inline double factorization_residual(const DiscreteJoint& p, const Dag& g) {
  const auto idx = detail::align(p, g);
  const auto factors = factorize(p, g);
  const auto& vars = p.variables();
  const auto& strides = p.strides();
  const auto& topo = g.topological_order();
  double s = 0.0;
  for (std::size_t f = 0; f < p.size(); ++f) {
    double prod = 1.0;
    for (auto j : topo) {
      const auto& t = factors[j];
      std::size_t ctx = 0;
      for (std::size_t k = 0; k < g.parents(j).size(); ++k) {
        const auto v = idx[g.parents(j)[k]];
        ctx = ctx * t.conditioning[k].cardinality + (f / strides[v]) % vars[v].cardinality;
      }
      prod = t.defined[ctx] ? prod * t.prob(ctx, (f / strides[idx[j]]) % vars[idx[j]].cardinality) : 0.0;
      if (prod == 0.0) break;
    }
    s += std::abs(p[f] - prod);
  }
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Interventions

/// do(X_j = state): truncated factorization with node j's factor replaced by a
/// point mass at `state`.
inline DiscreteJoint hard_intervention(const DiscreteJoint& p, const Dag& g, NodeId j,
                                       std::size_t state) {
  auto factors = factorize(p, g);
  auto& t = factors.at(j);
  if (state >= t.target.cardinality) throw InvalidArgument("hard_intervention: value out of range");
  std::fill(t.table.begin(), t.table.end(), 0.0);
  std::fill(t.defined.begin(), t.defined.end(), 1);
  for (std::size_t c = 0; c < t.contexts(); ++c) t.table[c * t.target.cardinality + state] = 1.0;
  return compose(factors, g, p.variables());
}

namespace detail {

/// Reorders `t` so its conditioning variables follow the parent order of j in g.
inline ConditionalTable align_to_parents(const ConditionalTable& t, const Dag& g, NodeId j,
                                         const std::vector<Variable>& vars) {
  const auto& pa = g.parents(j);
  if (t.target.name != g.name(j))
    throw InvalidArgument("replacement factor targets '" + t.target.name + "', expected '" + g.name(j) + "'");
  if (t.conditioning.size() != pa.size())
    throw InvalidArgument("replacement factor must condition exactly on the parents of '" + g.name(j) + "'");
  std::vector<std::size_t> pos(pa.size());
  for (std::size_t k = 0; k < pa.size(); ++k) {
    auto it = std::find_if(t.conditioning.begin(), t.conditioning.end(),
                           [&](const Variable& v) { return v.name == g.name(pa[k]); });
    if (it == t.conditioning.end())
      throw InvalidArgument("replacement factor must condition exactly on the parents of '" + g.name(j) + "'");
    pos[k] = static_cast<std::size_t>(it - t.conditioning.begin());
  }
  auto var_of = [&](const std::string& name) -> const Variable& {
    auto it = std::find_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == name; });
    if (it == vars.end()) throw InvalidArgument("unknown variable '" + name + "'");
    return *it;
  };
  if (t.target != var_of(t.target.name)) throw InvalidArgument("replacement factor target shape mismatch");
  ConditionalTable out;
  out.target = t.target;
  for (auto q : pa) out.conditioning.push_back(var_of(g.name(q)));
  for (std::size_t k = 0; k < pa.size(); ++k)
    if (t.conditioning[pos[k]] != out.conditioning[k])
      throw InvalidArgument("replacement factor conditioning shape mismatch");
  const auto in_strides = strides_of(t.conditioning);
  const auto out_strides = strides_of(out.conditioning);
  const auto ctx = t.contexts();
  const auto kk = t.target.cardinality;
  out.table.assign(t.table.size(), 0.0);
  out.defined.assign(ctx, 0);
  for (std::size_t c = 0; c < ctx; ++c) {
    std::size_t oc = 0;
    for (std::size_t k = 0; k < pa.size(); ++k)
      oc += ((c / in_strides[pos[k]]) % t.conditioning[pos[k]].cardinality) * out_strides[k];
    out.defined[oc] = t.defined[c];
    for (std::size_t v = 0; v < kk; ++v) out.table[oc * kk + v] = t.table[c * kk + v];
  }
  out.validate();
  return out;
}

}  // namespace detail

/// Factor list of p over g with node j's conditional replaced by `t`; all other
/// factors are the ones `factorize` returns, untouched.
inline std::vector<ConditionalTable> soft_intervention_factors(const DiscreteJoint& p, const Dag& g,
                                                               NodeId j, const ConditionalTable& t) {
  auto factors = factorize(p, g);
  factors.at(j) = detail::align_to_parents(t, g, j, p.variables());
  return factors;
}

/// Replaces p(x_j | pa_j) by `t` and recomposes the joint.
inline DiscreteJoint soft_intervention(const DiscreteJoint& p, const Dag& g, NodeId j,
                                       const ConditionalTable& t) {
  return compose(soft_intervention_factors(p, g, j, t), g, p.variables());
}

// ---------------------------------------------------------------------------
// Construction helpers

/// One outcome of a finite random experiment: numeric values per variable and its probability.
struct Outcome {
  std::vector<double> values;
  double prob = 0.0;
};

namespace detail {

inline long long quantize(double v) { return std::llround(v * 1e9); }

}  // namespace detail

/// Builds joints for several outcome lists over one shared support, so the
/// results have identical variables (state labels are the sorted union of
/// observed values, merged at 1e-9 resolution).
inline std::vector<DiscreteJoint> joints_on_common_support(
    const std::vector<std::string>& names, const std::vector<std::vector<Outcome>>& experiments) {
  const auto k = names.size();
  std::vector<std::map<long long, double>> support(k);
  for (const auto& e : experiments)
    for (const auto& o : e) {
      if (o.values.size() != k) throw InvalidArgument("outcome arity mismatch");
      if (o.prob <= 0.0) continue;
      for (std::size_t i = 0; i < k; ++i) support[i].emplace(detail::quantize(o.values[i]), o.values[i]);
    }
  std::vector<Variable> vars(k);
  std::vector<std::map<long long, std::size_t>> state(k);
  for (std::size_t i = 0; i < k; ++i) {
    vars[i].name = names[i];
    for (const auto& [q, v] : support[i]) {
      state[i][q] = vars[i].values.size();
      vars[i].values.push_back(v);
    }
    vars[i].cardinality = vars[i].values.size();
    if (vars[i].cardinality == 0) throw InvalidArgument("variable '" + names[i] + "' has empty support");
  }
  const auto strides = detail::strides_of(vars);
  std::vector<DiscreteJoint> out;
  for (const auto& e : experiments) {
    std::vector<double> w(detail::table_size(vars), 0.0);
    for (const auto& o : e) {
      if (o.prob <= 0.0) continue;
      std::size_t f = 0;
      for (std::size_t i = 0; i < k; ++i) f += state[i].at(detail::quantize(o.values[i])) * strides[i];
      w[f] += o.prob;
    }
    out.push_back(DiscreteJoint::from_weights(vars, std::move(w)));
  }
  return out;
}

/// Equal-weight mixture of joints over identical variables.
inline DiscreteJoint mixture(const std::vector<DiscreteJoint>& parts,
                             const std::vector<double>& weights = {}) {
  if (parts.empty()) throw InvalidArgument("mixture of zero joints");
  std::vector<double> w(parts[0].size(), 0.0);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (!parts[k].same_variables(parts[0])) throw InvalidArgument("mixture: variable mismatch");
    const double wk = weights.empty() ? 1.0 : weights.at(k);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += wk * parts[k][i];
  }
  return DiscreteJoint::from_weights(parts[0].variables(), std::move(w));
}

}  // namespace phenocausal
