#pragma once

// Structural causal models. LinearScm holds X = A X + offsets + N; GeneralScm
// holds an arbitrary per-node mechanism f_j(pa_j, n_j). Both simulate row by
// row from a counter-based RNG, so row r and node j always read the same
// stream regardless of how many rows are produced or in what order.

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phenocausal/discrete.hpp"
#include "phenocausal/errors.hpp"
#include "phenocausal/graph.hpp"
#include "phenocausal/rng.hpp"

namespace phenocausal {

enum class NoiseFamily { Degenerate, UniformInt, BinomialDifference, Gaussian, UniformReal, Categorical };

inline const char* to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Degenerate: return "degenerate";
    case NoiseFamily::UniformInt: return "uniform_int";
    case NoiseFamily::BinomialDifference: return "binomial_difference";
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::UniformReal: return "uniform_real";
    case NoiseFamily::Categorical: return "categorical";
  }
  return "?";
}

/// Distribution of one noise term.
///   degenerate           {value}
///   uniform_int          {lo, hi}          inclusive
///   binomial_difference  {trials, p_plus, p_minus}: Bin(t, p+) - Bin(t, p-)
///   gaussian             {mean, sd}
///   uniform_real         {lo, hi}
///   categorical          support + weights
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::Degenerate;
  std::vector<double> params{0.0};
  std::vector<double> support;
  std::vector<double> weights;

  static NoiseSpec degenerate(double v) { return {NoiseFamily::Degenerate, {v}, {}, {}}; }
  static NoiseSpec uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InvalidArgument("uniform_int: hi < lo");
    return {NoiseFamily::UniformInt, {double(lo), double(hi)}, {}, {}};
  }
  static NoiseSpec binomial_difference(int trials, double p_plus, double p_minus) {
    if (trials < 0 || p_plus < 0 || p_plus > 1 || p_minus < 0 || p_minus > 1)
      throw InvalidArgument("binomial_difference: bad parameters");
    return {NoiseFamily::BinomialDifference, {double(trials), p_plus, p_minus}, {}, {}};
  }
  static NoiseSpec gaussian(double mean, double sd) {
    if (!(sd >= 0)) throw InvalidArgument("gaussian: negative sd");
    return {NoiseFamily::Gaussian, {mean, sd}, {}, {}};
  }
  static NoiseSpec uniform_real(double lo, double hi) {
    if (!(hi >= lo)) throw InvalidArgument("uniform_real: hi < lo");
    return {NoiseFamily::UniformReal, {lo, hi}, {}, {}};
  }
  static NoiseSpec categorical(std::vector<double> support, std::vector<double> weights) {
    if (support.empty() || support.size() != weights.size())
      throw InvalidArgument("categorical: support/weights mismatch");
    double s = 0.0;
    for (double w : weights) {
      if (!(w >= 0)) throw InvalidArgument("categorical: negative weight");
      s += w;
    }
    if (!(s > 0)) throw InvalidArgument("categorical: zero total weight");
    for (double& w : weights) w /= s;
    return {NoiseFamily::Categorical, {}, std::move(support), std::move(weights)};
  }

  /// Gaussian noise makes linear models unidentifiable from observational data.
  bool is_gaussian() const { return family == NoiseFamily::Gaussian && params[1] > 0; }
  bool finite() const { return family != NoiseFamily::Gaussian && family != NoiseFamily::UniformReal; }

  double sample(CounterRng& rng) const {
    switch (family) {
      case NoiseFamily::Degenerate: return params[0];
      case NoiseFamily::UniformInt:
        return double(rng.uniform_int(std::int64_t(params[0]), std::int64_t(params[1])));
      case NoiseFamily::BinomialDifference: {
        const int t = int(params[0]);
        const int up = rng.binomial(t, params[1]);
        const int down = rng.binomial(t, params[2]);
        return double(up - down);
      }
      case NoiseFamily::Gaussian: return params[0] + params[1] * rng.normal();
      case NoiseFamily::UniformReal: return rng.uniform(params[0], params[1]);
      case NoiseFamily::Categorical: {
        const double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
          acc += weights[i];
          if (u < acc) return support[i];
        }
        return support.back();
      }
    }
    return 0.0;
  }

  double mean() const {
    switch (family) {
      case NoiseFamily::Degenerate: return params[0];
      case NoiseFamily::UniformInt:
      case NoiseFamily::UniformReal: return 0.5 * (params[0] + params[1]);
      case NoiseFamily::BinomialDifference: return params[0] * (params[1] - params[2]);
      case NoiseFamily::Gaussian: return params[0];
      case NoiseFamily::Categorical: {
        double m = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i) m += weights[i] * support[i];
        return m;
      }
    }
    return 0.0;
  }

  double variance() const {
    switch (family) {
      case NoiseFamily::Degenerate: return 0.0;
      case NoiseFamily::UniformInt: {
        const double k = params[1] - params[0] + 1;
        return (k * k - 1) / 12.0;
      }
      case NoiseFamily::UniformReal: return (params[1] - params[0]) * (params[1] - params[0]) / 12.0;
      case NoiseFamily::BinomialDifference:
        return params[0] * (params[1] * (1 - params[1]) + params[2] * (1 - params[2]));
      case NoiseFamily::Gaussian: return params[1] * params[1];
      case NoiseFamily::Categorical: {
        const double m = mean();
        double v = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i) v += weights[i] * (support[i] - m) * (support[i] - m);
        return v;
      }
    }
    return 0.0;
  }

  /// (value, probability) pairs for finite families, sorted by value, zero-mass values dropped.
  std::vector<std::pair<double, double>> pmf() const {
    std::map<double, double> m;
    switch (family) {
      case NoiseFamily::Degenerate: m[params[0]] = 1.0; break;
      case NoiseFamily::UniformInt: {
        const auto lo = std::int64_t(params[0]), hi = std::int64_t(params[1]);
        for (auto v = lo; v <= hi; ++v) m[double(v)] = 1.0 / double(hi - lo + 1);
        break;
      }
      case NoiseFamily::BinomialDifference: {
        const int t = int(params[0]);
        auto binom = [t](double p) {
          std::vector<double> b(t + 1);
          for (int k = 0; k <= t; ++k)
            b[k] = std::exp(std::lgamma(t + 1.0) - std::lgamma(k + 1.0) - std::lgamma(t - k + 1.0)) *
                   std::pow(p, k) * std::pow(1 - p, t - k);
          return b;
        };
        const auto up = binom(params[1]), down = binom(params[2]);
        for (int a = 0; a <= t; ++a)
          for (int b = 0; b <= t; ++b) m[double(a - b)] += up[a] * down[b];
        break;
      }
      case NoiseFamily::Categorical:
        for (std::size_t i = 0; i < support.size(); ++i) m[support[i]] += weights[i];
        break;
      default: throw InvalidArgument(std::string("noise family ") + to_string(family) + " has no finite pmf");
    }
    std::vector<std::pair<double, double>> out;
    for (const auto& [v, p] : m)
      if (p > 0.0) out.emplace_back(v, p);
    return out;
  }
};

/// Rectangular numeric table with the seed it was generated from.
struct Dataset {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::uint64_t seed = 0;

  std::size_t cols() const { return names.size(); }
  std::size_t index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidArgument("unknown column '" + name + "'");
    return std::size_t(it - names.begin());
  }
  std::vector<double> column(std::size_t c) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
  }
  std::vector<double> column(const std::string& name) const { return column(index_of(name)); }
  Dataset select(const std::vector<std::string>& cols) const {
    Dataset d{cols, {}, seed};
    std::vector<std::size_t> idx;
    for (const auto& c : cols) idx.push_back(index_of(c));
    d.rows.reserve(rows.size());
    for (const auto& r : rows) {
      std::vector<double> x;
      for (auto i : idx) x.push_back(r[i]);
      d.rows.push_back(std::move(x));
    }
    return d;
  }
};

namespace detail {

/// Shortest round-trip decimal representation; integers print without a point.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Splits one logical CSV record; quoted fields may contain commas, quotes and newlines.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string cur;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cur += '"';
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!any) return false;
  fields.push_back(std::move(cur));
  return true;
}

}  // namespace detail

inline void write_csv(const Dataset& d, std::ostream& out) {
  for (std::size_t i = 0; i < d.names.size(); ++i) out << (i ? "," : "") << detail::csv_quote(d.names[i]);
  out << "\r\n";
  for (const auto& r : d.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << detail::format_number(r[i]);
    out << "\r\n";
  }
}

inline Dataset read_csv(std::istream& in) {
  Dataset d;
  std::vector<std::string> f;
  if (!detail::read_csv_record(in, f)) throw InvalidArgument("empty CSV");
  d.names = f;
  std::size_t line = 1;
  while (detail::read_csv_record(in, f)) {
    ++line;
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != d.names.size())
      throw InvalidArgument("CSV line " + std::to_string(line) + ": expected " +
                            std::to_string(d.names.size()) + " fields");
    std::vector<double> row;
    for (const auto& s : f) {
      double v = 0.0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InvalidArgument("CSV line " + std::to_string(line) + ": not a number: '" + s + "'");
      row.push_back(v);
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

/// Noise stream for (row, node). A per-node seed override gives that node an
/// independent copy of its noise while every other node keeps its draws.
inline CounterRng noise_stream(std::uint64_t seed, std::size_t row, std::size_t node,
                               const std::vector<std::optional<std::uint64_t>>& overrides) {
  if (node < overrides.size() && overrides[node])
    return CounterRng(derive_seed(*overrides[node], row), node);
  return CounterRng(derive_seed(seed, row), node);
}

class LinearScm {
 public:
  /// `a(j, i)` is the coefficient of X_i in the equation for X_j.
  LinearScm(std::vector<std::string> names, Eigen::MatrixXd a, Eigen::VectorXd offsets,
            std::vector<NoiseSpec> noises)
      : names_(std::move(names)), a_(std::move(a)), offsets_(std::move(offsets)), noises_(std::move(noises)) {
    const auto n = names_.size();
    if (std::size_t(a_.rows()) != n || std::size_t(a_.cols()) != n || std::size_t(offsets_.size()) != n ||
        noises_.size() != n)
      throw InvalidArgument("LinearScm: dimension mismatch");
    std::vector<Edge> e;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (a_(j, i) != 0.0) e.push_back({i, j});
    graph_ = Dag::from_edges(names_, e);  // throws CycleError on a cyclic support
    order_ = graph_.topological_order();
    overrides_.assign(n, std::nullopt);
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }
  const std::vector<NoiseSpec>& noises() const { return noises_; }
  const Dag& graph() const { return graph_; }
  const std::vector<std::optional<std::uint64_t>>& noise_overrides() const { return overrides_; }

  /// Evaluates the equations in topological order for one noise vector.
  std::vector<double> evaluate(const std::vector<double>& noise) const {
    std::vector<double> x(size(), 0.0);
    for (auto j : order_) {
      double v = offsets_[j] + noise[j];
      for (auto i : graph_.parents(j)) v += a_(j, i) * x[i];
      x[j] = v;
    }
    return x;
  }

  /// (I - A)^{-1} by propagation along the topological order; exact for
  /// integer coefficients of moderate size.
  Eigen::MatrixXd mixing() const {
    const auto n = size();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> e(n, 0.0);
      e[i] = 1.0;
      auto x = propagate(e);
      for (std::size_t j = 0; j < n; ++j) s(j, i) = x[j];
    }
    return s;
  }

  LinearScm with_noise_override(NodeId j, std::uint64_t fresh_seed) const {
    auto c = *this;
    c.overrides_.at(j) = fresh_seed;
    return c;
  }

 private:
  std::vector<double> propagate(const std::vector<double>& shock) const {
    std::vector<double> x(size(), 0.0);
    for (auto j : order_) {
      double v = shock[j];
      for (auto i : graph_.parents(j)) v += a_(j, i) * x[i];
      x[j] = v;
    }
    return x;
  }

  std::vector<std::string> names_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd offsets_;
  std::vector<NoiseSpec> noises_;
  Dag graph_;
  std::vector<NodeId> order_;
  std::vector<std::optional<std::uint64_t>> overrides_;
};

/// Mechanism signature: parent values (in the node's declared parent order) and a noise value.
using Mechanism = std::function<double(const std::vector<double>& parents, double noise)>;

struct ScmNode {
  std::string name;
  std::vector<std::string> parents;
  Mechanism f;
  NoiseSpec noise;
};

class GeneralScm {
 public:
  explicit GeneralScm(std::vector<ScmNode> nodes) : nodes_(std::move(nodes)) {
    std::vector<std::string> names;
    for (const auto& n : nodes_) {
      if (!n.f) throw InvalidArgument("node '" + n.name + "' has no mechanism");
      names.push_back(n.name);
    }
    std::vector<NamedEdge> e;
    for (const auto& n : nodes_)
      for (const auto& p : n.parents) e.emplace_back(p, n.name);
    graph_ = Dag(names, e);
    order_ = graph_.topological_order();
    parent_idx_.resize(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      for (const auto& p : nodes_[j].parents) parent_idx_[j].push_back(graph_.index_of(p));
    overrides_.assign(nodes_.size(), std::nullopt);
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<ScmNode>& nodes() const { return nodes_; }
  const std::vector<std::string>& names() const { return graph_.names(); }
  const Dag& graph() const { return graph_; }
  const std::vector<NodeId>& parent_indices(NodeId j) const { return parent_idx_.at(j); }
  const std::vector<std::optional<std::uint64_t>>& noise_overrides() const { return overrides_; }

  std::vector<double> evaluate(const std::vector<double>& noise) const {
    std::vector<double> x(size(), 0.0);
    std::vector<double> pa;
    for (auto j : order_) {
      pa.clear();
      for (auto i : parent_idx_[j]) pa.push_back(x[i]);
      x[j] = nodes_[j].f(pa, noise[j]);
    }
    return x;
  }

  GeneralScm with_noise_override(NodeId j, std::uint64_t fresh_seed) const {
    auto c = *this;
    c.overrides_.at(j) = fresh_seed;
    return c;
  }

 private:
  std::vector<ScmNode> nodes_;
  Dag graph_{std::vector<std::string>{}};
  std::vector<NodeId> order_;
  std::vector<std::vector<NodeId>> parent_idx_;
  std::vector<std::optional<std::uint64_t>> overrides_;
};

inline GeneralScm to_general(const LinearScm& m) {
  std::vector<ScmNode> nodes;
  for (NodeId j = 0; j < m.size(); ++j) {
    ScmNode n{m.names()[j], {}, {}, m.noises()[j]};
    std::vector<double> coef;
    for (auto i : m.graph().parents(j)) {
      n.parents.push_back(m.names()[i]);
      coef.push_back(m.a()(j, i));
    }
    const double off = m.offsets()[j];
    n.f = [coef, off](const std::vector<double>& pa, double noise) {
      double v = off + noise;
      for (std::size_t k = 0; k < pa.size(); ++k) v += coef[k] * pa[k];
      return v;
    };
    nodes.push_back(std::move(n));
  }
  auto g = GeneralScm(std::move(nodes));
  for (NodeId j = 0; j < m.size(); ++j)
    if (m.noise_overrides()[j]) g = g.with_noise_override(j, *m.noise_overrides()[j]);
  return g;
}

inline const NoiseSpec& noise_spec(const LinearScm& m, std::size_t j) { return m.noises()[j]; }
inline const NoiseSpec& noise_spec(const GeneralScm& m, std::size_t j) { return m.nodes()[j].noise; }

template <class Scm>
std::vector<double> draw_noises(const Scm& scm, std::uint64_t seed, std::size_t row) {
  std::vector<double> noise(scm.size());
  for (std::size_t j = 0; j < scm.size(); ++j) {
    auto rng = noise_stream(seed, row, j, scm.noise_overrides());
    noise[j] = noise_spec(scm, j).sample(rng);
  }
  return noise;
}

/// Values and the noises that produced them, row for row.
struct SimulationRecord {
  Dataset values;
  Dataset noises;
};

template <class Scm>
SimulationRecord simulate_with_noises(const Scm& scm, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("simulate: n must be at least 1");
  SimulationRecord r{{scm.names(), {}, seed}, {scm.names(), {}, seed}};
  r.values.rows.reserve(n);
  r.noises.rows.reserve(n);
  for (std::size_t row = 0; row < n; ++row) {
    auto noise = draw_noises(scm, seed, row);
    r.values.rows.push_back(scm.evaluate(noise));
    r.noises.rows.push_back(std::move(noise));
  }
  return r;
}

template <class Scm>
Dataset simulate(const Scm& scm, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("simulate: n must be at least 1");
  Dataset d{scm.names(), {}, seed};
  d.rows.reserve(n);
  for (std::size_t row = 0; row < n; ++row) d.rows.push_back(scm.evaluate(draw_noises(scm, seed, row)));
  return d;
}

/// Same law, fresh realization: node j draws its noise from an independent stream.
template <class Scm>
Scm structure_preserving_intervention(const Scm& scm, NodeId j, std::uint64_t fresh_seed) {
  if (j >= scm.size()) throw InvalidArgument("structure_preserving_intervention: no such node");
  return scm.with_noise_override(j, fresh_seed);
}

/// Deterministic section of node j's mechanism at a fixed noise value.
inline std::function<double(const std::vector<double>&)> unit_map(const GeneralScm& scm, NodeId j,
                                                                  double noise_value) {
  const auto& node = scm.nodes().at(j);
  if (node.noise.finite()) {
    bool in_range = false;
    for (const auto& [v, p] : node.noise.pmf()) in_range = in_range || std::abs(v - noise_value) < 1e-9;
    if (!in_range) throw InvalidArgument("unit_map: noise value outside the range of '" + node.name + "'");
  }
  auto f = node.f;
  return [f, noise_value](const std::vector<double>& pa) { return f(pa, noise_value); };
}

struct StructureSolution {
  Eigen::MatrixXd a;
  std::optional<Dag> dag;  // set when A is acyclic
};

/// A = I - S^{-1}. Singular when the smallest |pivot| of the partial-pivot LU is below 1e-10.
inline StructureSolution solve_structure(const Eigen::MatrixXd& s, std::vector<std::string> names = {}) {
  if (s.rows() != s.cols() || s.rows() == 0) throw InvalidArgument("solve_structure: S must be square");
  const auto n = std::size_t(s.rows());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot >= 1e-10)) throw SingularMatrix("solve_structure: S is singular (min pivot " +
                                                   detail::format_number(min_pivot) + ")");
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(s.rows(), s.cols()) - lu.inverse();
  StructureSolution out{a, std::nullopt};
  if (names.empty()) names = default_names(n);
  if (names.size() != n) throw InvalidArgument("solve_structure: name count mismatch");
  std::vector<Edge> e;
  bool self_loop = false;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(a(j, i)) <= 1e-12) continue;
      if (i == j) self_loop = true;
      e.push_back({i, j});
    }
  if (self_loop) return out;
  try {
    out.dag = Dag::from_edges(names, e);
  } catch (const CycleError&) {
  }
  return out;
}

/// Total effect of a unit shift of X_i on X_j: entry (j, i) of (I - A)^{-1}.
inline double total_effect(const LinearScm& scm, NodeId i, NodeId j) { return scm.mixing()(j, i); }

/// Every noise combination of an SCM with finite noises, evaluated; repeated
/// value vectors are not merged.
template <class Scm>
std::vector<Outcome> exact_outcomes(const Scm& scm, std::size_t cap = kMaxTableEntries) {
  std::vector<std::vector<std::pair<double, double>>> pm;
  std::size_t total = 1;
  for (std::size_t j = 0; j < scm.size(); ++j) {
    pm.push_back(noise_spec(scm, j).pmf());
    if (total > cap / pm.back().size()) throw CapExceeded("exact_joint: noise space above cap");
    total *= pm.back().size();
  }
  std::vector<Outcome> outcomes;
  outcomes.reserve(total);
  std::vector<std::size_t> idx(scm.size(), 0);
  std::vector<double> noise(scm.size());
  for (std::size_t f = 0; f < total; ++f) {
    double p = 1.0;
    for (std::size_t j = 0; j < scm.size(); ++j) {
      noise[j] = pm[j][idx[j]].first;
      p *= pm[j][idx[j]].second;
    }
    outcomes.push_back({scm.evaluate(noise), p});
    for (std::size_t j = scm.size(); j-- > 0;) {
      if (++idx[j] < pm[j].size()) break;
      idx[j] = 0;
    }
  }
  return outcomes;
}

/// Exact joint of an SCM with finite noises, by enumerating the noise product space.
template <class Scm>
DiscreteJoint exact_joint(const Scm& scm, std::size_t cap = kMaxTableEntries) {
  return joints_on_common_support(scm.names(), {exact_outcomes(scm, cap)}).front();
}

/// The outcomes of a joint, one per positive cell, carrying the state values.
inline std::vector<Outcome> outcomes_of(const DiscreteJoint& p) {
  std::vector<Outcome> out;
  for (std::size_t f = 0; f < p.size(); ++f) {
    if (p[f] <= 0.0) continue;
    auto st = p.decode(f);
    Outcome o{{}, p[f]};
    for (std::size_t i = 0; i < st.size(); ++i) o.values.push_back(p.variables()[i].value(st[i]));
    out.push_back(std::move(o));
  }
  return out;
}

/// Plug-in joint of one or more datasets over a shared support.
inline std::vector<DiscreteJoint> empirical_joints(const std::vector<Dataset>& data) {
  if (data.empty()) throw InvalidArgument("empirical_joints: no datasets");
  std::vector<std::vector<Outcome>> exps;
  for (const auto& d : data) {
    if (d.names != data[0].names) throw InvalidArgument("empirical_joints: column mismatch");
    if (d.rows.empty()) throw InvalidArgument("empirical_joints: empty dataset");
    std::vector<Outcome> o;
    o.reserve(d.rows.size());
    for (const auto& r : d.rows) o.push_back({r, 1.0 / double(d.rows.size())});
    exps.push_back(std::move(o));
  }
  return joints_on_common_support(data[0].names, exps);
}

}  // namespace phenocausal
