#pragma once

// Worked systems: ball urns, ball bundles, rabbits, a micro/macro pair, a ball
// track with light barriers, and two farmers trading goods. Each yields its
// variables, an optional ground-truth graph, statistical and/or unit-level
// action suites, and a sampler for data.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phenocausal/actions.hpp"
#include "phenocausal/discrete.hpp"
#include "phenocausal/errors.hpp"
#include "phenocausal/graph.hpp"
#include "phenocausal/rng.hpp"
#include "phenocausal/scm.hpp"

namespace phenocausal {

struct CoinBias {
  double plus = 0.5;
  double minus = 0.5;
};

// ---------------------------------------------------------------------------
// Urns and bundles

enum class Endpoint { TypeOne, TypeN };
enum class UrnKind { Swap, Bundle };

/// A counting process driven by n action pairs, each flipped `rounds` times.
///
/// Positions list the node variables in causal order. Action m (1-based) acts
/// at position n - m. For UrnKind::Swap, action 1 adds/removes one ball at its
/// position and action m >= 2 converts a ball from action m-1's position into
/// its own. For UrnKind::Bundle, action m adds/removes one ball at each of the
/// positions of actions 1..m. Removals that would go below zero are refused.
struct UrnProcess {
  UrnKind kind = UrnKind::Swap;
  std::size_t n = 2;
  std::vector<std::string> names;   // by position
  std::vector<std::string> labels;  // by action m - 1
  std::vector<double> k0;           // by position
  int rounds = 1;
  std::vector<CoinBias> bias;  // by action m - 1

  std::size_t pos(std::size_t m) const { return n - m; }

  bool apply(std::vector<double>& c, std::size_t m, int sign) const {
    if (kind == UrnKind::Swap) {
      if (m == 1) {
        if (sign < 0 && c[pos(1)] < 1) return false;
        c[pos(1)] += sign;
        return true;
      }
      const auto from = sign > 0 ? pos(m - 1) : pos(m);
      const auto to = sign > 0 ? pos(m) : pos(m - 1);
      if (c[from] < 1) return false;
      c[from] -= 1;
      c[to] += 1;
      return true;
    }
    if (sign < 0)
      for (std::size_t i = 1; i <= m; ++i)
        if (c[pos(i)] < 1) return false;
    for (std::size_t i = 1; i <= m; ++i) c[pos(i)] += sign;
    return true;
  }

  struct Run {
    std::vector<double> counts;
    std::vector<double> noise;  // net action count of each position's own action
    bool refused = false;
  };

  /// One bounded run; per round the coins are flipped A_1+, A_1-, A_2+, ...
  Run run(CounterRng& rng, const std::vector<CoinBias>& b) const {
    Run r{k0, std::vector<double>(n, 0.0), false};
    for (int t = 0; t < rounds; ++t)
      for (std::size_t m = 1; m <= n; ++m) {
        if (rng.bernoulli(b[m - 1].plus)) {
          if (apply(r.counts, m, +1)) r.noise[pos(m)] += 1;
          else r.refused = true;
        }
        if (rng.bernoulli(b[m - 1].minus)) {
          if (apply(r.counts, m, -1)) r.noise[pos(m)] -= 1;
          else r.refused = true;
        }
      }
    return r;
  }

  /// Largest total decrease a position can see during a run.
  double max_decrease(std::size_t p) const {
    const std::size_t m = n - p;
    if (kind == UrnKind::Swap) return rounds * ((m == n) ? 1.0 : 2.0);
    return rounds * double(n - m + 1);
  }

  bool boundary_free() const {
    for (std::size_t p = 0; p < n; ++p)
      if (k0[p] < max_decrease(p)) return false;
    return true;
  }

  /// Unbounded linear idealization with binomial-difference noises.
  LinearScm linear(const std::vector<CoinBias>& b) const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd off(n);
    if (kind == UrnKind::Swap) {
      double acc = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < p; ++q) a(p, q) = -1;
        acc += k0[p];
        off[p] = acc;
      }
    } else {
      for (std::size_t p = 0; p < n; ++p) {
        if (p > 0) a(p, p - 1) = 1;
        off[p] = k0[p] - (p > 0 ? k0[p - 1] : 0.0);
      }
    }
    std::vector<NoiseSpec> noises(n);
    for (std::size_t m = 1; m <= n; ++m)
      noises[pos(m)] = NoiseSpec::binomial_difference(rounds, b[m - 1].plus, b[m - 1].minus);
    return LinearScm(names, a, off, noises);
  }

  /// Exact law of the final counts: noise enumeration when no removal can be
  /// refused, otherwise dynamic programming over reachable states.
  std::vector<Outcome> exact(const std::vector<CoinBias>& b) const {
    if (boundary_free()) return exact_outcomes(linear(b));
    std::map<std::vector<double>, double> cur{{k0, 1.0}};
    for (int t = 0; t < rounds; ++t)
      for (std::size_t m = 1; m <= n; ++m)
        for (int sign : {+1, -1}) {
          const double p = sign > 0 ? b[m - 1].plus : b[m - 1].minus;
          std::map<std::vector<double>, double> next;
          for (const auto& [s, w] : cur) {
            auto moved = s;
            if (apply(moved, m, sign)) {
              next[moved] += w * p;
              next[s] += w * (1 - p);
            } else {
              next[s] += w;
            }
          }
          if (next.size() > kMaxTableEntries) throw CapExceeded("urn state space above cap");
          cur = std::move(next);
        }
    std::vector<Outcome> out;
    for (const auto& [s, w] : cur) out.push_back({s, w});
    return out;
  }

  Dag truth() const {
    std::vector<NamedEdge> e;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        if (kind == UrnKind::Swap || q == p + 1) e.emplace_back(names[p], names[q]);
    return Dag(names, e);
  }

  std::vector<UnitAction> unit_actions() const {
    std::vector<UnitAction> out;
    for (std::size_t m = 1; m <= n; ++m)
      for (int sign : {+1, -1}) {
        const auto label = labels[m - 1] + (sign > 0 ? "+" : "-");
        if (kind == UrnKind::Swap && m == 1) {
          out.push_back(add_constant(label, pos(1), sign, 0.0));
        } else if (kind == UrnKind::Swap) {
          out.push_back(sign > 0 ? swap_count(label, pos(m - 1), pos(m)) : swap_count(label, pos(m), pos(m - 1)));
        } else {
          auto self = *this;
          out.push_back({label,
                         [self, m, sign](const State& s) -> std::optional<State> {
                           auto t = s;
                           if (!self.apply(t, m, sign)) return std::nullopt;
                           return t;
                         },
                         {"builtin", {double(m), double(sign)}}});
        }
      }
    return out;
  }
};

struct Exemplar {
  std::string name;
  std::vector<std::string> variables;
  std::optional<Dag> ground_truth;  // empty when no single graph is declared
  bool unique = false;              // ground truth is claimed to be the only valid graph
  std::optional<LinearScm> linear;  // unbounded linear idealization, where one exists
  std::optional<DiscreteJoint> baseline;
  std::vector<StatisticalAction> statistical;
  std::optional<UnitSystem> units;
  std::vector<UnitAction> unit_actions;
  std::function<Dataset(std::size_t, std::uint64_t)> sampler;
  std::vector<std::pair<std::string, double>> params;
  std::optional<UrnProcess> urn;  // the generating process of urn and bundle exemplars
};

namespace detail {

inline CoinBias shifted(CoinBias b, double shift) {
  b.plus = b.plus + shift <= 1.0 ? b.plus + shift : b.plus - shift;
  return b;
}

inline std::vector<CoinBias> broadcast(const std::vector<CoinBias>& b, std::size_t n) {
  if (b.empty()) return std::vector<CoinBias>(n);
  if (b.size() == 1) return std::vector<CoinBias>(n, b[0]);
  if (b.size() != n) throw InvalidArgument("need one coin bias per action pair (or a single one)");
  for (const auto& c : b)
    if (c.plus < 0 || c.plus > 1 || c.minus < 0 || c.minus > 1) throw InvalidArgument("coin bias outside [0, 1]");
  return b;
}

inline void sort_by_label(std::vector<UnitAction>& a) {
  std::stable_sort(a.begin(), a.end(), [](const UnitAction& x, const UnitAction& y) { return x.label < y.label; });
}

inline void sort_by_label(std::vector<StatisticalAction>& a) {
  std::stable_sort(a.begin(), a.end(),
                   [](const StatisticalAction& x, const StatisticalAction& y) { return x.label < y.label; });
}

}  // namespace detail

struct UrnOptions {
  double bias_shift = 0.3;
  bool exact = true;  // compute the exact baseline and statistical actions
};

inline Exemplar urn_exemplar(std::string name, const UrnProcess& proc, std::uint64_t seed, const UrnOptions& opt) {
  Exemplar ex;
  ex.name = std::move(name);
  ex.variables = proc.names;
  ex.ground_truth = proc.truth();
  ex.unique = proc.kind == UrnKind::Swap;
  ex.linear = proc.linear(proc.bias);
  if (opt.exact) {
    std::vector<std::vector<Outcome>> exps{proc.exact(proc.bias)};
    for (std::size_t m = 1; m <= proc.n; ++m) {
      auto b = proc.bias;
      b[m - 1] = detail::shifted(b[m - 1], opt.bias_shift);
      exps.push_back(proc.exact(b));
    }
    auto js = joints_on_common_support(proc.names, exps);
    ex.baseline = js[0];
    for (std::size_t m = 1; m <= proc.n; ++m) ex.statistical.push_back({proc.labels[m - 1] + "-bias", js[m]});
    detail::sort_by_label(ex.statistical);
  }
  ex.units = UnitSystem{proc.names,
                        [](const State& s) { return s; },
                        [proc](CounterRng& rng) { return proc.run(rng, proc.bias).counts; },
                        {}};
  ex.unit_actions = proc.unit_actions();
  detail::sort_by_label(ex.unit_actions);
  ex.sampler = [proc](std::size_t rows, std::uint64_t s) {
    if (rows == 0) throw InvalidArgument("sample size must be at least 1");
    Dataset d{proc.names, {}, s};
    d.rows.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      CounterRng rng(s, r);
      d.rows.push_back(proc.run(rng, proc.bias).counts);
    }
    return d;
  };
  ex.urn = proc;
  ex.params = {{"rounds", double(proc.rounds)}, {"seed", double(seed)}};
  for (std::size_t p = 0; p < proc.n; ++p) ex.params.emplace_back("k0_" + proc.names[p], proc.k0[p]);
  return ex;
}

/// Blue (Kb) and red (Kr) balls. A1 swaps a red ball for a blue one, A2
/// adds or removes a red ball. Biases are given for A1 then A2.
inline UrnProcess urn_bivariate_process(double kb0, double kr0, int rounds, std::vector<CoinBias> biases) {
  if (rounds < 0) throw InvalidArgument("rounds must be non-negative");
  if (double(rounds) >= std::min(kb0, kr0)) throw InvalidArgument("urn needs kb0, kr0 > rounds");
  auto b = detail::broadcast(biases, 2);
  UrnProcess p;
  p.kind = UrnKind::Swap;
  p.n = 2;
  p.names = {"Kb", "Kr"};
  p.labels = {"A2", "A1"};  // action 1 touches red only
  p.k0 = {kb0, kr0};
  p.rounds = rounds;
  p.bias = {b[1], b[0]};
  return p;
}

inline Exemplar urn_bivariate(double kb0, double kr0, int rounds, std::vector<CoinBias> biases, std::uint64_t seed,
                              const UrnOptions& opt = {}) {
  return urn_exemplar("urn2", urn_bivariate_process(kb0, kr0, rounds, std::move(biases)), seed, opt);
}

/// n ball types K1..Kn. With the type-1 endpoint, A1 adds/removes a type-1
/// ball and Aj swaps a type j-1 ball for a type j ball; causal order is
/// Kn, ..., K1. With the type-n endpoint every role is mirrored. `k0` and
/// `biases` are indexed by type.
inline UrnProcess urn_chain_process(std::size_t n, const std::vector<double>& k0, int rounds,
                                    std::vector<CoinBias> biases, Endpoint endpoint = Endpoint::TypeOne) {
  if (n < 2) throw InvalidArgument("urn chain needs n >= 2");
  if (k0.size() != n) throw InvalidArgument("urn chain needs one initial count per type");
  for (double k : k0)
    if (k <= rounds) throw InvalidArgument("urn chain needs every initial count > rounds");
  auto b = detail::broadcast(biases, n);
  UrnProcess p;
  p.kind = UrnKind::Swap;
  p.n = n;
  p.rounds = rounds;
  auto type_of = [&](std::size_t m) { return endpoint == Endpoint::TypeOne ? m : n + 1 - m; };
  p.names.resize(n);
  p.k0.resize(n);
  for (std::size_t m = 1; m <= n; ++m) {
    const auto t = type_of(m);
    p.names[p.pos(m)] = "K" + std::to_string(t);
    p.k0[p.pos(m)] = k0[t - 1];
    p.labels.push_back("A" + std::to_string(t));
    p.bias.push_back(b[t - 1]);
  }
  return p;
}

inline Exemplar urn_chain(std::size_t n, const std::vector<double>& k0, int rounds, std::vector<CoinBias> biases,
                          std::uint64_t seed, Endpoint endpoint = Endpoint::TypeOne, const UrnOptions& opt = {}) {
  return urn_exemplar("urnN", urn_chain_process(n, k0, rounds, std::move(biases), endpoint), seed, opt);
}

/// Stacks of packages: Aj puts one package holding one ball of each type
/// 1..j into the urn (or takes one out). Causal order Kn, ..., K1.
inline UrnProcess bundles_process(std::size_t n, int rounds, std::vector<CoinBias> biases,
                                  std::vector<double> k0 = {}) {
  if (n < 2) throw InvalidArgument("bundles need n >= 2");
  if (rounds < 0) throw InvalidArgument("rounds must be non-negative");
  if (k0.empty()) k0.assign(n, 0.0);
  if (k0.size() != n) throw InvalidArgument("bundles need one initial count per type");
  auto b = detail::broadcast(biases, n);
  UrnProcess p;
  p.kind = UrnKind::Bundle;
  p.n = n;
  p.rounds = rounds;
  p.names.resize(n);
  p.k0.resize(n);
  for (std::size_t m = 1; m <= n; ++m) {
    p.names[p.pos(m)] = "K" + std::to_string(m);
    p.k0[p.pos(m)] = k0[m - 1];
    p.labels.push_back("A" + std::to_string(m));
    p.bias.push_back(b[m - 1]);
  }
  return p;
}

inline Exemplar bundles_chain(std::size_t n, int rounds, std::vector<CoinBias> biases, std::uint64_t seed,
                              std::vector<double> k0 = {}, const UrnOptions& opt = {}) {
  return urn_exemplar("bundles", bundles_process(n, rounds, std::move(biases), std::move(k0)), seed, opt);
}

/// Fewest elementary actions turning `from` into a state satisfying `goal`
/// (breadth-first, up to `max_depth`). Returns the action labels in order.
inline std::optional<std::vector<std::string>> shortest_composition(const std::vector<UnitAction>& actions,
                                                                    const State& from,
                                                                    const std::function<bool(const State&)>& goal,
                                                                    std::size_t max_depth) {
  std::map<State, std::pair<State, std::size_t>> parent;
  std::deque<std::pair<State, std::size_t>> queue{{from, 0}};
  std::set<State> seen{from};
  while (!queue.empty()) {
    auto [s, d] = queue.front();
    queue.pop_front();
    if (goal(s)) {
      std::vector<std::string> path;
      for (auto cur = s; cur != from;) {
        const auto& [prev, a] = parent.at(cur);
        path.push_back(actions[a].label);
        cur = prev;
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    if (d == max_depth) continue;
    for (std::size_t a = 0; a < actions.size(); ++a) {
      auto t = actions[a].apply(s);
      if (!t || !seen.insert(*t).second) continue;
      parent.emplace(*t, std::make_pair(s, a));
      queue.emplace_back(*t, d + 1);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rabbits

/// Unit state (rabbits, demand per rabbit, food). Eaten food X = min(F, n d);
/// food per rabbit Y = X / n. Food changes come in rations of F0 / n0; the
/// appetizer adds one base ration of demand.
inline Exemplar rabbits(double n_rabbits, double food_supply, double demand_per_rabbit, int scenario) {
  if (n_rabbits < 1) throw InvalidArgument("rabbits: need at least one rabbit");
  if (food_supply <= 0 || demand_per_rabbit <= 0) throw InvalidArgument("rabbits: parameters must be positive");
  if (scenario != 1 && scenario != 2) throw InvalidArgument("rabbits: scenario must be 1 or 2");
  Exemplar ex;
  ex.name = scenario == 1 ? "rabbits1" : "rabbits2";
  ex.variables = {"X", "Y"};
  ex.ground_truth = scenario == 1 ? Dag({"X", "Y"}, {{"Y", "X"}}) : Dag({"X", "Y"}, {{"X", "Y"}});
  ex.unique = true;
  auto observe = [](const State& s) {
    const double x = std::min(s[2], s[0] * s[1]);
    return std::vector<double>{x, x / s[0]};
  };
  const State start{n_rabbits, demand_per_rabbit, food_supply};
  const double ration = food_supply / n_rabbits;
  ex.unit_actions = {add_constant("appetizer", 1, demand_per_rabbit), add_constant("food+", 2, ration),
                     add_constant("food-", 2, -ration, 0.0), add_constant("rabbits+", 0, 1),
                     add_constant("rabbits-", 0, -1, 1.0)};
  // Every state within two actions must stay in the declared regime.
  auto in_regime = [&](const State& s) {
    const bool enough = s[2] >= s[0] * s[1];
    return scenario == 1 ? enough : (s[2] < s[0] * s[1]);
  };
  for (const auto& a : ex.unit_actions) {
    auto s1 = a.apply(start);
    if (!s1) throw InvalidArgument("rabbits: action '" + a.label + "' not applicable at the start state");
    for (const auto& b : ex.unit_actions) {
      auto s2 = b.apply(*s1);
      if (!in_regime(*s1) || (s2 && !in_regime(*s2)))
        throw InvalidArgument("rabbits: parameters leave the declared food regime within two actions");
    }
  }
  ex.units = UnitSystem{ex.variables, observe, {}, {start}};
  ex.sampler = [observe, start](std::size_t rows, std::uint64_t s) {
    Dataset d{{"X", "Y"}, std::vector<std::vector<double>>(rows, observe(start)), s};
    return d;
  };
  ex.params = {{"n_rabbits", n_rabbits},
               {"food_supply", food_supply},
               {"demand_per_rabbit", demand_per_rabbit},
               {"scenario", double(scenario)}};
  return ex;
}

// ---------------------------------------------------------------------------
// Micro pair behind two macro variables

enum class MacroChoice { ActOnOnes, ActOnTwos };

/// Unit state (x1, y2, u1, u2) with Y1 = X1 + u1 and X2 = Y2 + u2; observed
/// are the averages Xbar and Ybar.
inline std::vector<double> macro_observe(const State& s) {
  const double x1 = s[0], y2 = s[1], y1 = s[0] + s[2], x2 = s[1] + s[3];
  return {(x1 + x2) / 2, (y1 + y2) / 2};
}

/// Adds (delta + c, -c) to (X1, X2), the second part through u2.
inline State macro_shift(State s, double delta, double c) {
  s[0] += delta + c;
  s[3] -= c;
  return s;
}

inline Exemplar macro_pair(MacroChoice choice) {
  Exemplar ex;
  ex.name = choice == MacroChoice::ActOnOnes ? "macro1" : "macro2";
  ex.variables = {"Xbar", "Ybar"};
  ex.ground_truth = choice == MacroChoice::ActOnOnes ? Dag(ex.variables, {{"Xbar", "Ybar"}})
                                                     : Dag(ex.variables, {{"Ybar", "Xbar"}});
  ex.unique = true;
  if (choice == MacroChoice::ActOnOnes)
    ex.unit_actions = {add_constant("x1+", 0, 1), add_constant("x1-", 0, -1), add_constant("y1+", 2, 1),
                       add_constant("y1-", 2, -1)};
  else
    ex.unit_actions = {add_constant("x2+", 3, 1), add_constant("x2-", 3, -1), add_constant("y2+", 1, 1),
                       add_constant("y2-", 1, -1)};
  auto sample = [](CounterRng& rng) {
    State s(4);
    for (auto& v : s) v = double(rng.uniform_int(-5, 5));
    return s;
  };
  ex.units = UnitSystem{ex.variables, macro_observe, sample, {}};
  ex.sampler = [sample](std::size_t rows, std::uint64_t s) {
    Dataset d{{"Xbar", "Ybar"}, {}, s};
    for (std::size_t r = 0; r < rows; ++r) {
      CounterRng rng(s, r);
      d.rows.push_back(macro_observe(sample(rng)));
    }
    return d;
  };
  ex.params = {{"act_on", choice == MacroChoice::ActOnOnes ? 1.0 : 2.0}};
  return ex;
}

// ---------------------------------------------------------------------------
// Ball track

/// Start position X in 1..9 with P(X = x) proportional to exp(theta x); the
/// barrier reading is Y = round(4 sqrt(X) - offset) + e, e in {-1, 0, 1} with
/// probabilities (0.2, 0.6, 0.2). The reading decreases with the offset.
inline GeneralScm ball_track_scm(double theta, double offset) {
  std::vector<double> xs, w;
  for (int x = 1; x <= 9; ++x) {
    xs.push_back(x);
    w.push_back(std::exp(theta * x));
  }
  return GeneralScm({{"X", {}, [](const std::vector<double>&, double n) { return n; }, NoiseSpec::categorical(xs, w)},
                     {"Y", {"X"},
                      [offset](const std::vector<double>& pa, double n) {
                        return std::round(4 * std::sqrt(pa[0]) - offset) + n;
                      },
                      NoiseSpec::categorical({-1, 0, 1}, {0.2, 0.6, 0.2})}});
}

inline Exemplar ball_track(double theta, double barrier_offset, std::uint64_t seed) {
  Exemplar ex;
  ex.name = "balltrack";
  ex.variables = {"X", "Y"};
  ex.ground_truth = Dag(ex.variables, {{"X", "Y"}});
  ex.unique = true;
  auto base = ball_track_scm(theta, barrier_offset);
  auto js = joints_on_common_support(ex.variables, {exact_outcomes(base),
                                                    exact_outcomes(ball_track_scm(theta + 1, barrier_offset)),
                                                    exact_outcomes(ball_track_scm(theta, barrier_offset + 1))});
  ex.baseline = js[0];
  ex.statistical = {{"A1", js[1]}, {"A2", js[2]}};
  ex.sampler = [base](std::size_t rows, std::uint64_t s) { return simulate(base, rows, s); };
  ex.params = {{"theta", theta}, {"barrier_offset", barrier_offset}, {"seed", double(seed)}};
  return ex;
}

// ---------------------------------------------------------------------------
// Farmers

/// Potatoes K_P = base * F^(-e) are traded for eggs K_E = K_P * F at the
/// negotiated factor F in exchange_factor * {1, 2, 4}; base is uniform on
/// {10, 20, 30}. The single action shifts the distribution of F. Doubling
/// steps make different (base, F) pairs land on the same counts, so a
/// conditional that depends on F really moves.
inline std::vector<Outcome> farmers_outcomes(double exchange_factor, double elasticity,
                                             const std::vector<double>& f_probs) {
  std::vector<Outcome> out;
  for (double base : {10.0, 20.0, 30.0})
    for (std::size_t k = 0; k < 3; ++k) {
      const double f = exchange_factor * double(1 << k);
      const double kp = base * std::pow(f, -elasticity);
      out.push_back({{kp, kp * f}, f_probs[k] / 3.0});
    }
  return out;
}

/// Elasticity at which the egg count no longer depends on F.
inline double farmers_invariance_elasticity() { return 1.0; }

inline Exemplar farmers(double exchange_factor, double elasticity) {
  if (!(exchange_factor > 0)) throw InvalidArgument("farmers: exchange factor must be positive");
  Exemplar ex;
  ex.name = "farmers";
  ex.variables = {"K_P", "K_E"};
  if (elasticity == 0.0) ex.ground_truth = Dag(ex.variables, {{"K_P", "K_E"}});
  if (elasticity == farmers_invariance_elasticity()) ex.ground_truth = Dag(ex.variables, {{"K_E", "K_P"}});
  ex.unique = ex.ground_truth.has_value();
  const std::vector<double> before{0.5, 0.3, 0.2}, after{0.2, 0.3, 0.5};
  auto js = joints_on_common_support(ex.variables, {farmers_outcomes(exchange_factor, elasticity, before),
                                                    farmers_outcomes(exchange_factor, elasticity, after)});
  ex.baseline = js[0];
  ex.statistical = {{"change-F", js[1]}};
  auto outcomes = farmers_outcomes(exchange_factor, elasticity, before);
  ex.sampler = [outcomes](std::size_t rows, std::uint64_t s) {
    Dataset d{{"K_P", "K_E"}, {}, s};
    for (std::size_t r = 0; r < rows; ++r) {
      CounterRng rng(s, r);
      const double u = rng.uniform();
      double acc = 0.0;
      std::size_t pick = outcomes.size() - 1;
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        acc += outcomes[i].prob;
        if (u < acc) {
          pick = i;
          break;
        }
      }
      d.rows.push_back(outcomes[pick].values);
    }
    return d;
  };
  ex.params = {{"exchange_factor", exchange_factor}, {"elasticity", elasticity}};
  return ex;
}

}  // namespace phenocausal
