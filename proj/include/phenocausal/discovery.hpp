#pragma once

// Linear non-Gaussian discovery (bivariate and DirectLiNGAM-style ordering)
// scored by distance correlation between regressor and residual, plus
// localization of mechanism changes across discrete environments by
// per-node stratified G-tests.

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phenocausal/dcor.hpp"
#include "phenocausal/discrete.hpp"
#include "phenocausal/errors.hpp"
#include "phenocausal/graph.hpp"
#include "phenocausal/rng.hpp"
#include "phenocausal/scm.hpp"

namespace phenocausal {

inline constexpr std::size_t kMinLingamSamples = 100;
inline constexpr double kNormalityAlpha = 0.01;
inline constexpr double kPruneThreshold = 0.05;

// ---------------------------------------------------------------------------
// Small numeric helpers

struct Moments {
  double mean = 0.0, var = 0.0, skew = 0.0, kurt = 0.0;  // kurt is not excess
};

inline Moments moments(const std::vector<double>& x) {
  Moments m;
  const double n = double(x.size());
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - m.mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.var = m2;
  if (m2 > 0) {
    m.skew = m3 / std::pow(m2, 1.5);
    m.kurt = m4 / (m2 * m2);
  }
  return m;
}

/// Jarque-Bera p-value (chi-square with 2 df). Constant input counts as normal.
inline double jarque_bera_p(const std::vector<double>& x) {
  const auto m = moments(x);
  if (!(m.var > 0)) return 1.0;
  const double jb = double(x.size()) / 6.0 * (m.skew * m.skew + (m.kurt - 3) * (m.kurt - 3) / 4.0);
  return std::exp(-jb / 2.0);
}

/// Chi-square upper tail.
inline double chi_square_sf(double stat, double df) {
  if (df <= 0) return 1.0;
  if (stat <= 0) return 1.0;
  return boost::math::gamma_q(df / 2.0, stat / 2.0);
}

struct SimpleFit {
  double slope = 0.0, intercept = 0.0;
  std::vector<double> residual;
};

inline SimpleFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const auto mx = moments(x), my = moments(y);
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - mx.mean) * (y[i] - my.mean);
  cov /= double(x.size());
  SimpleFit f;
  f.slope = mx.var > 0 ? cov / mx.var : 0.0;
  f.intercept = my.mean - f.slope * mx.mean;
  f.residual.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f.residual[i] = y[i] - f.intercept - f.slope * x[i];
  return f;
}

// ---------------------------------------------------------------------------
// Bivariate

enum class LingamVerdict { XcausesY, YcausesX, Undetermined, Degenerate };

inline const char* to_string(LingamVerdict v) {
  switch (v) {
    case LingamVerdict::XcausesY: return "XcausesY";
    case LingamVerdict::YcausesX: return "YcausesX";
    case LingamVerdict::Undetermined: return "Undetermined";
    case LingamVerdict::Degenerate: return "Degenerate";
  }
  return "?";
}

struct BivariateFit {
  std::string x, y;
  LingamVerdict verdict = LingamVerdict::Undetermined;
  double coefficient = 0.0;  // slope of effect on cause, or of y on x when undecided
  double confidence = 0.0;   // gap between the two statistics
  double stat_xy = 0.0;      // dCor(x, residual of y on x)
  double stat_yx = 0.0;      // dCor(y, residual of x on y)
  double slope_xy = 0.0, slope_yx = 0.0;
  double normality_p_xy = 1.0, normality_p_yx = 1.0;
  std::string diagnostic;
};

inline BivariateFit lingam_bivariate(const std::vector<double>& xv, const std::vector<double>& yv,
                                     std::string xname = "X", std::string yname = "Y") {
  if (xv.size() != yv.size()) throw InvalidArgument("lingam: columns differ in length");
  if (xv.size() < kMinLingamSamples) throw InvalidArgument("lingam: need at least 100 samples");
  BivariateFit r;
  r.x = std::move(xname);
  r.y = std::move(yname);
  const auto mx = moments(xv), my = moments(yv);
  if (!(mx.var > 0) || !(my.var > 0)) {
    r.verdict = LingamVerdict::Degenerate;
    r.diagnostic = "constant column";
    return r;
  }
  // work on standardized columns so the verdict is affine invariant
  std::vector<double> xs(xv.size()), ys(yv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    xs[i] = (xv[i] - mx.mean) / std::sqrt(mx.var);
    ys[i] = (yv[i] - my.mean) / std::sqrt(my.var);
  }
  const auto fxy = ols(xs, ys), fyx = ols(ys, xs);
  r.slope_xy = fxy.slope * std::sqrt(my.var / mx.var);
  r.slope_yx = fyx.slope * std::sqrt(mx.var / my.var);
  const double res_var = moments(fxy.residual).var;
  if (res_var < 1e-12) {
    r.verdict = LingamVerdict::Degenerate;
    r.coefficient = r.slope_xy;
    r.diagnostic = "zero residual variance: the columns are exact affine functions of each other";
    return r;
  }
  r.stat_xy = independence_statistic(xs, fxy.residual);
  r.stat_yx = independence_statistic(ys, fyx.residual);
  r.normality_p_xy = jarque_bera_p(fxy.residual);
  r.normality_p_yx = jarque_bera_p(fyx.residual);
  r.confidence = std::abs(r.stat_xy - r.stat_yx);
  if (r.normality_p_xy > kNormalityAlpha && r.normality_p_yx > kNormalityAlpha) {
    r.verdict = LingamVerdict::Undetermined;
    r.coefficient = r.slope_xy;
    r.diagnostic = "both residuals pass the normality test; direction not identifiable";
    return r;
  }
  if (r.stat_xy < r.stat_yx) {
    r.verdict = LingamVerdict::XcausesY;
    r.coefficient = r.slope_xy;
  } else if (r.stat_yx < r.stat_xy) {
    r.verdict = LingamVerdict::YcausesX;
    r.coefficient = r.slope_yx;
  } else {
    r.verdict = LingamVerdict::Undetermined;
    r.coefficient = r.slope_xy;
    r.diagnostic = "equal statistics";
  }
  return r;
}

inline BivariateFit lingam_bivariate(const Dataset& d, const std::string& x, const std::string& y) {
  if (d.cols() < 2) throw InvalidArgument("lingam: need at least two columns");
  return lingam_bivariate(d.column(x), d.column(y), x, y);
}

// ---------------------------------------------------------------------------
// Multivariate

struct EdgeScore {
  std::string from, to;
  double coefficient = 0.0;
  double standardized = 0.0;
};

struct DiscoveryResult {
  Dag dag;
  Eigen::MatrixXd a;  // a(j, i) = coefficient of column i in the equation of column j
  std::vector<std::string> order;
  std::vector<EdgeScore> scores;
  std::string method;
  std::string statistic = "distance correlation";
  double prune_threshold = kPruneThreshold;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> order_scores;  // exogeneity score when picked
};

/// DirectLiNGAM-style search: repeatedly pick the variable whose regression
/// residuals on it are jointly least dependent on it (sum of distance
/// correlations), regress it out of the rest, recurse. Coefficients come from
/// OLS on the ordered predecessors; edges with standardized |coefficient|
/// below the threshold are pruned and the equation is refit.
inline DiscoveryResult lingam_multivariate(const Dataset& data, double prune_threshold = kPruneThreshold) {
  const auto d = data.cols();
  const auto n = data.rows.size();
  if (d < 2) throw InvalidArgument("lingam: need at least two columns");
  if (n < kMinLingamSamples * d) throw InvalidArgument("lingam: need at least 100 samples per column");
  Eigen::MatrixXd x(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) x(Eigen::Index(r), Eigen::Index(c)) = data.rows[r][c];
  Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::VectorXd sd(d);
  for (std::size_t c = 0; c < d; ++c) {
    sd[Eigen::Index(c)] = std::sqrt(x.col(Eigen::Index(c)).squaredNorm() / double(n));
    if (!(sd[Eigen::Index(c)] > 0)) throw InvalidArgument("lingam: column '" + data.names[c] + "' is constant");
  }
  Eigen::MatrixXd z = x;
  for (std::size_t c = 0; c < d; ++c) z.col(Eigen::Index(c)) /= sd[Eigen::Index(c)];

  auto as_vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  auto resid = [](const Eigen::VectorXd& target, const Eigen::VectorXd& reg) -> Eigen::VectorXd {
    const double vv = reg.squaredNorm();
    if (!(vv > 0)) return target;
    return target - (reg.dot(target) / vv) * reg;
  };

  DiscoveryResult res;
  res.method = "direct-lingam";
  res.prune_threshold = prune_threshold;
  std::vector<std::size_t> remaining(d), order;
  for (std::size_t c = 0; c < d; ++c) remaining[c] = c;
  while (remaining.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = remaining.front();
    for (auto i : remaining) {
      const auto ci = prepare_dcor(as_vec(z.col(Eigen::Index(i))));
      double score = 0.0;
      for (auto j : remaining) {
        if (j == i) continue;
        score += distance_correlation(ci, prepare_dcor(as_vec(resid(z.col(Eigen::Index(j)), z.col(Eigen::Index(i))))));
      }
      if (score < best) {
        best = score;
        pick = i;
      }
    }
    order.push_back(pick);
    res.order_scores.emplace_back(data.names[pick], best);
    remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
    for (auto j : remaining) {
      Eigen::VectorXd r = resid(z.col(Eigen::Index(j)), z.col(Eigen::Index(pick)));
      const double s = std::sqrt(r.squaredNorm() / double(n));
      z.col(Eigen::Index(j)) = s > 0 ? Eigen::VectorXd(r / s) : r;
    }
  }
  order.push_back(remaining.front());
  res.order_scores.emplace_back(data.names[remaining.front()], 0.0);

  auto fit = [&](std::size_t j, const std::vector<std::size_t>& preds) {
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(Eigen::Index(preds.size()));
    if (preds.empty()) return coef;
    Eigen::MatrixXd m(n, preds.size());
    for (std::size_t k = 0; k < preds.size(); ++k) m.col(Eigen::Index(k)) = x.col(Eigen::Index(preds[k]));
    return Eigen::VectorXd(m.colPivHouseholderQr().solve(x.col(Eigen::Index(j))));
  };

  res.a = Eigen::MatrixXd::Zero(d, d);
  std::vector<NamedEdge> edges;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto j = order[k];
    std::vector<std::size_t> preds(order.begin(), order.begin() + std::ptrdiff_t(k));
    auto coef = fit(j, preds);
    std::vector<std::size_t> kept;
    for (std::size_t p = 0; p < preds.size(); ++p)
      if (std::abs(coef[Eigen::Index(p)] * sd[Eigen::Index(preds[p])] / sd[Eigen::Index(j)]) >= prune_threshold)
        kept.push_back(preds[p]);
    coef = fit(j, kept);
    for (std::size_t p = 0; p < kept.size(); ++p) {
      const auto i = kept[p];
      const double c = coef[Eigen::Index(p)];
      res.a(Eigen::Index(j), Eigen::Index(i)) = c;
      edges.emplace_back(data.names[i], data.names[j]);
      res.scores.push_back({data.names[i], data.names[j], c, c * sd[Eigen::Index(i)] / sd[Eigen::Index(j)]});
    }
  }
  for (auto o : order) res.order.push_back(data.names[o]);
  res.dag = Dag(data.names, edges);
  return res;
}

// ---------------------------------------------------------------------------
// Mechanism-change localization

struct NodeShiftTest {
  std::string node;
  double g_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::size_t contexts_used = 0;
  bool inconclusive = false;
};

struct EnvironmentShift {
  std::size_t environment = 0;  // index into the input list; 0 is the reference
  std::vector<std::string> changed;
  std::vector<std::string> inconclusive;
  std::vector<NodeShiftTest> tests;
};

inline constexpr std::size_t kDefaultMinContextCount = 5;
inline constexpr double kDefaultShiftAlpha = 0.01;

/// Compares every environment k >= 1 against environment 0. For each node, a
/// G-test of "environment independent of the node given its parents",
/// stratified by parent context. Contexts with fewer than `min_count` rows in
/// either environment are skipped; when the usable contexts hold less than
/// half of either environment's rows the node is reported inconclusive.
inline std::vector<EnvironmentShift> localize_mechanism_change(const std::vector<Dataset>& envs, const Dag& g,
                                                               double alpha = kDefaultShiftAlpha,
                                                               std::size_t min_count = kDefaultMinContextCount) {
  if (envs.size() < 2) throw InvalidArgument("shift localization needs a reference and at least one environment");
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("shift localization needs 0 < alpha < 1");
  std::vector<std::vector<std::size_t>> cols;
  for (const auto& e : envs) {
    if (e.rows.empty()) throw InvalidArgument("shift localization: empty environment");
    std::vector<std::size_t> idx;
    for (const auto& name : g.names()) idx.push_back(e.index_of(name));
    cols.push_back(std::move(idx));
  }
  using Key = std::vector<double>;
  std::vector<EnvironmentShift> out;
  for (std::size_t k = 1; k < envs.size(); ++k) {
    EnvironmentShift es;
    es.environment = k;
    for (NodeId j = 0; j < g.size(); ++j) {
      // context -> value -> counts (reference, environment)
      std::map<Key, std::map<double, std::pair<double, double>>> table;
      auto tally = [&](std::size_t e, bool second) {
        for (const auto& row : envs[e].rows) {
          Key ctx;
          for (auto p : g.parents(j)) ctx.push_back(row.at(cols[e][p]));
          auto& c = table[ctx][row.at(cols[e][j])];
          (second ? c.second : c.first) += 1;
        }
      };
      tally(0, false);
      tally(k, true);
      NodeShiftTest t;
      t.node = g.name(j);
      double used_ref = 0, used_env = 0;
      for (const auto& [ctx, vals] : table) {
        double n1 = 0, n2 = 0;
        for (const auto& [v, c] : vals) {
          n1 += c.first;
          n2 += c.second;
        }
        if (n1 < double(min_count) || n2 < double(min_count)) continue;
        ++t.contexts_used;
        used_ref += n1;
        used_env += n2;
        const double tot = n1 + n2;
        for (const auto& [v, c] : vals) {
          const double col = c.first + c.second;
          for (auto [o, nr] : {std::pair{c.first, n1}, std::pair{c.second, n2}})
            if (o > 0) t.g_stat += 2.0 * o * std::log(o / (nr * col / tot));
        }
        t.df += double(vals.size()) - 1.0;
      }
      t.inconclusive = t.contexts_used == 0 || used_ref < 0.5 * double(envs[0].rows.size()) ||
                       used_env < 0.5 * double(envs[k].rows.size());
      t.p_value = chi_square_sf(t.g_stat, t.df);
      if (t.inconclusive) es.inconclusive.push_back(t.node);
      else if (t.p_value < alpha) es.changed.push_back(t.node);
      es.tests.push_back(std::move(t));
    }
    out.push_back(std::move(es));
  }
  return out;
}

/// Exact version: environment k against environment 0 by changed_factors.
inline std::vector<NodeSet> localize_mechanism_change(const std::vector<DiscreteJoint>& envs, const Dag& g,
                                                      double eps = kExactEps) {
  if (envs.size() < 2) throw InvalidArgument("shift localization needs a reference and at least one environment");
  std::vector<NodeSet> out;
  for (std::size_t k = 1; k < envs.size(); ++k) out.push_back(changed_factors(envs[0], envs[k], g, eps));
  return out;
}

/// i.i.d. rows from an exact joint; row r uses CounterRng(seed, r).
inline Dataset sample_joint(const DiscreteJoint& p, std::size_t rows, std::uint64_t seed) {
  if (rows == 0) throw InvalidArgument("sample size must be at least 1");
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t f = 0; f < p.size(); ++f) cdf[f] = acc += p[f];
  Dataset d{p.names(), {}, seed};
  d.rows.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    CounterRng rng(seed, r);
    const double u = rng.uniform() * acc;
    auto f = std::size_t(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (f >= p.size()) f = p.size() - 1;
    const auto st = p.decode(f);
    std::vector<double> row;
    for (std::size_t i = 0; i < st.size(); ++i) row.push_back(p.variables()[i].value(st[i]));
    d.rows.push_back(std::move(row));
  }
  return d;
}

}  // namespace phenocausal
