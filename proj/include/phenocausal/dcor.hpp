#pragma once

// Distance correlation (V-statistic form) in O(n log n) for scalar columns.
// The cross term sum_ij |x_i - x_j| |y_i - y_j| is accumulated in x order with
// Fenwick trees over y ranks; tied pairs contribute zero on either side, so
// ties need no special care.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "phenocausal/errors.hpp"
#include "phenocausal/rng.hpp"

namespace phenocausal {

inline constexpr std::size_t kMinIndependenceSamples = 20;
inline constexpr std::size_t kDefaultPermutations = 199;

namespace detail {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : t_(n + 1, 0.0) {}
  void add(std::size_t i, double v) {
    for (++i; i < t_.size(); i += i & (~i + 1)) t_[i] += v;
  }
  // sum over [0, i)
  double prefix(std::size_t i) const {
    double s = 0.0;
    for (; i > 0; i -= i & (~i + 1)) s += t_[i];
    return s;
  }

 private:
  std::vector<double> t_;
};

// centered and scaled to unit variance; returns false for a constant column
inline bool standardize(std::span<const double> in, std::vector<double>& out) {
  const double n = double(in.size());
  double mean = 0.0;
  for (double v : in) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : in) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  out.resize(in.size());
  if (!(sd > 1e-12 * (1.0 + std::abs(mean)))) {
    std::fill(out.begin(), out.end(), 0.0);
    return false;
  }
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = (in[i] - mean) / sd;
  return true;
}

// row sums a_i. = sum_j |x_i - x_j|
inline std::vector<double> distance_row_sums(const std::vector<double>& x) {
  const auto n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  std::vector<double> rows(n);
  double below = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = order[k];
    const double above = total - below - x[i];
    rows[i] = x[i] * double(k) - below + above - x[i] * double(n - 1 - k);
    below += x[i];
  }
  return rows;
}

// sum over i != j of |x_i - x_j| |y_i - y_j|
inline double cross_distance_sum(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = x.size();
  std::vector<double> ys(y);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = std::size_t(std::lower_bound(ys.begin(), ys.end(), y[i]) - ys.begin());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  const auto m = ys.size();
  Fenwick cnt(m), sx(m), sy(m), sxy(m);
  double tc = 0, tx = 0, ty = 0, txy = 0, acc = 0;
  for (auto i : order) {
    const auto r = rank[i];
    // j already inserted have x_j <= x_i
    const double lc = cnt.prefix(r), lx = sx.prefix(r), ly = sy.prefix(r), lxy = sxy.prefix(r);
    const double ec = cnt.prefix(r + 1), ex = sx.prefix(r + 1), ey = sy.prefix(r + 1), exy = sxy.prefix(r + 1);
    const double gc = tc - ec, gx = tx - ex, gy = ty - ey, gxy = txy - exy;
    const double xi = x[i], yi = y[i];
    acc += xi * yi * lc - xi * ly - yi * lx + lxy;
    acc -= xi * yi * gc - xi * gy - yi * gx + gxy;
    cnt.add(r, 1);
    sx.add(r, xi);
    sy.add(r, yi);
    sxy.add(r, xi * yi);
    tc += 1;
    tx += xi;
    ty += yi;
    txy += xi * yi;
  }
  return 2.0 * acc;
}

inline double dcov2(double cross, const std::vector<double>& ra, const std::vector<double>& rb, double n) {
  double rowdot = 0.0, ta = 0.0, tb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    rowdot += ra[i] * rb[i];
    ta += ra[i];
    tb += rb[i];
  }
  return cross / (n * n) - 2.0 * rowdot / (n * n * n) + ta * tb / (n * n * n * n);
}

// sum over i != j of (x_i - x_j)^2 for a standardized column
inline double self_square_sum(const std::vector<double>& x) {
  double s = 0.0, s2 = 0.0;
  for (double v : x) {
    s += v;
    s2 += v * v;
  }
  return 2.0 * double(x.size()) * s2 - 2.0 * s * s;
}

}  // namespace detail

/// Precomputed per-column pieces so one column can be tested against many.
struct DcorColumn {
  std::vector<double> z;     // standardized
  std::vector<double> rows;  // distance row sums
  double self = 0.0;         // dCov^2(z, z)
  bool constant = false;
};

inline DcorColumn prepare_dcor(std::span<const double> v) {
  DcorColumn c;
  c.constant = !detail::standardize(v, c.z);
  if (c.constant) return c;
  c.rows = detail::distance_row_sums(c.z);
  c.self = std::max(0.0, detail::dcov2(detail::self_square_sum(c.z), c.rows, c.rows, double(v.size())));
  return c;
}

inline double distance_correlation(const DcorColumn& u, const DcorColumn& v) {
  if (u.z.size() != v.z.size()) throw InvalidArgument("distance correlation needs columns of equal length");
  if (u.constant || v.constant || u.self <= 0 || v.self <= 0) return 0.0;
  const double n = double(u.z.size());
  const double c = detail::dcov2(detail::cross_distance_sum(u.z, v.z), u.rows, v.rows, n);
  const double r2 = std::max(0.0, c) / std::sqrt(u.self * v.self);
  return std::sqrt(std::min(1.0, r2));
}

/// Distance correlation of two columns; 0 iff empirically independent. A
/// constant column gives 0 (see independence_diagnostic).
inline double independence_statistic(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InvalidArgument("independence statistic needs columns of equal length");
  if (u.size() < kMinIndependenceSamples) throw InvalidArgument("independence statistic needs at least 20 samples");
  return distance_correlation(prepare_dcor(u), prepare_dcor(v));
}

inline std::string independence_diagnostic(std::span<const double> u, std::span<const double> v) {
  std::vector<double> tmp;
  const bool cu = !detail::standardize(u, tmp), cv = !detail::standardize(v, tmp);
  if (cu && cv) return "both columns constant; statistic defined as 0";
  if (cu) return "first column constant; statistic defined as 0";
  if (cv) return "second column constant; statistic defined as 0";
  return "";
}

struct PermutationTest {
  double statistic = 0.0;
  double p_value = 1.0;
  double null_q95 = 0.0;  // 95th percentile of the permutation null
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
};

/// Permutation null for the distance correlation: v is shuffled with a
/// Fisher-Yates pass driven by CounterRng(seed, k) for permutation k.
inline PermutationTest permutation_test(std::span<const double> u, std::span<const double> v, std::uint64_t seed,
                                        std::size_t permutations = kDefaultPermutations) {
  if (permutations == 0) throw InvalidArgument("permutation test needs at least one permutation");
  PermutationTest t;
  t.permutations = permutations;
  t.seed = seed;
  const auto cu = prepare_dcor(u);
  const auto cv = prepare_dcor(v);
  t.statistic = distance_correlation(cu, cv);
  std::vector<double> null;
  null.reserve(permutations);
  std::size_t at_least = 0;
  for (std::size_t k = 0; k < permutations; ++k) {
    CounterRng rng(seed, k);
    DcorColumn p = cv;
    for (std::size_t i = p.z.size(); i > 1; --i) {
      const auto j = std::size_t(rng.uniform_int(0, std::int64_t(i) - 1));
      std::swap(p.z[i - 1], p.z[j]);
      if (!p.rows.empty()) std::swap(p.rows[i - 1], p.rows[j]);
    }
    const double s = distance_correlation(cu, p);
    null.push_back(s);
    if (s >= t.statistic) ++at_least;
  }
  std::sort(null.begin(), null.end());
  t.null_q95 = null[std::min(null.size() - 1, std::size_t(std::ceil(0.95 * double(null.size()))) - 1)];
  t.p_value = double(at_least + 1) / double(permutations + 1);
  return t;
}

}  // namespace phenocausal
