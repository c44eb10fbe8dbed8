#pragma once

// Brute-force reference implementations used only by the tests. They are
// deliberately naive and independent of the library's algorithms.

#include "pgauge/numerics.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace pgauge::oracle {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double x : r) out(i, j++) = x;
    ++i;
  }
  return out;
}

inline Matrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

inline Vector gaussian_vector(std::mt19937_64& rng, Index size, double sd = 1.0) {
  return gaussian_matrix(rng, size, 1, sd).col(0);
}

/// min c'x s.t. A x <= b by enumerating every vertex (basic solution of n
/// tight rows). The feasible region must be bounded. nullopt when infeasible.
inline std::optional<double> lp_vertex_enumeration(const Matrix& a, const Vector& b, const Vector& c,
                                                   double tol = 1e-9) {
  const Index m = a.rows();
  const Index n = a.cols();
  std::optional<double> best;
  std::vector<int> pick(static_cast<std::size_t>(m), 0);
  std::fill(pick.begin(), pick.begin() + n, 1);
  do {
    Matrix sub(n, n);
    Vector rhs(n);
    Index r = 0;
    for (Index i = 0; i < m; ++i)
      if (pick[static_cast<std::size_t>(i)]) {
        sub.row(r) = a.row(i);
        rhs(r++) = b(i);
      }
    Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.rank() < n) continue;
    const Vector x = lu.solve(rhs);
    if (((a * x - b).array() > tol).any()) continue;
    const double v = c.dot(x);
    if (!best || v < *best) best = v;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

/// Minimizes f over a regular grid in [lo, hi]^p; returns the best point.
inline Vector grid_minimize(const std::function<double(const Vector&)>& f, Index p, double lo, double hi,
                            double step) {
  const auto count = static_cast<Index>(std::floor((hi - lo) / step + 0.5)) + 1;
  Vector best = Vector::Constant(p, lo);
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Index> idx(static_cast<std::size_t>(p), 0);
  Vector x(p);
  while (true) {
    for (Index j = 0; j < p; ++j) x(j) = lo + step * static_cast<double>(idx[static_cast<std::size_t>(j)]);
    const double v = f(x);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
    Index j = 0;
    while (j < p && ++idx[static_cast<std::size_t>(j)] == count) idx[static_cast<std::size_t>(j++)] = 0;
    if (j == p) break;
  }
  return best;
}

/// All signed-rank SLOPE patterns of length p (each as an integer vector).
inline std::vector<std::vector<int>> all_slope_patterns(Index p) {
  std::vector<std::vector<int>> out;
  // Assign each coordinate a value in {-p..p}; keep the vectors whose nonzero
  // absolute values form exactly {1..m} for some m.
  const auto base = 2 * p + 1;
  Index total = 1;
  for (Index j = 0; j < p; ++j) total *= base;
  for (Index code = 0; code < total; ++code) {
    std::vector<int> v(static_cast<std::size_t>(p));
    Index c = code;
    for (Index j = 0; j < p; ++j) {
      v[static_cast<std::size_t>(j)] = static_cast<int>(c % base) - static_cast<int>(p);
      c /= base;
    }
    int m = 0;
    for (int x : v) m = std::max(m, std::abs(x));
    bool ok = true;
    for (int r = 1; r <= m && ok; ++r)
      ok = std::any_of(v.begin(), v.end(), [r](int x) { return std::abs(x) == r; });
    if (ok) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace pgauge::oracle

namespace pgauge::oracle {

/// prox of t * sorted-l1 by trying every signed-rank pattern: on a pattern's
/// cone the norm is linear, so each pattern gives a closed-form candidate that
/// is kept only if it really has that pattern.
inline Vector slope_prox_by_patterns(const Vector& v, const Vector& w, double t) {
  const Index p = v.size();
  Vector best;
  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& m : all_slope_patterns(p)) {
    int top = 0;
    for (int x : m) top = std::max(top, std::abs(x));
    Vector x = Vector::Zero(p);
    Index pos = 0;
    for (int r = top; r >= 1; --r) {
      std::vector<Index> members;
      for (Index j = 0; j < p; ++j)
        if (std::abs(m[static_cast<std::size_t>(j)]) == r) members.push_back(j);
      const auto size = static_cast<Index>(members.size());
      const double wbar = w.segment(pos, size).sum();
      pos += size;
      double proj = 0.0;
      for (Index j : members) proj += (m[static_cast<std::size_t>(j)] > 0 ? 1.0 : -1.0) * v(j);
      const double c = (proj - t * wbar) / static_cast<double>(size);
      for (Index j : members) x(j) = (m[static_cast<std::size_t>(j)] > 0 ? 1.0 : -1.0) * c;
    }
    // Pattern check: cluster values positive and strictly ordered by rank.
    bool ok = true;
    for (Index i = 0; i < p && ok; ++i)
      for (Index j = 0; j < p && ok; ++j) {
        const int ri = std::abs(m[static_cast<std::size_t>(i)]);
        const int rj = std::abs(m[static_cast<std::size_t>(j)]);
        if (ri > rj && !(std::abs(x(i)) > std::abs(x(j)) - 1e-12)) ok = false;
      }
    for (Index j = 0; j < p && ok; ++j)
      if (m[static_cast<std::size_t>(j)] != 0 && !(m[static_cast<std::size_t>(j)] * x(j) >= -1e-12)) ok = false;
    if (!ok) continue;
    Vector a = x.cwiseAbs();
    std::sort(a.data(), a.data() + a.size(), std::greater<>());
    const double val = 0.5 * (x - v).squaredNorm() + t * w.dot(a);
    if (val < best_val) {
      best_val = val;
      best = x;
    }
  }
  return best;
}

}  // namespace pgauge::oracle
