#include "face_encoding.hpp"

#include "pgauge/errors.hpp"

#include <cmath>

namespace pgauge::detail {

namespace {

std::vector<LinearExpr> plain_variables(Index first, Index count) {
  std::vector<LinearExpr> out(static_cast<std::size_t>(count));
  for (Index j = 0; j < count; ++j) out[static_cast<std::size_t>(j)].terms.emplace_back(first + j, 1.0);
  return out;
}

std::vector<LinearExpr> d_transpose_sigma(const Matrix& d, Index sigma) {
  std::vector<LinearExpr> out(static_cast<std::size_t>(d.cols()));
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < d.rows(); ++i)
      if (d(i, j) != 0.0) out[static_cast<std::size_t>(j)].terms.emplace_back(sigma + i, d(i, j));
  return out;
}

// Sorted-l1 dual ball: every top-j sum of |s| is at most w_1 + ... + w_j.
std::vector<LinearExpr> slope_dual_ball(LpBuilder& lp, const Vector& w) {
  const Index p = w.size();
  const Index s = lp.add_variables(p, -kInf, kInf);
  const Index a = lp.add_variables(p, 0.0, kInf);
  for (Index i = 0; i < p; ++i) {
    lp.add_ge({{a + i, 1.0}, {s + i, -1.0}}, 0.0);
    lp.add_ge({{a + i, 1.0}, {s + i, 1.0}}, 0.0);
  }
  double cum = 0.0;
  for (Index j = 0; j < p; ++j) {
    cum += w(j);
    const Index theta = lp.add_variables(1, -kInf, kInf);
    const Index xi = lp.add_variables(p, 0.0, kInf);
    std::vector<LpBuilder::Term> top{{theta, static_cast<double>(j + 1)}};
    for (Index i = 0; i < p; ++i) {
      top.emplace_back(xi + i, 1.0);
      lp.add_ge({{xi + i, 1.0}, {a + i, -1.0}, {theta, 1.0}}, 0.0);
    }
    lp.add_le(std::move(top), cum);
  }
  return plain_variables(s, p);
}

}  // namespace

void add_expr_eq(LpBuilder& lp, const LinearExpr& expr, std::vector<LpBuilder::Term> extra, double rhs) {
  std::vector<LpBuilder::Term> row = expr.terms;
  row.insert(row.end(), extra.begin(), extra.end());
  lp.add_eq(std::move(row), rhs - expr.constant);
}

std::vector<LinearExpr> encode_hull(LpBuilder& lp, const Matrix& u, const std::vector<Index>& ids) {
  if (ids.empty()) throw InvalidArgument("convex hull of no generators");
  const auto k = static_cast<Index>(ids.size());
  const Index alpha = lp.add_variables(k, 0.0, kInf);
  std::vector<LpBuilder::Term> total;
  for (Index l = 0; l < k; ++l) total.emplace_back(alpha + l, 1.0);
  lp.add_eq(std::move(total), 1.0);
  std::vector<LinearExpr> out(static_cast<std::size_t>(u.cols()));
  for (Index j = 0; j < u.cols(); ++j)
    for (Index l = 0; l < k; ++l) {
      const double v = u(ids[static_cast<std::size_t>(l)], j);
      if (v != 0.0) out[static_cast<std::size_t>(j)].terms.emplace_back(alpha + l, v);
    }
  return out;
}

std::vector<LinearExpr> encode_dual_ball(LpBuilder& lp, const GaugeSpec& spec) {
  const Index p = spec.dim();
  switch (spec.kind()) {
    case GaugeKind::L1: return plain_variables(lp.add_variables(p, -1.0, 1.0), p);
    case GaugeKind::SupNorm: {
      const Index pos = lp.add_variables(p, 0.0, kInf);
      const Index neg = lp.add_variables(p, 0.0, kInf);
      std::vector<LpBuilder::Term> total;
      std::vector<LinearExpr> out(static_cast<std::size_t>(p));
      for (Index j = 0; j < p; ++j) {
        total.emplace_back(pos + j, 1.0);
        total.emplace_back(neg + j, 1.0);
        out[static_cast<std::size_t>(j)].terms = {{pos + j, 1.0}, {neg + j, -1.0}};
      }
      lp.add_le(std::move(total), 1.0);
      return out;
    }
    case GaugeKind::Slope: return slope_dual_ball(lp, spec.weights());
    case GaugeKind::GenLasso: {
      const Matrix& d = spec.difference_matrix();
      return d_transpose_sigma(d, lp.add_variables(d.rows(), -1.0, 1.0));
    }
    case GaugeKind::Custom: {
      std::vector<Index> all(static_cast<std::size_t>(spec.generators().rows()));
      for (std::size_t l = 0; l < all.size(); ++l) all[l] = static_cast<Index>(l);
      return encode_hull(lp, spec.generators(), all);
    }
  }
  return {};
}

std::vector<LinearExpr> encode_subdifferential(LpBuilder& lp, const GaugeSpec& spec, const Vector& beta,
                                               double rel_tol) {
  const Index p = spec.dim();
  if (beta.size() != p) throw DimensionMismatch("coefficient vector does not match gauge dimension");
  const double tol = rel_tol * std::max(1.0, pen_eval(spec, beta));
  switch (spec.kind()) {
    case GaugeKind::L1: {
      const auto pat = named_pattern(PatternKind::Sign, beta, tol);
      std::vector<LinearExpr> out(static_cast<std::size_t>(p));
      for (Index j = 0; j < p; ++j) {
        const int v = pat.values[static_cast<std::size_t>(j)];
        if (v != 0) {
          out[static_cast<std::size_t>(j)].constant = v;
        } else {
          out[static_cast<std::size_t>(j)].terms.emplace_back(lp.add_variables(1, -1.0, 1.0), 1.0);
        }
      }
      return out;
    }
    case GaugeKind::SupNorm: {
      const auto pat = named_pattern(PatternKind::Sup, beta, tol);
      bool zero = true;
      for (int v : pat.values) zero = zero && v == 0;
      if (zero) return encode_dual_ball(lp, spec);
      std::vector<LinearExpr> out(static_cast<std::size_t>(p));
      std::vector<LpBuilder::Term> total;
      for (Index j = 0; j < p; ++j) {
        const int v = pat.values[static_cast<std::size_t>(j)];
        if (v == 0) continue;
        const Index mass = lp.add_variables(1, 0.0, kInf);
        total.emplace_back(mass, 1.0);
        out[static_cast<std::size_t>(j)].terms.emplace_back(mass, static_cast<double>(v));
      }
      lp.add_eq(std::move(total), 1.0);
      return out;
    }
    case GaugeKind::Slope: {
      // The face of B* exposed by the canonical pattern vector.
      const auto pat = named_pattern(PatternKind::SlopeRank, beta, tol);
      Vector m(p);
      for (Index j = 0; j < p; ++j) m(j) = pat.values[static_cast<std::size_t>(j)];
      auto out = slope_dual_ball(lp, spec.weights());
      LinearExpr support;
      for (Index j = 0; j < p; ++j)
        if (m(j) != 0.0)
          for (const auto& [var, coef] : out[static_cast<std::size_t>(j)].terms) support.terms.emplace_back(var, coef * m(j));
      add_expr_eq(lp, support, {}, pen_eval(spec, m));
      return out;
    }
    case GaugeKind::GenLasso: {
      const Matrix& d = spec.difference_matrix();
      const Vector db = d * beta;
      std::vector<LinearExpr> out(static_cast<std::size_t>(p));
      for (Index i = 0; i < d.rows(); ++i) {
        const int v = std::abs(db(i)) <= tol ? 0 : (db(i) > 0 ? 1 : -1);
        if (v != 0) {
          for (Index j = 0; j < p; ++j) out[static_cast<std::size_t>(j)].constant += v * d(i, j);
        } else {
          const Index sigma = lp.add_variables(1, -1.0, 1.0);
          for (Index j = 0; j < p; ++j)
            if (d(i, j) != 0.0) out[static_cast<std::size_t>(j)].terms.emplace_back(sigma, d(i, j));
        }
      }
      return out;
    }
    case GaugeKind::Custom: return encode_hull(lp, spec.generators(), active_generators(spec, beta, rel_tol));
  }
  return {};
}

Index encode_epigraph(LpBuilder& lp, const GaugeSpec& spec, Index b0) {
  const Index p = spec.dim();
  const Index t = lp.add_variables(1, -kInf, kInf);
  switch (spec.kind()) {
    case GaugeKind::L1: {
      const Index a = lp.add_variables(p, 0.0, kInf);
      std::vector<LpBuilder::Term> row{{t, -1.0}};
      for (Index j = 0; j < p; ++j) {
        lp.add_ge({{a + j, 1.0}, {b0 + j, -1.0}}, 0.0);
        lp.add_ge({{a + j, 1.0}, {b0 + j, 1.0}}, 0.0);
        row.emplace_back(a + j, 1.0);
      }
      lp.add_le(std::move(row), 0.0);
      break;
    }
    case GaugeKind::SupNorm:
      for (Index j = 0; j < p; ++j) {
        lp.add_le({{b0 + j, 1.0}, {t, -1.0}}, 0.0);
        lp.add_le({{b0 + j, -1.0}, {t, -1.0}}, 0.0);
      }
      break;
    case GaugeKind::Slope: {
      // pen(b) = sum_j (w_j - w_{j+1}) * (sum of the j largest |b_i|).
      const Vector& w = spec.weights();
      const Index a = lp.add_variables(p, 0.0, kInf);
      for (Index i = 0; i < p; ++i) {
        lp.add_ge({{a + i, 1.0}, {b0 + i, -1.0}}, 0.0);
        lp.add_ge({{a + i, 1.0}, {b0 + i, 1.0}}, 0.0);
      }
      std::vector<LpBuilder::Term> row{{t, -1.0}};
      for (Index j = 0; j < p; ++j) {
        const double dw = w(j) - (j + 1 < p ? w(j + 1) : 0.0);
        const Index theta = lp.add_variables(1, -kInf, kInf);
        const Index xi = lp.add_variables(p, 0.0, kInf);
        row.emplace_back(theta, dw * static_cast<double>(j + 1));
        for (Index i = 0; i < p; ++i) {
          row.emplace_back(xi + i, dw);
          lp.add_ge({{xi + i, 1.0}, {a + i, -1.0}, {theta, 1.0}}, 0.0);
        }
      }
      lp.add_le(std::move(row), 0.0);
      break;
    }
    case GaugeKind::GenLasso: {
      const Matrix& d = spec.difference_matrix();
      const Index e = lp.add_variables(d.rows(), 0.0, kInf);
      std::vector<LpBuilder::Term> row{{t, -1.0}};
      for (Index i = 0; i < d.rows(); ++i) {
        std::vector<LpBuilder::Term> db;
        for (Index j = 0; j < p; ++j)
          if (d(i, j) != 0.0) db.emplace_back(b0 + j, d(i, j));
        auto up = db;
        up.emplace_back(e + i, -1.0);
        lp.add_le(std::move(up), 0.0);
        db.emplace_back(e + i, 1.0);
        lp.add_ge(std::move(db), 0.0);
        row.emplace_back(e + i, 1.0);
      }
      lp.add_le(std::move(row), 0.0);
      break;
    }
    case GaugeKind::Custom: {
      const Matrix& u = spec.generators();
      for (Index l = 1; l < u.rows(); ++l) {
        std::vector<LpBuilder::Term> row{{t, -1.0}};
        for (Index j = 0; j < p; ++j)
          if (u(l, j) != 0.0) row.emplace_back(b0 + j, u(l, j));
        lp.add_le(std::move(row), 0.0);
      }
      lp.set_bounds(t, 0.0, kInf);
      break;
    }
  }
  return t;
}

}  // namespace pgauge::detail
