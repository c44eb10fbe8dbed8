#include "pgauge/conditions.hpp"

#include "face_encoding.hpp"
#include "pgauge/errors.hpp"
#include "pgauge/linprog.hpp"

#include <algorithm>
#include <cmath>

namespace pgauge {

namespace {

constexpr double kLpTol = 1e-7;
constexpr double kAnalyticTol = 1e-9;
constexpr double kFaceTol = 1e-9;

using detail::LinearExpr;

void check_design(const GaugeSpec& spec, const Matrix& x, const Vector& beta) {
  if (x.cols() != spec.dim()) throw DimensionMismatch("design columns do not match gauge dimension");
  if (beta.size() != spec.dim()) throw DimensionMismatch("coefficient vector does not match gauge dimension");
}

void check_design(const Matrix& x, const Vector& beta) {
  if (x.cols() != beta.size()) throw DimensionMismatch("design columns do not match coefficient length");
}

// Expressions (M c)_j for a fresh block of free variables c.
std::vector<LinearExpr> image_of_free(LpBuilder& lp, const Matrix& m) {
  std::vector<LinearExpr> out(static_cast<std::size_t>(m.rows()));
  if (m.cols() == 0) return out;
  const Index c = lp.add_variables(m.cols(), -kInf, kInf);
  for (Index j = 0; j < m.rows(); ++j)
    for (Index k = 0; k < m.cols(); ++k)
      if (m(j, k) != 0.0) out[static_cast<std::size_t>(j)].terms.emplace_back(c + k, m(j, k));
  return out;
}

struct Distance {
  double value = 0.0;
  Vector point;  // value of the right-hand expressions at the optimum
};

Vector evaluate(const std::vector<LinearExpr>& e, const Vector& sol) {
  Vector out(static_cast<Index>(e.size()));
  for (std::size_t j = 0; j < e.size(); ++j) {
    double v = e[j].constant;
    for (const auto& [var, coef] : e[j].terms) v += coef * sol(var);
    out(static_cast<Index>(j)) = v;
  }
  return out;
}

// min r  s.t.  |left_j - right_j| <= r; the constraint system of `lp` must
// already define both expression families.
Distance sup_distance(LpBuilder& lp, const std::vector<LinearExpr>& left, const std::vector<LinearExpr>& right) {
  const Index r = lp.add_variables(1, 0.0, kInf);
  lp.set_objective(r, 1.0);
  for (std::size_t j = 0; j < left.size(); ++j) {
    std::vector<LpBuilder::Term> diff = left[j].terms;
    for (const auto& [var, coef] : right[j].terms) diff.emplace_back(var, -coef);
    const double rhs = right[j].constant - left[j].constant;
    auto upper = diff;
    upper.emplace_back(r, -1.0);
    lp.add_le(std::move(upper), rhs);
    diff.emplace_back(r, 1.0);
    lp.add_ge(std::move(diff), rhs);
  }
  const LpSolution sol = lp_solve(lp.build());
  if (sol.status != LpStatus::Optimal) {
    throw NumericalFailure(std::string("distance LP ended with status ") + std::string(to_string(sol.status)));
  }
  return {sol.value, evaluate(right, sol.x)};
}

std::vector<LinearExpr> row_space_exprs(LpBuilder& lp, const Matrix& x) { return image_of_free(lp, x.transpose()); }

}  // namespace

std::string_view to_string(ConditionMethod m) {
  switch (m) {
    case ConditionMethod::GeometricLp: return "geometric-lp";
    case ConditionMethod::EpigraphLp: return "epigraph-lp";
    case ConditionMethod::AnalyticL1: return "analytic-l1";
    case ConditionMethod::AnalyticSup: return "analytic-sup";
    case ConditionMethod::PathEmpirical: return "path-empirical";
    case ConditionMethod::FaceScan: return "face-scan";
  }
  return "unknown";
}

ConditionReport check_accessibility(const GaugeSpec& spec, const Matrix& x, const Vector& beta) {
  check_design(spec, x, beta);
  const Index p = spec.dim();
  const Vector fit = x * beta;
  LpBuilder lp;
  const Index b = lp.add_variables(p, -kInf, kInf);
  for (Index i = 0; i < x.rows(); ++i) {
    std::vector<LpBuilder::Term> row;
    for (Index j = 0; j < p; ++j)
      if (x(i, j) != 0.0) row.emplace_back(b + j, x(i, j));
    lp.add_eq(std::move(row), fit(i));
  }
  const Index t = detail::encode_epigraph(lp, spec, b);
  lp.set_objective(t, 1.0);
  const LpSolution sol = lp_solve(lp.build());
  if (sol.status != LpStatus::Optimal) {
    throw NumericalFailure(std::string("accessibility LP ended with status ") + std::string(to_string(sol.status)));
  }
  ConditionReport r;
  r.method = ConditionMethod::EpigraphLp;
  r.value = sol.value;
  r.certificate = sol.x.segment(b, p);
  r.certificate_norm = pen_eval(spec, r.certificate);
  r.margin = sol.value - pen_eval(spec, beta) + kLpTol;
  r.verdict = r.margin >= 0.0;
  return r;
}

ConditionReport check_accessibility_geometric(const GaugeSpec& spec, const Matrix& x, const Vector& beta) {
  check_design(spec, x, beta);
  LpBuilder lp;
  const auto left = row_space_exprs(lp, x);
  const auto right = detail::encode_subdifferential(lp, spec, beta, kActiveRelTol);
  const Distance d = sup_distance(lp, left, right);
  ConditionReport r;
  r.method = ConditionMethod::GeometricLp;
  r.value = d.value;
  r.certificate = d.point;
  r.certificate_norm = d.point.lpNorm<Eigen::Infinity>();
  r.margin = kLpTol - d.value;
  r.verdict = r.margin >= 0.0;
  return r;
}

ConditionReport check_nrc_geometric(const GaugeSpec& spec, const Matrix& x, const Vector& beta) {
  check_design(spec, x, beta);
  const SubspaceBasis lin = pattern_subspace(spec, beta);
  LpBuilder lp;
  const auto left = image_of_free(lp, x.transpose() * (x * lin.matrix()));
  const auto right = detail::encode_subdifferential(lp, spec, beta, kActiveRelTol);
  const Distance d = sup_distance(lp, left, right);
  ConditionReport r;
  r.method = ConditionMethod::GeometricLp;
  r.value = d.value;
  r.certificate = d.point;
  r.certificate_norm = d.point.lpNorm<Eigen::Infinity>();
  r.margin = kLpTol - d.value;
  r.verdict = r.margin >= 0.0;
  return r;
}

ConditionReport check_nrc_lasso(const Matrix& x, const Vector& beta) {
  check_design(x, beta);
  ConditionReport r;
  r.method = ConditionMethod::AnalyticL1;
  std::vector<Index> support;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) support.push_back(j);
  if (support.empty()) {
    r.verdict = true;
    r.margin = 1.0;
    r.certificate = Vector::Zero(beta.size());
    r.notes.emplace_back("beta = 0 satisfies the condition trivially");
    return r;
  }
  const Matrix xi = select_columns(x, support);
  const Vector sign = select_entries(beta, support).cwiseSign();
  const double residual = row_space_residual(xi, sign);
  r.certificate = x.transpose() * (pseudoinverse(xi.transpose()) * sign);
  r.certificate_norm = r.certificate.lpNorm<Eigen::Infinity>();
  r.value = r.certificate_norm;
  if (residual > kAnalyticTol) {
    r.margin = -residual;
    r.notes.emplace_back("sign(beta_I) is not in row(X_I)");
  } else {
    r.margin = 1.0 + kAnalyticTol - r.certificate_norm;
  }
  r.verdict = r.margin >= 0.0;
  return r;
}

Matrix sup_reduced_design(const Matrix& x, const Vector& beta) {
  check_design(x, beta);
  const double top = beta.lpNorm<Eigen::Infinity>();
  Vector first = Vector::Zero(x.rows());
  std::vector<Index> rest;
  for (Index j = 0; j < beta.size(); ++j) {
    if (top > 0.0 && std::abs(beta(j)) == top) {
      first += (beta(j) > 0.0 ? 1.0 : -1.0) * x.col(j);
    } else {
      rest.push_back(j);
    }
  }
  Matrix out(x.rows(), 1 + static_cast<Index>(rest.size()));
  out.col(0) = first;
  out.rightCols(static_cast<Index>(rest.size())) = select_columns(x, rest);
  return out;
}

ConditionReport check_nrc_sup(const Matrix& x, const Vector& beta) {
  check_design(x, beta);
  ConditionReport r;
  r.method = ConditionMethod::AnalyticSup;
  if (beta.lpNorm<Eigen::Infinity>() == 0.0) {
    r.verdict = true;
    r.margin = 1.0;
    r.certificate = Vector::Zero(beta.size());
    r.notes.emplace_back("beta = 0 satisfies the condition trivially");
    return r;
  }
  const Matrix xt = sup_reduced_design(x, beta);
  Vector e1 = Vector::Zero(xt.cols());
  e1(0) = 1.0;
  const double residual = row_space_residual(xt, e1);
  r.certificate = x.transpose() * (pseudoinverse(xt.transpose()) * e1);
  r.certificate_norm = r.certificate.lpNorm<1>();
  r.value = r.certificate_norm;
  if (residual > kAnalyticTol) {
    r.margin = -residual;
    r.notes.emplace_back("e_1 is not in row(X~)");
  } else {
    r.margin = 1.0 + kAnalyticTol - r.certificate_norm;
  }
  r.verdict = r.margin >= 0.0;
  return r;
}

std::vector<double> log_grid(double lo, double hi, Index count) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw InvalidArgument("log grid needs 0 < lo <= hi");
  if (count < 1) throw InvalidArgument("log grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(count - 1);
  for (Index i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

RecoveryScan scan_recovery(const GaugeSpec& spec, const Matrix& x, const Vector& y, const Vector& target,
                           const std::vector<double>& lambdas, const PathOptions& options) {
  check_design(spec, x, target);
  if (lambdas.empty()) throw InvalidArgument("lambda grid is empty");
  std::vector<double> grid = lambdas;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  const PatternFingerprint want = active_set(spec, target);
  RecoveryScan out;
  Vector warm = Vector::Zero(spec.dim());
  for (double lambda : grid) {
    SolveOptions so = options.solve;
    so.init = warm;
    const SolveResult s = solve_checked(spec, x, y, lambda, so);
    warm = s.beta;
    if (solution_fingerprint(spec, s.beta, options.pattern_tol) == want) {
      if (out.matches == 0) {
        out.first_lambda = lambda;
        out.first_beta = s.beta;
        out.first_pen = s.pen;
      }
      ++out.matches;
    }
  }
  return out;
}

ConditionReport check_nrc_path(const GaugeSpec& spec, const Matrix& x, const Vector& beta,
                               const std::vector<double>& lambdas, const PathOptions& options) {
  const RecoveryScan scan = scan_recovery(spec, x, x * beta, beta, lambdas, options);
  ConditionReport r;
  r.method = ConditionMethod::PathEmpirical;
  if (rank(x) < spec.dim()) r.notes.emplace_back("design is not injective; minimizers may not be unique");
  r.verdict = scan.matches > 0;
  // margin = number of recovering grid points - 1
  r.margin = static_cast<double>(scan.matches) - 1.0;
  if (r.verdict) {
    r.value = scan.first_lambda;
    r.certificate = scan.first_beta;
    r.certificate_norm = scan.first_pen;
  } else {
    r.notes.emplace_back("no grid value recovered the pattern");
  }
  return r;
}

double min_linf_representation(const Matrix& x, const Vector& target) {
  if (x.rows() != target.size()) throw DimensionMismatch("target length does not match design rows");
  LpBuilder lp;
  const Index g = lp.add_variables(x.cols(), -kInf, kInf);
  const Index r = lp.add_variables(1, 0.0, kInf);
  lp.set_objective(r, 1.0);
  for (Index i = 0; i < x.rows(); ++i) {
    std::vector<LpBuilder::Term> row;
    for (Index j = 0; j < x.cols(); ++j)
      if (x(i, j) != 0.0) row.emplace_back(g + j, x(i, j));
    lp.add_eq(std::move(row), target(i));
  }
  for (Index j = 0; j < x.cols(); ++j) {
    lp.add_le({{g + j, 1.0}, {r, -1.0}}, 0.0);
    lp.add_le({{g + j, -1.0}, {r, -1.0}}, 0.0);
  }
  const LpSolution sol = lp_solve(lp.build());
  if (sol.status == LpStatus::Infeasible) throw Infeasible("target is not in the column space of the design");
  if (sol.status != LpStatus::Optimal) throw NumericalFailure("min sup-norm representation LP is unbounded");
  return sol.value;
}

ConditionReport check_uniform_uniqueness(const GaugeSpec& spec, const Matrix& x) {
  if (x.cols() != spec.dim()) throw DimensionMismatch("design columns do not match gauge dimension");
  ConditionReport r;
  r.method = ConditionMethod::FaceScan;
  const Index deficiency = spec.dim() - rank(x);
  r.value = static_cast<double>(deficiency);
  r.margin = kInf;
  if (deficiency == 0) {
    r.verdict = true;
    r.notes.emplace_back("design is injective");
    return r;
  }
  const Matrix& u = spec.generators();
  const auto faces = enumerate_faces(spec);
  for (const Face& f : faces) {
    if (f.dimension >= deficiency) continue;
    LpBuilder lp;
    const auto left = row_space_exprs(lp, x);
    const auto right = detail::encode_hull(lp, u, f.vertices);
    const Distance d = sup_distance(lp, left, right);
    const double m = d.value - kFaceTol;
    if (m < r.margin) {
      r.margin = m;
      if (m < 0.0) r.certificate = d.point;
    }
    if (m < 0.0) r.violating_faces.push_back(f);
  }
  r.verdict = r.violating_faces.empty();
  if (r.certificate.size() > 0) r.certificate_norm = r.certificate.lpNorm<Eigen::Infinity>();
  return r;
}

}  // namespace pgauge
