#pragma once

// LP building blocks shared by the condition checkers.

#include "pgauge/gauge.hpp"
#include "pgauge/linprog.hpp"

#include <vector>

namespace pgauge::detail {

/// sum_k coef_k * x_{var_k} + constant
struct LinearExpr {
  std::vector<LpBuilder::Term> terms;
  double constant = 0.0;
};

/// Appends variables and constraints so that the returned p expressions range
/// exactly over the subdifferential of pen at beta.
[[nodiscard]] std::vector<LinearExpr> encode_subdifferential(LpBuilder& lp, const GaugeSpec& spec,
                                                             const Vector& beta, double rel_tol);

/// The returned expressions range over conv{u_l : l in ids}.
[[nodiscard]] std::vector<LinearExpr> encode_hull(LpBuilder& lp, const Matrix& u, const std::vector<Index>& ids);

/// The returned expressions range over B*.
[[nodiscard]] std::vector<LinearExpr> encode_dual_ball(LpBuilder& lp, const GaugeSpec& spec);

/// Adds a variable t with pen(x_{b0}, ..., x_{b0+p-1}) <= t; returns its index.
[[nodiscard]] Index encode_epigraph(LpBuilder& lp, const GaugeSpec& spec, Index b0);

/// Adds the row  expr + sum(extra) = rhs.
void add_expr_eq(LpBuilder& lp, const LinearExpr& expr, std::vector<LpBuilder::Term> extra, double rhs);

}  // namespace pgauge::detail
