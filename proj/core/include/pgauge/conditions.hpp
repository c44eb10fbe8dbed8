#pragma once

#include "pgauge/gauge.hpp"
#include "pgauge/solvers.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pgauge {

enum class ConditionMethod { GeometricLp, EpigraphLp, AnalyticL1, AnalyticSup, PathEmpirical, FaceScan };

[[nodiscard]] std::string_view to_string(ConditionMethod m);

/// Outcome of a condition check. `margin` is signed: the verdict is true
/// exactly when margin >= 0, and |margin| is the distance to the decision
/// boundary in the units of the underlying quantity.
struct ConditionReport {
  bool verdict = false;
  double margin = 0.0;
  ConditionMethod method = ConditionMethod::GeometricLp;
  /// Witness: LP solution, X'(X~')^+ e_1, or the recovering minimizer.
  Vector certificate;
  double certificate_norm = 0.0;
  /// Main scalar of the check (LP value, analytic norm, matching lambda).
  double value = 0.0;
  /// Uniform uniqueness only: faces of dimension < def(X) meeting row(X).
  std::vector<Face> violating_faces;
  std::vector<std::string> notes;
};

/// Accessibility of the pattern of beta: min{pen(b) : Xb = X beta} = pen(beta).
/// margin = LP value - pen(beta) + 1e-7.
[[nodiscard]] ConditionReport check_accessibility(const GaugeSpec& spec, const Matrix& x, const Vector& beta);

/// Same question in its dual form: row(X) meets the subdifferential at beta.
/// margin = 1e-7 - sup-norm distance between the two sets.
[[nodiscard]] ConditionReport check_accessibility_geometric(const GaugeSpec& spec, const Matrix& x,
                                                            const Vector& beta);

/// Noiseless recovery condition: X'X lin(C_beta) meets the subdifferential at
/// beta. margin = 1e-7 - sup-norm distance; certificate = the subgradient hit.
[[nodiscard]] ConditionReport check_nrc_geometric(const GaugeSpec& spec, const Matrix& x, const Vector& beta);

/// LASSO irrepresentability: sign(beta_I) in row(X_I) and
/// ||X'(X_I')^+ sign(beta_I)||_inf <= 1. margin = 1 + 1e-9 - norm.
[[nodiscard]] ConditionReport check_nrc_lasso(const Matrix& x, const Vector& beta);

/// Sup-norm analogue with X~ = (X_{I^c} sign(beta_{I^c}) | X_I), I the
/// non-maximal components: e_1 in row(X~) and ||X'(X~')^+ e_1||_1 <= 1.
[[nodiscard]] ConditionReport check_nrc_sup(const Matrix& x, const Vector& beta);

/// The design X~ used by check_nrc_sup.
[[nodiscard]] Matrix sup_reduced_design(const Matrix& x, const Vector& beta);

/// Log-spaced grid of `count` values from lo to hi inclusive.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, Index count);

/// Outcome of solving along a grid and comparing fingerprints with a target.
struct RecoveryScan {
  Index matches = 0;
  /// Largest recovering lambda and its minimizer (when matches > 0).
  double first_lambda = 0.0;
  Vector first_beta;
  double first_pen = 0.0;
};

/// Solves at y on every grid value (largest first, warm started) and counts
/// the minimizers whose fingerprint equals the one of `target`.
[[nodiscard]] RecoveryScan scan_recovery(const GaugeSpec& spec, const Matrix& x, const Vector& y,
                                         const Vector& target, const std::vector<double>& lambdas,
                                         const PathOptions& options = {});

/// Empirical recovery: solves at y = X beta on every grid value (largest
/// first) and reports the first lambda whose minimizer has the fingerprint of
/// beta. A true verdict is a certificate up to solver tolerance; false only
/// means no grid point recovered the pattern.
[[nodiscard]] ConditionReport check_nrc_path(const GaugeSpec& spec, const Matrix& x, const Vector& beta,
                                             const std::vector<double>& lambdas, const PathOptions& options = {});

/// min ||gamma||_inf subject to X gamma = target. Throws Infeasible when the
/// system has no solution.
[[nodiscard]] double min_linf_representation(const Matrix& x, const Vector& target);

/// Uniform uniqueness: no face of B* with dimension < def(X) meets row(X).
/// margin = smallest distance from row(X) to such a face minus 1e-9.
[[nodiscard]] ConditionReport check_uniform_uniqueness(const GaugeSpec& spec, const Matrix& x);

}  // namespace pgauge
