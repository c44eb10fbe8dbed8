#pragma once

#include "pgauge/numerics.hpp"

#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace pgauge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense LP:  minimize c'x  s.t.  A_eq x = b_eq,  A_le x <= b_le,  lower <= x <= upper.
/// Bounds default to [0, +inf); use -kInf / kInf for free variables.
struct LpProblem {
  Vector objective;
  Matrix eq_matrix;
  Vector eq_rhs;
  Matrix le_matrix;
  Vector le_rhs;
  Vector lower;
  Vector upper;

  /// n variables, zero objective, no constraints, bounds [0, +inf).
  static LpProblem with_variables(Index n);

  [[nodiscard]] Index num_variables() const { return objective.size(); }
  /// Throws DimensionMismatch / InvalidArgument on inconsistent data.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

[[nodiscard]] std::string_view to_string(LpStatus s);

/// The problem rewritten as  min c'z + offset  s.t.  A z = b,  z >= 0.
/// Every certificate in LpSolution refers to this form.
struct StandardForm {
  Matrix a;
  Vector b;
  Vector c;
  double offset = 0.0;
  /// Original x = shift + map * z.
  Matrix map;
  Vector shift;
};

[[nodiscard]] StandardForm standardize(const LpProblem& problem);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;           ///< Optimal point (or best feasible point seen when unbounded).
  double value = 0.0; ///< c'x at the returned point; -inf when unbounded.
  /// Optimal: simplex multipliers y with A'y <= c on the standard form.
  /// Infeasible: Farkas vector y with A'y <= 0 and b'y > 0.
  Vector certificate;
  /// Optimal: max of dual infeasibility and |complementary slackness|.
  /// Infeasible: max(A'y)_+ after normalizing b'y = 1.
  double certificate_residual = 0.0;
  /// max |Az - b| and max (-z)_+ on the standard form.
  double primal_residual = 0.0;
  /// Unbounded: direction of decrease in original variables.
  Vector ray;
  int iterations = 0;
};

struct LpOptions {
  double pivot_tol = 1e-10;
  double feasibility_tol = 1e-9;
  /// Dantzig pricing is used until this many consecutive degenerate pivots
  /// occur, after which Bland's rule is used for the remainder of the phase.
  int degenerate_switch = 20;
  /// 0 means 50 * (variables + constraints) of the standard form.
  int max_iterations = 0;
};

/// Two-phase dense tableau simplex. Throws NumericalFailure when the iteration
/// cap is reached or the final basis is singular.
[[nodiscard]] LpSolution lp_solve(const LpProblem& problem, const LpOptions& options = {});

struct FeasibilityResult {
  bool feasible = false;
  Vector witness;
  LpSolution lp;
};

/// Ignores the objective and decides whether the constraint system has a point.
[[nodiscard]] FeasibilityResult feasibility(LpProblem problem, const LpOptions& options = {});

/// Incremental construction of an LpProblem from named variable blocks and
/// sparse rows.
class LpBuilder {
 public:
  using Term = std::pair<Index, double>;

  /// Appends `count` variables with common bounds; returns the index of the first.
  Index add_variables(Index count, double lower = 0.0, double upper = kInf);
  void set_bounds(Index var, double lower, double upper);
  void set_objective(Index var, double coef);
  void add_eq(std::vector<Term> row, double rhs);
  void add_le(std::vector<Term> row, double rhs);
  void add_ge(std::vector<Term> row, double rhs);

  [[nodiscard]] Index num_variables() const { return static_cast<Index>(lower_.size()); }
  [[nodiscard]] LpProblem build() const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> objective_;
  std::vector<std::pair<std::vector<Term>, double>> eq_rows_;
  std::vector<std::pair<std::vector<Term>, double>> le_rows_;
};

}  // namespace pgauge
