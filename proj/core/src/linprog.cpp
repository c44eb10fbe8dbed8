#include "pgauge/linprog.hpp"

#include "pgauge/errors.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace pgauge {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

LpProblem LpProblem::with_variables(Index n) {
  LpProblem p;
  p.objective = Vector::Zero(n);
  p.eq_matrix = Matrix(0, n);
  p.eq_rhs = Vector(0);
  p.le_matrix = Matrix(0, n);
  p.le_rhs = Vector(0);
  p.lower = Vector::Zero(n);
  p.upper = Vector::Constant(n, kInf);
  return p;
}

void LpProblem::validate() const {
  const Index n = objective.size();
  if (eq_matrix.cols() != n && eq_matrix.rows() > 0) throw DimensionMismatch("LP: eq_matrix column count");
  if (le_matrix.cols() != n && le_matrix.rows() > 0) throw DimensionMismatch("LP: le_matrix column count");
  if (eq_matrix.rows() != eq_rhs.size()) throw DimensionMismatch("LP: eq_rhs length");
  if (le_matrix.rows() != le_rhs.size()) throw DimensionMismatch("LP: le_rhs length");
  if (lower.size() != n || upper.size() != n) throw DimensionMismatch("LP: bound vector length");
  if (!objective.allFinite() || !eq_matrix.allFinite() || !eq_rhs.allFinite() || !le_matrix.allFinite() ||
      !le_rhs.allFinite()) {
    throw InvalidArgument("LP: non-finite data");
  }
  for (Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) || lower(j) == kInf ||
        upper(j) == -kInf) {
      throw InvalidArgument("LP: invalid bounds for variable " + std::to_string(j));
    }
  }
}

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

StandardForm standardize(const LpProblem& problem) {
  problem.validate();
  const Index n = problem.num_variables();
  const Index m_eq = problem.eq_matrix.rows();
  const Index m_le = problem.le_matrix.rows();

  // Column layout: structural columns first, then one slack per <= row and per
  // two-sided bound.
  struct VarMap {
    Index col;
    double sign;
    Index neg_col = -1;  // free variables: x = z[col] - z[neg_col]
    double shift = 0.0;
    bool two_sided = false;
  };
  std::vector<VarMap> vars(static_cast<std::size_t>(n));
  Index ncols = 0;
  Index n_bound_rows = 0;
  for (Index j = 0; j < n; ++j) {
    const double lo = problem.lower(j);
    const double hi = problem.upper(j);
    VarMap& v = vars[static_cast<std::size_t>(j)];
    if (std::isfinite(lo)) {
      v = {ncols++, 1.0, -1, lo, std::isfinite(hi)};
      if (v.two_sided) ++n_bound_rows;
    } else if (std::isfinite(hi)) {
      v = {ncols++, -1.0, -1, hi, false};
    } else {
      v = {ncols, 1.0, ncols + 1, 0.0, false};
      ncols += 2;
    }
  }
  const Index n_struct = ncols;
  const Index m = m_eq + m_le + n_bound_rows;
  const Index total = n_struct + m_le + n_bound_rows;

  StandardForm sf;
  sf.a = Matrix::Zero(m, total);
  sf.b = Vector::Zero(m);
  sf.c = Vector::Zero(total);
  sf.map = Matrix::Zero(n, total);
  sf.shift = Vector::Zero(n);

  for (Index j = 0; j < n; ++j) {
    const VarMap& v = vars[static_cast<std::size_t>(j)];
    sf.shift(j) = v.shift;
    sf.map(j, v.col) = v.sign;
    if (v.neg_col >= 0) sf.map(j, v.neg_col) = -1.0;
  }
  sf.c.head(n_struct) = (problem.objective.transpose() * sf.map.leftCols(n_struct)).transpose();
  sf.offset = problem.objective.dot(sf.shift);

  auto fill_row = [&](Index row, const Eigen::Ref<const Eigen::RowVectorXd>& coeffs, double rhs) {
    sf.a.row(row).head(n_struct) = coeffs * sf.map.leftCols(n_struct);
    sf.b(row) = rhs - coeffs.dot(sf.shift);
  };
  for (Index i = 0; i < m_eq; ++i) fill_row(i, problem.eq_matrix.row(i), problem.eq_rhs(i));
  for (Index i = 0; i < m_le; ++i) {
    fill_row(m_eq + i, problem.le_matrix.row(i), problem.le_rhs(i));
    sf.a(m_eq + i, n_struct + i) = 1.0;
  }
  Index brow = m_eq + m_le;
  Index bslack = n_struct + m_le;
  for (Index j = 0; j < n; ++j) {
    const VarMap& v = vars[static_cast<std::size_t>(j)];
    if (!v.two_sided) continue;
    sf.a(brow, v.col) = 1.0;
    sf.a(brow, bslack) = 1.0;
    sf.b(brow) = problem.upper(j) - problem.lower(j);
    ++brow;
    ++bslack;
  }
  return sf;
}

namespace {

enum class PhaseOutcome { Optimal, Unbounded };

class Simplex {
 public:
  Simplex(const StandardForm& sf, const LpOptions& opt) : sf_(sf), opt_(opt) {
    m_ = sf.a.rows();
    n_ = sf.a.cols();
    // Row scaling with sign so that rhs >= 0.
    row_scale_ = Vector::Ones(m_);
    for (Index i = 0; i < m_; ++i) {
      const double mx = sf.a.row(i).cwiseAbs().maxCoeff();
      double s = mx > 0.0 ? 1.0 / mx : 1.0;
      if (sf.b(i) < 0.0) s = -s;
      row_scale_(i) = s;
    }
    max_iter_ = opt.max_iterations > 0 ? opt.max_iterations : static_cast<int>(50 * (n_ + m_) + 50);
  }

  LpSolution run() {
    LpSolution sol;
    setup_phase_one();
    const PhaseOutcome p1 = iterate(/*allow_artificial=*/true);
    (void)p1;  // phase one is bounded below by zero
    const double infeas = -obj_;  // obj_ stores -(c_B' rhs)
    const double bscale = std::max(1.0, sf_.b.cwiseAbs().maxCoeff());
    if (infeas > opt_.feasibility_tol * bscale) {
      sol.status = LpStatus::Infeasible;
      farkas(sol);
      sol.iterations = iterations_;
      return sol;
    }
    drive_out_artificials();
    setup_phase_two();
    const PhaseOutcome p2 = iterate(/*allow_artificial=*/false);
    sol.iterations = iterations_;
    if (p2 == PhaseOutcome::Unbounded) {
      sol.status = LpStatus::Unbounded;
      Vector z = current_point();
      Vector dz = Vector::Zero(n_);
      dz(unbounded_col_) = 1.0;
      for (Index i = 0; i < static_cast<Index>(basis_.size()); ++i) {
        if (basis_[i] < n_) dz(basis_[i]) = -t_(i, unbounded_col_);
      }
      sol.x = sf_.shift + sf_.map * z;
      sol.ray = sf_.map * dz;
      sol.value = -kInf;
      return sol;
    }
    sol.status = LpStatus::Optimal;
    finalize_optimal(sol);
    return sol;
  }

 private:
  void setup_phase_one() {
    // Identify a natural slack basis: a column with a single +1 entry (after scaling sign).
    std::vector<Index> natural(static_cast<std::size_t>(m_), -1);
    for (Index j = 0; j < n_; ++j) {
      Index nz_row = -1;
      int nnz = 0;
      for (Index i = 0; i < m_; ++i) {
        if (sf_.a(i, j) != 0.0) {
          ++nnz;
          nz_row = i;
        }
      }
      if (nnz == 1 && sf_.a(nz_row, j) * row_scale_(nz_row) > 0.0 && natural[nz_row] < 0) {
        natural[nz_row] = j;
      }
    }
    n_art_ = 0;
    for (Index i = 0; i < m_; ++i)
      if (natural[i] < 0) ++n_art_;
    const Index cols = n_ + n_art_;
    t_ = RowMatrix::Zero(m_, cols);
    rhs_.resize(m_);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    Index art = n_;
    for (Index i = 0; i < m_; ++i) {
      t_.row(i).head(n_) = sf_.a.row(i) * row_scale_(i);
      rhs_(i) = sf_.b(i) * row_scale_(i);
      if (natural[i] >= 0) {
        const double piv = t_(i, natural[i]);
        t_.row(i) /= piv;
        rhs_(i) /= piv;
        basis_[i] = natural[i];
      } else {
        t_(i, art) = 1.0;
        art_rows_.push_back(i);
        basis_[i] = art++;
      }
    }
    cost_ = Vector::Zero(cols);
    cost_.tail(n_art_).setOnes();
    compute_reduced_costs();
    bland_ = false;
    degenerate_run_ = 0;
  }

  void compute_reduced_costs() {
    red_ = cost_;
    obj_ = 0.0;
    for (Index i = 0; i < m_; ++i) {
      const double cb = cost_(basis_[i]);
      if (cb != 0.0) {
        red_.noalias() -= cb * t_.row(i).transpose();
        obj_ -= cb * rhs_(i);
      }
    }
  }

  void setup_phase_two() {
    cost_ = Vector::Zero(t_.cols());
    cost_.head(n_) = sf_.c;
    compute_reduced_costs();
    bland_ = false;
    degenerate_run_ = 0;
  }

  void pivot(Index r, Index q) {
    const double piv = t_(r, q);
    t_.row(r) /= piv;
    rhs_(r) /= piv;
    Vector col = t_.col(q);
    col(r) = 0.0;
    t_.noalias() -= col * t_.row(r);
    rhs_.noalias() -= col * rhs_(r);
    t_(r, q) = 1.0;
    for (Index i = 0; i < m_; ++i)
      if (i != r) t_(i, q) = 0.0;
    const double dq = red_(q);
    red_.noalias() -= dq * t_.row(r).transpose();
    red_(q) = 0.0;
    obj_ -= dq * rhs_(r);
    basis_[r] = q;
    ++iterations_;
  }

  PhaseOutcome iterate(bool allow_artificial) {
    const Index ncols = allow_artificial ? t_.cols() : n_;
    const double dtol = 1e-10;
    while (true) {
      if (iterations_ > max_iter_) throw NumericalFailure("simplex: iteration cap reached");
      Index q = -1;
      double best = -dtol;
      for (Index j = 0; j < ncols; ++j) {
        if (red_(j) < -dtol) {
          if (bland_) {
            q = j;
            break;
          }
          if (red_(j) < best) {
            best = red_(j);
            q = j;
          }
        }
      }
      if (q < 0) return PhaseOutcome::Optimal;

      Index r = -1;
      double best_ratio = kInf;
      for (Index i = 0; i < m_; ++i) {
        const double a = t_(i, q);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = std::max(rhs_(i), 0.0) / a;
        if (r < 0 || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
          r = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
          const bool better = bland_ ? basis_[i] < basis_[r] : a > t_(r, q);
          if (better) {
            r = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (r < 0) {
        unbounded_col_ = q;
        return PhaseOutcome::Unbounded;
      }
      if (best_ratio <= 1e-12) {
        if (++degenerate_run_ >= opt_.degenerate_switch) bland_ = true;
      } else if (!bland_) {
        degenerate_run_ = 0;
      }
      pivot(r, q);
    }
  }

  void drive_out_artificials() {
    std::vector<Index> keep;
    for (Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      Index best = -1;
      double best_abs = 1e-9;
      for (Index j = 0; j < n_; ++j) {
        const double a = std::abs(t_(i, j));
        if (a > best_abs) {
          best_abs = a;
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
    for (Index i = 0; i < m_; ++i)
      if (basis_[i] < n_) keep.push_back(i);
    if (static_cast<Index>(keep.size()) == m_) return;
    // Remaining artificial rows are linearly dependent on the others.
    RowMatrix t2(static_cast<Index>(keep.size()), t_.cols());
    Vector r2(static_cast<Index>(keep.size()));
    std::vector<Index> b2;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      t2.row(static_cast<Index>(k)) = t_.row(keep[k]);
      r2(static_cast<Index>(k)) = rhs_(keep[k]);
      b2.push_back(basis_[keep[k]]);
    }
    kept_rows_ = keep;
    rows_reduced_ = true;
    t_ = std::move(t2);
    rhs_ = std::move(r2);
    basis_ = std::move(b2);
    m_ = t_.rows();
  }

  [[nodiscard]] Vector current_point() const {
    Vector z = Vector::Zero(n_);
    for (Index i = 0; i < m_; ++i)
      if (basis_[i] < n_) z(basis_[i]) = std::max(rhs_(i), 0.0);
    return z;
  }

  [[nodiscard]] std::vector<Index> original_rows() const {
    if (rows_reduced_) return kept_rows_;
    std::vector<Index> rows(static_cast<std::size_t>(m_));
    for (Index i = 0; i < m_; ++i) rows[static_cast<std::size_t>(i)] = i;
    return rows;
  }

  void finalize_optimal(LpSolution& sol) {
    const std::vector<Index> rows = original_rows();
    const Index mk = static_cast<Index>(rows.size());
    Vector z = current_point();
    Vector y = Vector::Zero(sf_.a.rows());
    if (mk > 0) {
      Matrix bmat(mk, mk);
      Vector bk(mk);
      Vector cb(mk);
      for (Index r = 0; r < mk; ++r) {
        bk(r) = sf_.b(rows[r]);
        for (Index k = 0; k < mk; ++k) bmat(r, k) = sf_.a(rows[r], basis_[k]);
      }
      for (Index k = 0; k < mk; ++k) cb(k) = sf_.c(basis_[k]);
      Eigen::FullPivLU<Matrix> lu(bmat);
      if (lu.isInvertible()) {
        const Vector xb = lu.solve(bk);
        const Vector yk = lu.transpose().solve(cb);
        const double scale = 1.0 + xb.cwiseAbs().maxCoeff();
        bool ok = xb.allFinite() && yk.allFinite();
        for (Index k = 0; ok && k < mk; ++k)
          if (xb(k) < -1e-7 * scale) ok = false;
        if (ok) {
          z.setZero();
          for (Index k = 0; k < mk; ++k) z(basis_[k]) = std::max(xb(k), 0.0);
          for (Index r = 0; r < mk; ++r) y(rows[r]) = yk(r);
        } else {
          y = tableau_duals(rows);
        }
      } else {
        y = tableau_duals(rows);
      }
    }
    const Vector d = sf_.c - sf_.a.transpose() * y;
    double cert = 0.0;
    for (Index j = 0; j < n_; ++j) {
      cert = std::max(cert, -d(j));
      cert = std::max(cert, std::abs(d(j) * z(j)));
    }
    sol.certificate = y;
    sol.certificate_residual = cert;
    sol.primal_residual = sf_.a.rows() > 0 ? (sf_.a * z - sf_.b).cwiseAbs().maxCoeff() : 0.0;
    sol.x = sf_.shift + sf_.map * z;
    sol.value = sf_.c.dot(z) + sf_.offset;
  }

  // Fallback multipliers from the scaled tableau: y_s = -(reduced cost of the
  // row's initial basic column), only valid when that column is a unit vector.
  [[nodiscard]] Vector tableau_duals(const std::vector<Index>& rows) const {
    Vector y = Vector::Zero(sf_.a.rows());
    const Index mk = static_cast<Index>(rows.size());
    Matrix bmat(mk, mk);
    Vector cb(mk);
    for (Index r = 0; r < mk; ++r)
      for (Index k = 0; k < mk; ++k) bmat(r, k) = sf_.a(rows[r], basis_[k]);
    for (Index k = 0; k < mk; ++k) cb(k) = sf_.c(basis_[k]);
    const Vector yk = bmat.transpose().completeOrthogonalDecomposition().solve(cb);
    for (Index r = 0; r < mk; ++r) y(rows[r]) = yk(r);
    return y;
  }

  void farkas(LpSolution& sol) {
    // Phase-one multipliers of the scaled system, mapped back to the standard form.
    Matrix bmat(m_, m_);
    Vector cb(m_);
    for (Index k = 0; k < m_; ++k) {
      const Index col = basis_[k];
      for (Index r = 0; r < m_; ++r) {
        bmat(r, k) = col < n_ ? sf_.a(r, col) * row_scale_(r) : (art_row(col) == r ? 1.0 : 0.0);
      }
      cb(k) = col < n_ ? 0.0 : 1.0;
    }
    Vector ys = bmat.transpose().completeOrthogonalDecomposition().solve(cb);
    Vector y = row_scale_.cwiseProduct(ys);
    const double by = sf_.b.dot(y);
    if (by > 0.0) y /= by;
    sol.certificate = y;
    const Vector aty = sf_.a.transpose() * y;
    sol.certificate_residual = aty.size() > 0 ? std::max(0.0, aty.maxCoeff()) : 0.0;
    if (by <= 0.0) sol.certificate_residual = kInf;
    sol.x = sf_.shift + sf_.map * current_point();
    sol.value = kInf;
    sol.primal_residual = kInf;
  }

  [[nodiscard]] Index art_row(Index col) const {
    return art_rows_[static_cast<std::size_t>(col - n_)];
  }

  const StandardForm& sf_;
  const LpOptions& opt_;
  Index m_ = 0;
  Index n_ = 0;
  Index n_art_ = 0;
  Vector row_scale_;
  RowMatrix t_;
  Vector rhs_;
  Vector cost_;
  Vector red_;
  double obj_ = 0.0;
  std::vector<Index> basis_;
  std::vector<Index> kept_rows_;
  std::vector<Index> art_rows_;
  bool rows_reduced_ = false;
  Index unbounded_col_ = -1;
  int iterations_ = 0;
  int max_iter_ = 0;
  bool bland_ = false;
  int degenerate_run_ = 0;
};

}  // namespace

LpSolution lp_solve(const LpProblem& problem, const LpOptions& options) {
  const StandardForm sf = standardize(problem);
  if (sf.a.rows() == 0) {
    // Only sign constraints: optimum at z = 0 unless some cost is negative.
    LpSolution sol;
    sol.iterations = 0;
    Index neg = -1;
    for (Index j = 0; j < sf.c.size(); ++j)
      if (sf.c(j) < 0.0) {
        neg = j;
        break;
      }
    const Vector z = Vector::Zero(sf.c.size());
    sol.x = sf.shift + sf.map * z;
    sol.certificate = Vector(0);
    if (neg >= 0) {
      sol.status = LpStatus::Unbounded;
      Vector dz = Vector::Zero(sf.c.size());
      dz(neg) = 1.0;
      sol.ray = sf.map * dz;
      sol.value = -kInf;
    } else {
      sol.status = LpStatus::Optimal;
      sol.value = sf.offset;
    }
    return sol;
  }
  Simplex simplex(sf, options);
  return simplex.run();
}

FeasibilityResult feasibility(LpProblem problem, const LpOptions& options) {
  problem.objective.setZero();
  FeasibilityResult out;
  out.lp = lp_solve(problem, options);
  out.feasible = out.lp.status != LpStatus::Infeasible;
  if (out.feasible) out.witness = out.lp.x;
  return out;
}

Index LpBuilder::add_variables(Index count, double lower, double upper) {
  const Index first = num_variables();
  for (Index i = 0; i < count; ++i) {
    lower_.push_back(lower);
    upper_.push_back(upper);
    objective_.push_back(0.0);
  }
  return first;
}

void LpBuilder::set_bounds(Index var, double lower, double upper) {
  lower_.at(static_cast<std::size_t>(var)) = lower;
  upper_.at(static_cast<std::size_t>(var)) = upper;
}

void LpBuilder::set_objective(Index var, double coef) { objective_.at(static_cast<std::size_t>(var)) = coef; }

void LpBuilder::add_eq(std::vector<Term> row, double rhs) { eq_rows_.emplace_back(std::move(row), rhs); }

void LpBuilder::add_le(std::vector<Term> row, double rhs) { le_rows_.emplace_back(std::move(row), rhs); }

void LpBuilder::add_ge(std::vector<Term> row, double rhs) {
  for (auto& t : row) t.second = -t.second;
  le_rows_.emplace_back(std::move(row), -rhs);
}

LpProblem LpBuilder::build() const {
  const Index n = num_variables();
  LpProblem p = LpProblem::with_variables(n);
  for (Index j = 0; j < n; ++j) {
    p.lower(j) = lower_[static_cast<std::size_t>(j)];
    p.upper(j) = upper_[static_cast<std::size_t>(j)];
    p.objective(j) = objective_[static_cast<std::size_t>(j)];
  }
  auto fill = [n](const auto& rows, Matrix& a, Vector& b) {
    a = Matrix::Zero(static_cast<Index>(rows.size()), n);
    b = Vector::Zero(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (const auto& [var, coef] : rows[i].first) a(static_cast<Index>(i), var) += coef;
      b(static_cast<Index>(i)) = rows[i].second;
    }
  };
  fill(eq_rows_, p.eq_matrix, p.eq_rhs);
  fill(le_rows_, p.le_matrix, p.le_rhs);
  return p;
}

}  // namespace pgauge
