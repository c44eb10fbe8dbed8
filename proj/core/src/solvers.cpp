#include "pgauge/errors.hpp"
#include "pgauge/linprog.hpp"
#include "pgauge/solvers.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>

namespace pgauge {

namespace {

void validate(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda) {
  if (x.cols() != spec.dim()) throw DimensionMismatch("design has " + std::to_string(x.cols()) +
                                                      " columns, gauge dimension is " + std::to_string(spec.dim()));
  if (x.rows() != y.size()) throw DimensionMismatch("design rows and response length differ");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive and finite");
  if (!all_finite(x) || !y.allFinite()) throw InvalidArgument("design and response must be finite");
}

double objective(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda, const Vector& b) {
  return 0.5 * (y - x * b).squaredNorm() + lambda * pen_eval(spec, b);
}

struct Candidate {
  Vector beta;
  double kkt = kInf;
  double obj = kInf;
};

// Solves the optimality system restricted to the pattern read off `beta` at
// several tolerances; on lin(C) the penalty is the linear map b -> s'b.
Candidate polish(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda, const Vector& beta) {
  static constexpr std::array<double, 6> kTolerances{1e-10, 1e-8, 1e-6, 1e-5, 1e-4, 1e-3};
  Candidate best;
  const double scale = std::max(1.0, beta.lpNorm<Eigen::Infinity>());
  for (double rel : kTolerances) {
    Vector cand;
    try {
      const double tol = rel * scale / std::max(1.0, pen_eval(spec, beta));
      const SubspaceBasis basis = pattern_subspace(spec, beta, tol);
      if (basis.dim() == 0) {
        cand = Vector::Zero(spec.dim());
      } else {
        const Vector s = subgradient_element(spec, beta, tol);
        const Matrix& b = basis.matrix();
        const Matrix xb = x * b;
        const Vector rhs = xb.transpose() * y - lambda * (b.transpose() * s);
        cand = b * (pseudoinverse(xb.transpose() * xb) * rhs);
      }
    } catch (const GeneratorBlowup&) {
      return best;
    }
    const double k = kkt_residual(spec, x, y, lambda, cand);
    if (k < best.kkt) best = {cand, k, objective(spec, x, y, lambda, cand)};
  }
  return best;
}

void finish(SolveResult& r, const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda) {
  r.fitted = x * r.beta;
  r.certificate = x.transpose() * (y - r.fitted) / lambda;
  r.pen = pen_eval(spec, r.beta);
  r.objective = 0.5 * (y - r.fitted).squaredNorm() + lambda * r.pen;
  r.kkt_residual = std::max(dual_feasibility(spec, r.certificate), std::abs(r.pen - r.certificate.dot(r.beta)));
}

// Monotone FISTA with backtracking and adaptive restarts.
SolveResult solve_proximal(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda,
                           const SolveOptions& opt) {
  const Index p = spec.dim();
  SolveResult r;
  Vector beta = opt.init ? *opt.init : Vector::Zero(p);
  if (beta.size() != p) throw DimensionMismatch("initial point does not match gauge dimension");

  double lip = spectral_norm_squared(x);
  if (lip <= 0.0) {
    r.beta = Vector::Zero(p);
    finish(r, spec, x, y, lambda);
    r.converged = r.kkt_residual <= opt.tol;
    return r;
  }
  Vector prev = beta;
  Vector yk = beta;
  double t = 1.0;
  double f_best = objective(spec, x, y, lambda, beta);
  double kkt = kkt_residual(spec, x, y, lambda, beta);
  if (opt.trace) r.objective_trace.push_back(f_best);

  int it = 0;
  while (kkt > opt.tol && it < opt.max_iter) {
    ++it;
    const Vector res_y = x * yk - y;
    const double f_y = 0.5 * res_y.squaredNorm();
    const Vector grad = x.transpose() * res_y;
    Vector z;
    double f_z = 0.0;
    while (true) {
      z = prox_gauge(spec, yk - grad / lip, lambda / lip);
      const Vector d = z - yk;
      f_z = 0.5 * (x * z - y).squaredNorm();
      if (f_z <= f_y + grad.dot(d) + 0.5 * lip * d.squaredNorm() + 1e-13 * std::max(1.0, f_y)) break;
      lip *= 2.0;
    }
    const double obj_z = f_z + lambda * pen_eval(spec, z);
    bool restart = false;
    prev = beta;
    if (obj_z <= f_best) {
      beta = z;
      f_best = obj_z;
    } else {
      restart = true;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    yk = beta + (t / t_next) * (z - beta) + ((t - 1.0) / t_next) * (beta - prev);
    t = t_next;
    if (restart || (opt.restart_period > 0 && it % opt.restart_period == 0)) {
      t = 1.0;
      yk = beta;
    }
    if (opt.trace) r.objective_trace.push_back(f_best);

    if (it % 10 == 0) kkt = kkt_residual(spec, x, y, lambda, beta);
    if (opt.polish && kkt > opt.tol && it % 50 == 0) {
      Candidate c = polish(spec, x, y, lambda, beta);
      if (c.kkt < kkt && c.obj <= f_best + 1e-12 * std::max(1.0, std::abs(f_best))) {
        beta = c.beta;
        kkt = c.kkt;
        f_best = std::min(f_best, c.obj);
        yk = beta;
        t = 1.0;
        r.polished = true;
        if (opt.trace) r.objective_trace.back() = f_best;
      }
    }
  }
  r.beta = beta;
  r.iterations = it;
  finish(r, spec, x, y, lambda);
  r.converged = r.kkt_residual <= opt.tol;
  return r;
}

// ADMM on  1/2||y - Xb||^2 + lambda h(z)  s.t.  z = D b, where h = ||.||_1 for
// GenLasso and h = pen with D = I for Custom gauges.
SolveResult solve_admm(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda,
                       const SolveOptions& opt) {
  const Index p = spec.dim();
  const bool genlasso = spec.kind() == GaugeKind::GenLasso;
  const Matrix d = genlasso ? spec.difference_matrix() : Matrix(Matrix::Identity(p, p));
  SolveResult r;

  Matrix stacked(x.rows() + d.rows(), p);
  stacked << x, d;
  double ridge = 0.0;
  if (rank(stacked) < p) {
    r.warnings.emplace_back("ker(X) and ker(D) intersect nontrivially; the minimizer set is unbounded");
    ridge = 1e-10 * std::max(1.0, (x.transpose() * x).trace());
  }

  const Matrix xtx = x.transpose() * x;
  const Matrix dtd = d.transpose() * d;
  const Vector xty = x.transpose() * y;
  double rho = 1.0;
  auto factor = [&] { return Eigen::LDLT<Matrix>(xtx + rho * dtd + ridge * Matrix::Identity(p, p)); };
  Eigen::LDLT<Matrix> ldlt = factor();

  Vector beta = opt.init ? *opt.init : Vector::Zero(p);
  if (beta.size() != p) throw DimensionMismatch("initial point does not match gauge dimension");
  Vector z = d * beta;
  Vector u = Vector::Zero(d.rows());

  auto z_prox = [&](const Vector& v, double step) -> Vector {
    return genlasso ? prox_l1(v, step) : prox_gauge(spec, v, step);
  };

  Vector best = beta;
  double best_kkt = kkt_residual(spec, x, y, lambda, beta);
  if (opt.trace) r.objective_trace.push_back(objective(spec, x, y, lambda, beta));

  int it = 0;
  while (best_kkt > opt.tol && it < opt.max_iter) {
    ++it;
    beta = ldlt.solve(xty + rho * d.transpose() * (z - u));
    const Vector db = d * beta;
    const Vector z_old = z;
    z = z_prox(db + u, lambda / rho);
    u += db - z;
    if (opt.trace) r.objective_trace.push_back(objective(spec, x, y, lambda, beta));

    if (it % 25 == 0) {
      const double primal = (db - z).norm();
      const double dual = rho * (d.transpose() * (z - z_old)).norm();
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        u /= 2.0;
        ldlt = factor();
      } else if (dual > 10.0 * primal) {
        rho /= 2.0;
        u *= 2.0;
        ldlt = factor();
      }
      // Cheap screen before the exact (LP based) residual: the scaled dual
      // variable should certify g = D' mu.
      const Vector g = x.transpose() * (y - x * beta) / lambda;
      const Vector mu = rho * u / lambda;
      const double screen = (g - d.transpose() * mu).lpNorm<Eigen::Infinity>();
      if (screen <= 10.0 * opt.tol) {
        const double k = kkt_residual(spec, x, y, lambda, beta);
        if (k < best_kkt) {
          best_kkt = k;
          best = beta;
        }
      }
    }
    if (opt.polish && it % 100 == 0) {
      Candidate c = polish(spec, x, y, lambda, beta);
      if (c.kkt < best_kkt) {
        best_kkt = c.kkt;
        best = c.beta;
        r.polished = true;
      }
    }
  }
  if (it >= opt.max_iter && best_kkt > opt.tol) {
    const double k = kkt_residual(spec, x, y, lambda, beta);
    if (k < best_kkt) best = beta;
  }
  r.beta = best;
  r.iterations = it;
  finish(r, spec, x, y, lambda);
  r.converged = r.kkt_residual <= opt.tol;
  return r;
}

}  // namespace

double kkt_residual(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda, const Vector& beta) {
  const Vector g = x.transpose() * (y - x * beta) / lambda;
  return std::max(dual_feasibility(spec, g), std::abs(pen_eval(spec, beta) - g.dot(beta)));
}

SolveResult solve(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda,
                  const SolveOptions& options) {
  validate(spec, x, y, lambda);
  if (options.tol <= 0.0) throw InvalidArgument("solver tolerance must be positive");
  switch (spec.kind()) {
    case GaugeKind::L1:
    case GaugeKind::Slope:
    case GaugeKind::SupNorm: return solve_proximal(spec, x, y, lambda, options);
    case GaugeKind::GenLasso:
    case GaugeKind::Custom: return solve_admm(spec, x, y, lambda, options);
  }
  return {};
}

SolveResult solve_checked(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda,
                          const SolveOptions& options) {
  SolveResult r = solve(spec, x, y, lambda, options);
  if (!r.converged) {
    throw NotConverged("solver stopped after " + std::to_string(r.iterations) + " iterations with KKT residual " +
                       std::to_string(r.kkt_residual) + " at lambda " + std::to_string(lambda));
  }
  return r;
}

}  // namespace pgauge
