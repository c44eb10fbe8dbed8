#pragma once

#include "pgauge/gauge.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pgauge {

// ---------------------------------------------------------------------------
// Proximal operators

/// Soft thresholding: argmin_x 1/2 ||x - v||^2 + t ||x||_1.
[[nodiscard]] Vector prox_l1(const Vector& v, double t);

/// argmin_x 1/2 ||x - v||^2 + t ||x||_w for strictly decreasing positive w.
[[nodiscard]] Vector prox_sorted_l1(const Vector& v, const Vector& w, double t);

/// argmin_x 1/2 ||x - v||^2 + t ||x||_inf, computed as v - proj_{t B_1}(v).
[[nodiscard]] Vector prox_linf(const Vector& v, double t);

/// Euclidean projection onto {x : ||x||_1 <= radius}.
[[nodiscard]] Vector project_l1_ball(const Vector& v, double radius);

/// Minimum-norm point of conv(rows of `points`) (Wolfe's algorithm).
[[nodiscard]] Vector min_norm_point(const Matrix& points, double tol = 1e-12);

/// argmin_x 1/2 ||x - v||^2 + t pen(x) for any gauge, via v - t proj_{B*}(v / t).
[[nodiscard]] Vector prox_gauge(const GaugeSpec& spec, const Vector& v, double t);

// ---------------------------------------------------------------------------
// Penalized least squares: minimize 1/2 ||y - X b||^2 + lambda pen(b)

struct SolveOptions {
  double tol = 1e-7;
  int max_iter = 100000;
  /// Momentum is reset every `restart_period` iterations (0 = only adaptive restarts).
  int restart_period = 0;
  /// Starting point; zero when absent.
  std::optional<Vector> init;
  /// Try to finish by solving the optimality system on the identified pattern.
  bool polish = true;
  /// Record the objective after every iteration.
  bool trace = false;
};

struct SolveResult {
  Vector beta;
  Vector fitted;
  /// g = X'(y - X beta) / lambda.
  Vector certificate;
  double kkt_residual = 0.0;
  double objective = 0.0;
  double pen = 0.0;
  int iterations = 0;
  bool converged = false;
  bool polished = false;
  std::vector<double> objective_trace;
  std::vector<std::string> warnings;
};

/// max(dual_feasibility(spec, g), |pen(beta) - g'beta|) with g = X'(y - X beta) / lambda.
[[nodiscard]] double kkt_residual(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda,
                                  const Vector& beta);

/// Accelerated proximal gradient (L1, Slope, SupNorm) or ADMM (GenLasso, Custom).
/// Returns the best iterate with converged = false when max_iter is reached.
[[nodiscard]] SolveResult solve(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda,
                                const SolveOptions& options = {});

/// Same as solve, but throws NotConverged instead of returning an unconverged result.
[[nodiscard]] SolveResult solve_checked(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda,
                                        const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Solution paths

struct PathOptions {
  Index grid_size = 50;
  /// Bisection stops once the bracketing interval is narrower than this.
  double refine_tol = 1e-4;
  /// Relative tolerance for reading fingerprints off computed minimizers.
  double pattern_tol = 1e-6;
  SolveOptions solve;
};

struct PathSegment {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  PatternFingerprint fingerprint;
};

struct PathResult {
  /// Log-spaced grid in increasing order, with the minimizers found there.
  std::vector<double> lambdas;
  std::vector<Vector> betas;
  std::vector<PatternFingerprint> fingerprints;
  /// Constant-fingerprint pieces in increasing lambda; neighbours differ.
  std::vector<PathSegment> segments;
  /// Strictly increasing.
  std::vector<double> breakpoints;
};

[[nodiscard]] PathResult solution_path(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda_min,
                                       double lambda_max, const PathOptions& options = {});

/// Fingerprint of a numerically computed minimizer.
[[nodiscard]] PatternFingerprint solution_fingerprint(const GaugeSpec& spec, const Vector& beta,
                                                      double rel_tol = 1e-6);

}  // namespace pgauge
