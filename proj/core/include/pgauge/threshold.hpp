#pragma once

#include "pgauge/gauge.hpp"
#include "pgauge/solvers.hpp"

#include <cstdint>
#include <optional>

namespace pgauge {

/// Checks of the three defining conditions of a tau-thresholded estimator.
struct ThresholdDiagnostics {
  /// ||beta_hat - candidate||_inf - tau; condition 1 holds when <= 0.
  double condition1_gap = 0.0;
  bool condition1 = false;
  /// Subdifferential at beta_hat contained in the one at the candidate.
  bool condition2 = false;
  /// No probed point of the tau-ball has a larger subdifferential dimension.
  /// Always a sampled verdict.
  bool condition3 = false;
  bool condition3_sampled = true;
  Index probes = 0;
  Index candidate_dimension = 0;
  Index max_probe_dimension = 0;
  /// A probe that beat the candidate, when condition 3 failed.
  std::optional<Vector> counterexample;

  [[nodiscard]] bool all() const { return condition1 && condition2 && condition3; }
};

struct VerifyOptions {
  Index samples = 2000;
  std::uint64_t seed = 0;
  /// All 2^p corners of the ball are probed up to this dimension.
  Index corner_limit = 10;
};

struct ThresholdResult {
  Vector input;
  double tau = 0.0;
  Vector output;
  ThresholdDiagnostics diagnostics;
  /// Set by recover_with_threshold.
  std::optional<PatternFingerprint> fingerprint;
};

/// Sets components with |beta_j| <= tau to zero.
[[nodiscard]] Vector threshold_lasso_values(const Vector& beta, double tau);

/// Sup-norm thresholding: zero when ||beta||_inf <= tau, otherwise components
/// within 2 tau of +-||beta||_inf are moved to +-(||beta||_inf - tau).
[[nodiscard]] Vector threshold_sup_values(const Vector& beta, double tau);

/// Thresholds and verifies against the l1 gauge.
[[nodiscard]] ThresholdResult threshold_lasso(const Vector& beta, double tau, const VerifyOptions& options = {});

/// Thresholds and verifies against the sup-norm gauge.
[[nodiscard]] ThresholdResult threshold_sup(const Vector& beta, double tau, const VerifyOptions& options = {});

/// Dimension of the subdifferential of pen at b.
[[nodiscard]] Index subdifferential_dimension(const GaugeSpec& spec, const Vector& b);

/// Conditions 1 and 2 exactly; condition 3 on uniform samples of the tau-ball
/// around beta_hat, the axis probes beta_hat +- tau e_j, the lasso and sup-norm
/// thresholds of beta_hat and, for small p, the corners.
[[nodiscard]] ThresholdDiagnostics verify_thresholded(const GaugeSpec& spec, const Vector& beta_hat,
                                                      const Vector& candidate, double tau,
                                                      const VerifyOptions& options = {});

/// Solves the penalized problem and applies the thresholder matching the
/// gauge (L1 or SupNorm; other kinds throw InvalidArgument).
[[nodiscard]] ThresholdResult recover_with_threshold(const GaugeSpec& spec, const Matrix& x, const Vector& y,
                                                     double lambda, double tau, const SolveOptions& solve_options = {},
                                                     const VerifyOptions& verify_options = {});

}  // namespace pgauge
