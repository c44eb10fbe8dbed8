#include "pgauge/threshold.hpp"

#include "pgauge/errors.hpp"
#include "pgauge/rng.hpp"

#include <cmath>

namespace pgauge {

namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("threshold must be finite and non-negative");
}

ThresholdResult make_result(const GaugeSpec& spec, const Vector& beta, double tau, Vector output,
                            const VerifyOptions& options) {
  ThresholdResult r;
  r.input = beta;
  r.tau = tau;
  r.output = std::move(output);
  r.diagnostics = verify_thresholded(spec, r.input, r.output, tau, options);
  return r;
}

}  // namespace

Vector threshold_lasso_values(const Vector& beta, double tau) {
  check_tau(tau);
  Vector out = beta;
  for (Index j = 0; j < out.size(); ++j)
    if (std::abs(out(j)) <= tau) out(j) = 0.0;
  return out;
}

Vector threshold_sup_values(const Vector& beta, double tau) {
  check_tau(tau);
  const double top = beta.lpNorm<Eigen::Infinity>();
  if (top <= tau) return Vector::Zero(beta.size());
  Vector out = beta;
  for (Index j = 0; j < out.size(); ++j) {
    const double b = beta(j);
    if (b >= top - 2.0 * tau && b >= 0.0) {
      out(j) = top - tau;
    } else if (b <= -top + 2.0 * tau && b < 0.0) {
      out(j) = -top + tau;
    }
  }
  return out;
}

ThresholdResult threshold_lasso(const Vector& beta, double tau, const VerifyOptions& options) {
  return make_result(GaugeSpec::l1(beta.size()), beta, tau, threshold_lasso_values(beta, tau), options);
}

ThresholdResult threshold_sup(const Vector& beta, double tau, const VerifyOptions& options) {
  return make_result(GaugeSpec::sup_norm(beta.size()), beta, tau, threshold_sup_values(beta, tau), options);
}

Index subdifferential_dimension(const GaugeSpec& spec, const Vector& b) {
  if (spec.has_named_pattern()) return spec.dim() - complexity_closed_form(spec, b);
  return spec.dim() - complexity(spec, b);
}

ThresholdDiagnostics verify_thresholded(const GaugeSpec& spec, const Vector& beta_hat, const Vector& candidate,
                                        double tau, const VerifyOptions& options) {
  check_tau(tau);
  const Index p = spec.dim();
  if (beta_hat.size() != p || candidate.size() != p) {
    throw DimensionMismatch("thresholded vectors do not match gauge dimension");
  }
  ThresholdDiagnostics d;
  d.condition1_gap = (beta_hat - candidate).lpNorm<Eigen::Infinity>() - tau;
  d.condition1 = d.condition1_gap <= 1e-12 * std::max(1.0, beta_hat.lpNorm<Eigen::Infinity>());
  d.condition2 = subdifferential_contains(spec, candidate, beta_hat);
  d.candidate_dimension = subdifferential_dimension(spec, candidate);

  auto probe = [&](const Vector& b) {
    ++d.probes;
    const Index dim = subdifferential_dimension(spec, b);
    if (dim > d.max_probe_dimension) d.max_probe_dimension = dim;
    if (dim > d.candidate_dimension && !d.counterexample) d.counterexample = b;
  };
  probe(beta_hat);
  if (tau > 0.0) {
    // Low-complexity points have measure zero, so the ball is also probed at
    // the two structured thresholds of beta_hat; both lie inside it.
    probe(threshold_lasso_values(beta_hat, tau));
    probe(threshold_sup_values(beta_hat, tau));
    for (Index j = 0; j < p; ++j) {
      for (double s : {-1.0, 1.0}) {
        Vector b = beta_hat;
        b(j) += s * tau;
        probe(b);
      }
    }
    if (p <= options.corner_limit) {
      for (Index mask = 0; mask < (Index{1} << p); ++mask) {
        Vector b = beta_hat;
        for (Index j = 0; j < p; ++j) b(j) += ((mask >> j) & 1) ? tau : -tau;
        probe(b);
      }
    }
    Rng rng(options.seed);
    for (Index s = 0; s < options.samples; ++s) {
      Vector b(p);
      for (Index j = 0; j < p; ++j) b(j) = beta_hat(j) + rng.uniform(-tau, tau);
      probe(b);
    }
  }
  d.condition3 = !d.counterexample.has_value();
  return d;
}

ThresholdResult recover_with_threshold(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda,
                                       double tau, const SolveOptions& solve_options,
                                       const VerifyOptions& verify_options) {
  check_tau(tau);
  if (spec.kind() != GaugeKind::L1 && spec.kind() != GaugeKind::SupNorm) {
    throw InvalidArgument("thresholded recovery is available for the l1 and sup-norm gauges only");
  }
  const SolveResult s = solve_checked(spec, x, y, lambda, solve_options);
  const Vector out =
      spec.kind() == GaugeKind::L1 ? threshold_lasso_values(s.beta, tau) : threshold_sup_values(s.beta, tau);
  ThresholdResult r = make_result(spec, s.beta, tau, out, verify_options);
  r.fingerprint = active_set(spec, r.output);
  return r;
}

}  // namespace pgauge
