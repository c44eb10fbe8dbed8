#include "pgauge/errors.hpp"
#include "pgauge/solvers.hpp"

#include <cmath>
#include <tuple>

namespace pgauge {

PatternFingerprint solution_fingerprint(const GaugeSpec& spec, const Vector& beta, double rel_tol) {
  return active_set(spec, beta, rel_tol);
}

namespace {

struct PathSolver {
  const GaugeSpec& spec;
  const Matrix& x;
  const Vector& y;
  const PathOptions& opt;
  struct Change {
    double lambda;
    PatternFingerprint after;
  };
  std::vector<Change> changes;

  std::pair<PatternFingerprint, Vector> at(double lambda, const Vector& warm) const {
    SolveOptions so = opt.solve;
    so.init = warm;
    SolveResult r = solve_checked(spec, x, y, lambda, so);
    return {solution_fingerprint(spec, r.beta, opt.pattern_tol), r.beta};
  }

  // Locates every fingerprint change inside (lo, hi).
  void refine(double lo, const PatternFingerprint& f_lo, const Vector& b_lo, double hi,
              const PatternFingerprint& f_hi) {
    if (hi - lo <= opt.refine_tol) {
      changes.push_back({0.5 * (lo + hi), f_hi});
      return;
    }
    const double mid = 0.5 * (lo + hi);
    auto [f_mid, b_mid] = at(mid, b_lo);
    if (f_mid == f_lo) {
      refine(mid, f_mid, b_mid, hi, f_hi);
    } else if (f_mid == f_hi) {
      refine(lo, f_lo, b_lo, mid, f_mid);
    } else {
      refine(lo, f_lo, b_lo, mid, f_mid);
      refine(mid, f_mid, b_mid, hi, f_hi);
    }
  }
};

}  // namespace

PathResult solution_path(const GaugeSpec& spec, const Matrix& x, const Vector& y, double lambda_min,
                         double lambda_max, const PathOptions& options) {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min) || !std::isfinite(lambda_max)) {
    throw InvalidArgument("path needs 0 < lambda_min < lambda_max");
  }
  if (options.grid_size < 2) throw InvalidArgument("path grid needs at least two points");
  if (!(options.refine_tol > 0.0)) throw InvalidArgument("refine tolerance must be positive");

  PathResult out;
  PathSolver ps{spec, x, y, options, {}};
  const auto n = static_cast<std::size_t>(options.grid_size);
  const double log_lo = std::log(lambda_min);
  const double step = (std::log(lambda_max) - log_lo) / static_cast<double>(n - 1);
  out.lambdas.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.lambdas[i] = std::exp(log_lo + step * static_cast<double>(i));
  out.lambdas.front() = lambda_min;
  out.lambdas.back() = lambda_max;
  out.fingerprints.resize(n);
  out.betas.resize(n);
  // Solve from the largest lambda down so that warm starts move away from zero.
  Vector warm = Vector::Zero(spec.dim());
  for (std::size_t i = n; i-- > 0;) {
    std::tie(out.fingerprints[i], out.betas[i]) = ps.at(out.lambdas[i], warm);
    warm = out.betas[i];
  }

  for (std::size_t i = 0; i + 1 < out.lambdas.size(); ++i) {
    if (out.fingerprints[i] == out.fingerprints[i + 1]) continue;
    ps.refine(out.lambdas[i], out.fingerprints[i], out.betas[i], out.lambdas[i + 1], out.fingerprints[i + 1]);
  }
  // Bisection changes arrive in increasing lambda; merge those that return to
  // the current fingerprint.
  double lo = lambda_min;
  PatternFingerprint current = out.fingerprints.front();
  for (auto& c : ps.changes) {
    if (c.after == current) continue;
    out.segments.push_back({lo, c.lambda, current});
    out.breakpoints.push_back(c.lambda);
    lo = c.lambda;
    current = std::move(c.after);
  }
  out.segments.push_back({lo, lambda_max, current});
  return out;
}

}  // namespace pgauge
