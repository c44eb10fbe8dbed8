#pragma once

#include "pgauge/gauge.hpp"
#include "pgauge/solvers.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pgauge {

/// Monte-Carlo setup for the sup-norm experiments. Designs have iid
/// N(0, 1/n) entries.
struct ExperimentConfig {
  Index n = 40;
  Index p = 60;
  Index reps = 200;
  std::uint64_t seed = 1;
  /// Numbers of non-maximal components swept by the accessibility study;
  /// empty means 0, 5, 10, ... below p.
  std::vector<Index> k_values;
  Index lambda_count = 50;
  /// Smallest grid lambda as a fraction of the zero threshold ||X'y||_1.
  double lambda_min_ratio = 1e-3;
  double sigma = 1.0;
  /// Coefficient template: cluster_sizes[i] copies of cluster_values[i].
  std::vector<double> cluster_values{20.0, -20.0, 0.0};
  std::vector<Index> cluster_sizes{24, 24, 12};
  Index tau_count = 60;
  double tol = 1e-7;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
  [[nodiscard]] std::vector<Index> effective_k_values() const;
  [[nodiscard]] Vector beta_template() const;
};

/// Reads `key = value` lines ('#' starts a comment, lists are comma separated)
/// on top of `base`. Throws ParseError on unknown keys or malformed values.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
[[nodiscard]] ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
/// Applies a single `key=value` assignment.
void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value);

struct ResultRow {
  Index k = 0;
  double p_acc = 0.0;
  double p_nrc = 0.0;
  /// Replications that produced a verdict.
  Index reps = 0;
  /// Replications whose LP failed; excluded from the denominators.
  Index failures = 0;
  /// Binomial standard error of p_acc.
  double se = 0.0;
};

/// For every k: the share of designs for which the pattern with p - k maximal
/// components (all positive) is accessible, min{||g||_inf : X g = X~_1} = 1
/// within 1e-6, and satisfies the sup-norm noiseless recovery condition.
/// Replication r uses the stream stream_seed(seed, r); results do not depend
/// on the number of threads.
[[nodiscard]] std::vector<ResultRow> run_accessibility_sweep(const ExperimentConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// 1/2 ||y - X b||^2 + #{j : |b_j| < ||b||_inf}, with ties read at relative tolerance `tol`.
[[nodiscard]] double sure_criterion(const Matrix& x, const Vector& y, const Vector& beta, double tol = 1e-6);

struct SureResult {
  double lambda = 0.0;
  double criterion = 0.0;
  Vector beta;
  /// Grid in decreasing order and the criterion there (NaN where the solve failed).
  std::vector<double> lambdas;
  std::vector<double> criteria;
  Index skipped = 0;
};

/// Sup-norm SURE tuning over a grid; ties go to the larger lambda and grid
/// points whose solve fails are skipped. Throws NotConverged when every solve fails.
[[nodiscard]] SureResult sure_select(const Matrix& x, const Vector& y, const std::vector<double>& lambdas,
                                     const SolveOptions& options = {}, double pattern_tol = 1e-6);

struct RecoveryReport {
  Matrix x;
  Vector beta;
  Vector y;
  SureResult sure;
  bool accessible = false;
  double accessibility_value = 0.0;
  bool nrc = false;
  double nrc_norm = 0.0;
  bool raw_match = false;
  std::vector<double> taus;
  std::vector<bool> tau_match;
  /// Smallest tau in the sweep whose thresholded estimate has the pattern of beta.
  std::optional<double> best_tau;
  Vector thresholded;
};

/// One design, one noise draw, SURE-tuned sup-norm estimate, and the pattern
/// match of the raw and thresholded estimates over a tau sweep.
[[nodiscard]] RecoveryReport run_recovery_experiment(const ExperimentConfig& config);

/// Columns j, beta_j, betahat_j, betathr_j (thresholded at best_tau, or raw when none).
void write_scatter_csv(std::ostream& out, const RecoveryReport& report);
/// Columns tau, match.
void write_tau_csv(std::ostream& out, const RecoveryReport& report);
[[nodiscard]] nlohmann::json summary_json(const RecoveryReport& report);
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace pgauge
