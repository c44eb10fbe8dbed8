#include "pgauge/experiment.hpp"

#include "pgauge/conditions.hpp"
#include "pgauge/errors.hpp"
#include "pgauge/rng.hpp"
#include "pgauge/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace pgauge {

namespace {

constexpr double kAccessTol = 1e-6;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw ParseError("config value for '" + key + "' is not a number: " + v);
  return out;
}

Index parse_index(const std::string& key, const std::string& v) {
  const auto x = parse_number<long long>(key, v);
  return static_cast<Index>(x);
}

// Runs body(i) for i in [0, count) on a pool of workers; the first exception
// is rethrown after every worker has stopped.
template <class Body>
void parallel_for(Index count, unsigned threads, Body body) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<Index>(threads, std::max<Index>(count, 1)));
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

Matrix draw_design(Rng& rng, Index n, Index p) {
  return rng.gaussian_matrix(n, p, 1.0 / std::sqrt(static_cast<double>(n)));
}

std::vector<double> vector_of(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void ExperimentConfig::validate() const {
  if (n <= 0 || p <= 0 || reps <= 0) throw InvalidArgument("n, p and reps must be positive");
  for (Index k : k_values)
    if (k < 0 || k >= p) throw InvalidArgument("every k must satisfy 0 <= k < p");
  if (lambda_count < 1) throw InvalidArgument("lambda_count must be positive");
  if (!(lambda_min_ratio > 0.0) || !(lambda_min_ratio < 1.0)) {
    throw InvalidArgument("lambda_min_ratio must lie in (0, 1)");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be finite and non-negative");
  if (cluster_values.size() != cluster_sizes.size()) {
    throw InvalidArgument("cluster_values and cluster_sizes differ in length");
  }
  Index total = 0;
  for (Index s : cluster_sizes) {
    if (s < 0) throw InvalidArgument("cluster sizes must be non-negative");
    total += s;
  }
  if (total != p) throw InvalidArgument("cluster sizes must add up to p");
  if (tau_count < 1) throw InvalidArgument("tau_count must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
}

std::vector<Index> ExperimentConfig::effective_k_values() const {
  if (!k_values.empty()) return k_values;
  std::vector<Index> out;
  for (Index k = 0; k < p; k += 5) out.push_back(k);
  return out;
}

Vector ExperimentConfig::beta_template() const {
  Vector b(p);
  Index pos = 0;
  for (std::size_t c = 0; c < cluster_sizes.size(); ++c) {
    b.segment(pos, cluster_sizes[c]).setConstant(cluster_values[c]);
    pos += cluster_sizes[c];
  }
  return b;
}

void apply_config_entry(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "n") {
    c.n = parse_index(key, value);
  } else if (key == "p") {
    c.p = parse_index(key, value);
  } else if (key == "reps") {
    c.reps = parse_index(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "k_values") {
    c.k_values.clear();
    for (const auto& item : split_list(value)) c.k_values.push_back(parse_index(key, item));
  } else if (key == "lambda_count") {
    c.lambda_count = parse_index(key, value);
  } else if (key == "lambda_min_ratio") {
    c.lambda_min_ratio = parse_number<double>(key, value);
  } else if (key == "sigma") {
    c.sigma = parse_number<double>(key, value);
  } else if (key == "cluster_values") {
    c.cluster_values.clear();
    for (const auto& item : split_list(value)) c.cluster_values.push_back(parse_number<double>(key, item));
  } else if (key == "cluster_sizes") {
    c.cluster_sizes.clear();
    for (const auto& item : split_list(value)) c.cluster_sizes.push_back(parse_index(key, item));
  } else if (key == "tau_count") {
    c.tau_count = parse_index(key, value);
  } else if (key == "tol") {
    c.tol = parse_number<double>(key, value);
  } else if (key == "threads") {
    c.threads = parse_number<unsigned>(key, value);
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(number) + " has no '='");
    apply_config_entry(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

std::vector<ResultRow> run_accessibility_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto ks = config.effective_k_values();
  for (Index k : ks)
    if (k >= config.p) throw InvalidArgument("every k must be below p");
  const auto nk = static_cast<Index>(ks.size());
  // 0 = false, 1 = true, -1 = failed
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> acc(config.reps, nk);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> nrc(config.reps, nk);

  parallel_for(config.reps, config.threads, [&](Index rep) {
    Rng rng(stream_seed(config.seed, static_cast<std::uint64_t>(rep)));
    const Matrix x = draw_design(rng, config.n, config.p);
    for (Index c = 0; c < nk; ++c) {
      const Index k = ks[static_cast<std::size_t>(c)];
      Vector beta = Vector::Zero(config.p);
      beta.head(config.p - k).setOnes();
      const Vector target = x.leftCols(config.p - k).rowwise().sum();
      try {
        acc(rep, c) = min_linf_representation(x, target) >= 1.0 - kAccessTol ? 1 : 0;
      } catch (const Error&) {
        acc(rep, c) = -1;
      }
      nrc(rep, c) = check_nrc_sup(x, beta).verdict ? 1 : 0;
    }
  });

  std::vector<ResultRow> rows;
  for (Index c = 0; c < nk; ++c) {
    ResultRow row;
    row.k = ks[static_cast<std::size_t>(c)];
    Index hits = 0;
    Index nrc_hits = 0;
    for (Index rep = 0; rep < config.reps; ++rep) {
      if (acc(rep, c) < 0) {
        ++row.failures;
        continue;
      }
      ++row.reps;
      hits += acc(rep, c);
      nrc_hits += nrc(rep, c);
    }
    if (row.reps > 0) {
      const auto m = static_cast<double>(row.reps);
      row.p_acc = static_cast<double>(hits) / m;
      row.p_nrc = static_cast<double>(nrc_hits) / m;
      row.se = std::sqrt(row.p_acc * (1.0 - row.p_acc) / m);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "k,p_acc,p_nrc,se,reps,failures\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.k << ',' << r.p_acc << ',' << r.p_nrc << ',' << r.se << ',' << r.reps << ',' << r.failures << '\n';
  }
}

double sure_criterion(const Matrix& x, const Vector& y, const Vector& beta, double tol) {
  const double top = beta.lpNorm<Eigen::Infinity>();
  Index card = 0;
  for (Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta(j)) < top * (1.0 - tol)) ++card;
  return 0.5 * (y - x * beta).squaredNorm() + static_cast<double>(card);
}

SureResult sure_select(const Matrix& x, const Vector& y, const std::vector<double>& lambdas,
                       const SolveOptions& options, double pattern_tol) {
  if (lambdas.empty()) throw InvalidArgument("SURE needs a nonempty lambda grid");
  const auto spec = GaugeSpec::sup_norm(x.cols());
  SureResult out;
  out.lambdas = lambdas;
  std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
  out.criteria.assign(out.lambdas.size(), std::numeric_limits<double>::quiet_NaN());
  out.criterion = std::numeric_limits<double>::infinity();
  Vector warm = Vector::Zero(x.cols());
  for (std::size_t i = 0; i < out.lambdas.size(); ++i) {
    SolveOptions so = options;
    so.init = warm;
    const SolveResult s = solve(spec, x, y, out.lambdas[i], so);
    if (!s.converged) {
      ++out.skipped;
      continue;
    }
    warm = s.beta;
    const double c = sure_criterion(x, y, s.beta, pattern_tol);
    out.criteria[i] = c;
    if (c < out.criterion) {
      out.criterion = c;
      out.lambda = out.lambdas[i];
      out.beta = s.beta;
    }
  }
  if (out.beta.size() == 0) throw NotConverged("no grid point of the SURE search converged");
  return out;
}

RecoveryReport run_recovery_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto spec = GaugeSpec::sup_norm(config.p);
  RecoveryReport r;
  Rng rng(stream_seed(config.seed, 0));
  r.x = draw_design(rng, config.n, config.p);
  r.beta = config.beta_template();
  const Vector noise = rng.gaussian_vector(config.n, config.sigma);
  r.y = r.x * r.beta + noise;

  if (r.beta.lpNorm<Eigen::Infinity>() > 0.0) {
    const Matrix xt = sup_reduced_design(r.x, r.beta);
    r.accessibility_value = min_linf_representation(r.x, xt.col(0));
    r.accessible = r.accessibility_value >= 1.0 - kAccessTol;
  } else {
    r.accessible = true;
  }
  const auto nrc = check_nrc_sup(r.x, r.beta);
  r.nrc = nrc.verdict;
  r.nrc_norm = nrc.certificate_norm;

  const double lambda_max = (r.x.transpose() * r.y).lpNorm<1>();
  if (!(lambda_max > 0.0)) throw InvalidArgument("response is orthogonal to every column; nothing to tune");
  SolveOptions so;
  so.tol = config.tol;
  r.sure = sure_select(r.x, r.y, log_grid(lambda_max * config.lambda_min_ratio, lambda_max, config.lambda_count), so);

  const PatternFingerprint target = active_set(spec, r.beta);
  r.raw_match = solution_fingerprint(spec, r.sure.beta) == target;
  const double top = r.sure.beta.lpNorm<Eigen::Infinity>();
  r.thresholded = r.sure.beta;
  for (Index i = 0; i < config.tau_count; ++i) {
    const double tau = top * static_cast<double>(i) / static_cast<double>(config.tau_count);
    const Vector thr = threshold_sup_values(r.sure.beta, tau);
    const bool match = active_set(spec, thr) == target;
    r.taus.push_back(tau);
    r.tau_match.push_back(match);
    if (match && !r.best_tau) {
      r.best_tau = tau;
      r.thresholded = thr;
    }
  }
  return r;
}

void write_scatter_csv(std::ostream& out, const RecoveryReport& r) {
  out << "j,beta,beta_hat,beta_thr\n";
  out << std::setprecision(17);
  for (Index j = 0; j < r.beta.size(); ++j) {
    out << j + 1 << ',' << r.beta(j) << ',' << r.sure.beta(j) << ',' << r.thresholded(j) << '\n';
  }
}

void write_tau_csv(std::ostream& out, const RecoveryReport& r) {
  out << "tau,match\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < r.taus.size(); ++i) out << r.taus[i] << ',' << (r.tau_match[i] ? 1 : 0) << '\n';
}

nlohmann::json summary_json(const RecoveryReport& r) {
  nlohmann::json j;
  j["lambda"] = r.sure.lambda;
  j["sure_criterion"] = r.sure.criterion;
  j["sure_skipped"] = r.sure.skipped;
  j["accessible"] = r.accessible;
  j["accessibility_value"] = r.accessibility_value;
  j["nrc"] = r.nrc;
  j["nrc_norm"] = r.nrc_norm;
  j["raw_match"] = r.raw_match;
  j["threshold_match"] = r.best_tau.has_value();
  j["best_tau"] = r.best_tau ? nlohmann::json(*r.best_tau) : nlohmann::json(nullptr);
  Index matches = 0;
  for (bool m : r.tau_match) matches += m ? 1 : 0;
  j["tau_matches"] = matches;
  j["tau_count"] = r.taus.size();
  j["beta_hat"] = vector_of(r.sure.beta);
  return j;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"n", c.n},
          {"p", c.p},
          {"reps", c.reps},
          {"seed", c.seed},
          {"k_values", c.effective_k_values()},
          {"lambda_count", c.lambda_count},
          {"lambda_min_ratio", c.lambda_min_ratio},
          {"sigma", c.sigma},
          {"cluster_values", c.cluster_values},
          {"cluster_sizes", c.cluster_sizes},
          {"tau_count", c.tau_count},
          {"tol", c.tol}};
}

}  // namespace pgauge
