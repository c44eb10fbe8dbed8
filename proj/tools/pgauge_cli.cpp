#include "pgauge/conditions.hpp"
#include "pgauge/csv.hpp"
#include "pgauge/errors.hpp"
#include "pgauge/experiment.hpp"
#include "pgauge/gauge.hpp"
#include "pgauge/report_json.hpp"
#include "pgauge/solvers.hpp"
#include "pgauge/threshold.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace pgauge;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> restart;
  std::string out;
  std::string config;
};

struct PenaltyArgs {
  std::string penalty = "l1";
  std::string weights;
  std::string dmatrix;
  std::string generators;
};

void add_penalty_options(CLI::App* cmd, PenaltyArgs& a) {
  cmd->add_option("--penalty", a.penalty, "l1 | slope | sup | tv | tf | genlasso | custom")
      ->check(CLI::IsMember({"l1", "slope", "sup", "tv", "tf", "genlasso", "custom"}));
  cmd->add_option("--weights", a.weights, "SLOPE weights (vector CSV)");
  cmd->add_option("--dmatrix", a.dmatrix, "difference matrix for genlasso (matrix CSV)");
  cmd->add_option("--generators", a.generators, "generator rows for custom (matrix CSV, first row zero)");
}

GaugeSpec make_spec(const PenaltyArgs& a, Index p) {
  if (a.penalty == "l1") return GaugeSpec::l1(p);
  if (a.penalty == "sup") return GaugeSpec::sup_norm(p);
  if (a.penalty == "tv") return GaugeSpec::total_variation(p);
  if (a.penalty == "tf") return GaugeSpec::trend_filtering(p);
  if (a.penalty == "slope") {
    if (a.weights.empty()) throw InvalidArgument("--penalty slope needs --weights");
    return GaugeSpec::slope(csv::read_vector(fs::path(a.weights)));
  }
  if (a.penalty == "genlasso") {
    if (a.dmatrix.empty()) throw InvalidArgument("--penalty genlasso needs --dmatrix");
    return GaugeSpec::gen_lasso(csv::read_matrix(fs::path(a.dmatrix)));
  }
  if (a.generators.empty()) throw InvalidArgument("--penalty custom needs --generators");
  return GaugeSpec::custom(csv::read_matrix(fs::path(a.generators)));
}

fs::path out_dir(const Globals& g) {
  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  fs::create_directories(dir);
  return dir;
}

void emit(const Globals& g, const nlohmann::json& j, const std::string& file) {
  std::cout << j.dump(2) << '\n';
  if (!g.out.empty()) {
    std::ofstream f(out_dir(g) / file);
    f << j.dump(2) << '\n';
  }
}

SolveOptions solve_options(const Globals& g) {
  SolveOptions so;
  if (g.tol) so.tol = *g.tol;
  if (g.max_iter) so.max_iter = *g.max_iter;
  if (g.restart) so.restart_period = *g.restart;
  return so;
}

ExperimentConfig experiment_config(const Globals& g, const std::vector<std::string>& sets) {
  ExperimentConfig c;
  if (!g.config.empty()) c = load_config(g.config);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("--set expects key=value, got " + s);
    apply_config_entry(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (g.seed) c.seed = *g.seed;
  if (g.tol) c.tol = *g.tol;
  c.validate();
  return c;
}

Vector round_significant(const Vector& v, int digits = 12) {
  Vector r(v.size());
  for (Index j = 0; j < v.size(); ++j) {
    if (v(j) == 0.0 || !std::isfinite(v(j))) {
      r(j) = v(j);
      continue;
    }
    const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(v(j))))));
    r(j) = std::round(v(j) * scale) / scale;
  }
  return r;
}

template <class F>
void write_file(const fs::path& path, F&& body) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  body(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized least squares with polyhedral gauges: solver, pattern calculus and condition checks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed for experiments and sampled checks");
  app.add_option("--tol", g.tol, "KKT tolerance of the solvers");
  app.add_option("--max-iter", g.max_iter, "solver iteration limit")->check(CLI::PositiveNumber);
  app.add_option("--restart", g.restart, "momentum restart period (0 = adaptive only)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "directory for output files");
  app.add_option("--config", g.config, "key = value experiment configuration file")->check(CLI::ExistingFile);

  std::string x_path;
  std::string y_path;
  std::string beta_path;
  PenaltyArgs pen;

  // solve
  double lambda = 1.0;
  std::string init_path;
  auto* solve_cmd = app.add_subcommand("solve", "minimize 1/2||y - Xb||^2 + lambda pen(b)");
  solve_cmd->add_option("--x", x_path, "design (matrix CSV)")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--y", y_path, "response (vector CSV)")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--lambda", lambda, "penalty level")->required();
  solve_cmd->add_option("--init", init_path, "starting point (vector CSV)")->check(CLI::ExistingFile);
  add_penalty_options(solve_cmd, pen);

  // path
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Index grid = 50;
  auto* path_cmd = app.add_subcommand("path", "solution path with pattern breakpoints");
  path_cmd->add_option("--x", x_path, "design (matrix CSV)")->required()->check(CLI::ExistingFile);
  path_cmd->add_option("--y", y_path, "response (vector CSV)")->required()->check(CLI::ExistingFile);
  path_cmd->add_option("--lambda-min", lambda_min, "smallest lambda")->required();
  path_cmd->add_option("--lambda-max", lambda_max, "largest lambda")->required();
  path_cmd->add_option("--grid", grid, "log-spaced grid size");
  add_penalty_options(path_cmd, pen);

  // pattern
  auto* pattern_cmd = app.add_subcommand("pattern", "pattern, fingerprint and complexity of a vector");
  pattern_cmd->add_option("--beta", beta_path, "coefficients (vector CSV)")->required()->check(CLI::ExistingFile);
  add_penalty_options(pattern_cmd, pen);

  // check-access
  auto* access_cmd = app.add_subcommand("check-access", "accessibility of the pattern of beta");
  access_cmd->add_option("--x", x_path, "design (matrix CSV)")->required()->check(CLI::ExistingFile);
  access_cmd->add_option("--beta", beta_path, "coefficients (vector CSV)")->required()->check(CLI::ExistingFile);
  add_penalty_options(access_cmd, pen);

  // check-nrc
  std::string method = "geometric";
  double path_lo = 1e-3;
  double path_hi = 0.0;
  auto* nrc_cmd = app.add_subcommand("check-nrc", "noiseless recovery condition");
  nrc_cmd->add_option("--x", x_path, "design (matrix CSV)")->required()->check(CLI::ExistingFile);
  nrc_cmd->add_option("--beta", beta_path, "coefficients (vector CSV)")->required()->check(CLI::ExistingFile);
  nrc_cmd->add_option("--method", method, "geometric | analytic | path")
      ->check(CLI::IsMember({"geometric", "analytic", "path"}));
  nrc_cmd->add_option("--lambda-min", path_lo, "path method: smallest grid lambda");
  nrc_cmd->add_option("--lambda-max", path_hi, "path method: largest grid lambda (default ||X'X beta|| dual)");
  nrc_cmd->add_option("--grid", grid, "path method: grid size");
  add_penalty_options(nrc_cmd, pen);

  // check-unique
  auto* unique_cmd = app.add_subcommand("check-unique", "uniform uniqueness of the minimizer");
  unique_cmd->add_option("--x", x_path, "design (matrix CSV)")->required()->check(CLI::ExistingFile);
  add_penalty_options(unique_cmd, pen);

  // threshold
  double tau = 0.0;
  std::string thr_penalty = "l1";
  auto* thr_cmd = app.add_subcommand("threshold", "tau-thresholded estimate of a vector");
  thr_cmd->add_option("--penalty", thr_penalty, "l1 | sup")->check(CLI::IsMember({"l1", "sup"}));
  thr_cmd->add_option("--tau", tau, "threshold")->required();
  thr_cmd->add_option("--beta", beta_path, "estimate (vector CSV); stdin when absent");

  // experiment
  std::vector<std::string> sets;
  auto* exp_cmd = app.add_subcommand("experiment", "Monte-Carlo experiments");
  exp_cmd->require_subcommand(1);
  auto* fig5_cmd = exp_cmd->add_subcommand("fig5", "accessibility / recovery-condition probabilities versus k");
  auto* fig6_cmd = exp_cmd->add_subcommand("fig6", "raw versus thresholded pattern recovery with SURE tuning");
  for (auto* c : {fig5_cmd, fig6_cmd}) c->add_option("--set", sets, "override a config entry (key=value)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      const Matrix x = csv::read_matrix(fs::path(x_path));
      const Vector y = csv::read_vector(fs::path(y_path));
      const auto spec = make_spec(pen, x.cols());
      SolveOptions so = solve_options(g);
      if (!init_path.empty()) so.init = csv::read_vector(fs::path(init_path));
      const SolveResult r = solve(spec, x, y, lambda, so);
      nlohmann::json j = to_json(r);
      j["penalty"] = spec.describe();
      j["lambda"] = lambda;
      j["fingerprint"] = to_json(solution_fingerprint(spec, r.beta));
      if (!g.out.empty()) csv::write_vector(out_dir(g) / "beta.csv", r.beta);
      emit(g, j, "solve.json");
      return r.converged ? 0 : 3;
    }
    if (*path_cmd) {
      const Matrix x = csv::read_matrix(fs::path(x_path));
      const Vector y = csv::read_vector(fs::path(y_path));
      const auto spec = make_spec(pen, x.cols());
      PathOptions po;
      po.grid_size = grid;
      po.solve = solve_options(g);
      const PathResult r = solution_path(spec, x, y, lambda_min, lambda_max, po);
      nlohmann::json j = to_json(r);
      j["penalty"] = spec.describe();
      emit(g, j, "path.json");
      return 0;
    }
    if (*pattern_cmd) {
      const Vector b = csv::read_vector(fs::path(beta_path));
      const auto spec = make_spec(pen, b.size());
      nlohmann::json j;
      j["penalty"] = spec.describe();
      j["pen"] = pen_eval(spec, b);
      j["fingerprint"] = to_json(active_set(spec, b));
      j["complexity"] = complexity(spec, b);
      if (spec.has_named_pattern()) {
        const auto np = named_pattern(pattern_kind_for(spec), round_significant(b));
        j["pattern_kind"] = std::string(to_string(np.kind));
        j["pattern"] = np.values;
      }
      j["subgradient"] = json_vector(subgradient_element(spec, b));
      emit(g, j, "pattern.json");
      return 0;
    }
    if (*access_cmd) {
      const Matrix x = csv::read_matrix(fs::path(x_path));
      const Vector b = csv::read_vector(fs::path(beta_path));
      const auto spec = make_spec(pen, x.cols());
      emit(g, to_json(check_accessibility(spec, x, b)), "check_access.json");
      return 0;
    }
    if (*nrc_cmd) {
      const Matrix x = csv::read_matrix(fs::path(x_path));
      const Vector b = csv::read_vector(fs::path(beta_path));
      const auto spec = make_spec(pen, x.cols());
      ConditionReport r;
      if (method == "geometric") {
        r = check_nrc_geometric(spec, x, b);
      } else if (method == "analytic") {
        if (spec.kind() == GaugeKind::L1) {
          r = check_nrc_lasso(x, b);
        } else if (spec.kind() == GaugeKind::SupNorm) {
          r = check_nrc_sup(x, b);
        } else {
          throw InvalidArgument("analytic check exists for l1 and sup only");
        }
      } else {
        PathOptions po;
        po.solve = solve_options(g);
        const Vector xty = x.transpose() * (x * b);
        double hi = path_hi;
        if (!(hi > 0.0)) hi = 2.0 * std::max(1.0, xty.lpNorm<1>());
        r = check_nrc_path(spec, x, b, log_grid(path_lo, hi, grid), po);
      }
      emit(g, to_json(r), "check_nrc.json");
      return 0;
    }
    if (*unique_cmd) {
      const Matrix x = csv::read_matrix(fs::path(x_path));
      const auto spec = make_spec(pen, x.cols());
      nlohmann::json j = to_json(check_uniform_uniqueness(spec, x));
      const Matrix& u = spec.generators();
      for (auto& f : j["violating_faces"]) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& v : f["vertices"]) pts.push_back(json_vector(u.row(v.get<Index>()).transpose()));
        f["points"] = pts;
      }
      emit(g, j, "check_unique.json");
      return 0;
    }
    if (*thr_cmd) {
      const Vector b = beta_path.empty() ? csv::read_vector(std::cin) : csv::read_vector(fs::path(beta_path));
      VerifyOptions vo;
      if (g.seed) vo.seed = *g.seed;
      const ThresholdResult r = thr_penalty == "l1" ? threshold_lasso(b, tau, vo) : threshold_sup(b, tau, vo);
      if (g.out.empty()) {
        csv::write_vector(std::cout, r.output);
        std::cerr << to_json(r.diagnostics).dump() << '\n';
      } else {
        csv::write_vector(out_dir(g) / "thresholded.csv", r.output);
        emit(g, to_json(r), "threshold.json");
      }
      return 0;
    }
    if (*fig5_cmd) {
      const ExperimentConfig c = experiment_config(g, sets);
      const auto rows = run_accessibility_sweep(c);
      const fs::path dir = out_dir(g);
      write_file(dir / "fig5.csv", [&](std::ostream& o) { write_sweep_csv(o, rows); });
      nlohmann::json j;
      j["config"] = to_json(c);
      j["rows"] = nlohmann::json::array();
      for (const auto& r : rows) j["rows"].push_back(to_json(r));
      write_file(dir / "fig5.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
      write_sweep_csv(std::cout, rows);
      return 0;
    }
    if (*fig6_cmd) {
      const ExperimentConfig c = experiment_config(g, sets);
      const auto r = run_recovery_experiment(c);
      const fs::path dir = out_dir(g);
      write_file(dir / "fig6_scatter.csv", [&](std::ostream& o) { write_scatter_csv(o, r); });
      write_file(dir / "fig6_tau.csv", [&](std::ostream& o) { write_tau_csv(o, r); });
      nlohmann::json j = summary_json(r);
      j["config"] = to_json(c);
      write_file(dir / "fig6_summary.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
      j.erase("beta_hat");
      std::cout << j.dump(2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
