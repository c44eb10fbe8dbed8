#include "pgauge/report_json.hpp"

#include <cmath>

namespace pgauge {

nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json json_vector(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(json_number(v(i)));
  return out;
}

nlohmann::json to_json(const PatternFingerprint& f) {
  nlohmann::json j;
  j["active"] = f.active;
  j["virtual_indices"] = f.virtual_indices;
  j["pen"] = json_number(f.pen);
  if (f.named) {
    j["pattern_kind"] = std::string(to_string(f.named->kind));
    j["pattern"] = f.named->values;
  }
  return j;
}

nlohmann::json to_json(const Face& f) {
  return {{"vertices", f.vertices}, {"dimension", f.dimension}, {"codimension", f.codimension}};
}

nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json j;
  j["verdict"] = r.verdict;
  j["margin"] = json_number(r.margin);
  j["method"] = std::string(to_string(r.method));
  j["value"] = json_number(r.value);
  j["certificate"] = json_vector(r.certificate);
  j["certificate_norm"] = json_number(r.certificate_norm);
  nlohmann::json faces = nlohmann::json::array();
  for (const auto& f : r.violating_faces) faces.push_back(to_json(f));
  j["violating_faces"] = faces;
  j["notes"] = r.notes;
  return j;
}

nlohmann::json to_json(const SolveResult& r) {
  nlohmann::json j;
  j["beta"] = json_vector(r.beta);
  j["fitted"] = json_vector(r.fitted);
  j["certificate"] = json_vector(r.certificate);
  j["kkt_residual"] = json_number(r.kkt_residual);
  j["objective"] = json_number(r.objective);
  j["pen"] = json_number(r.pen);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["polished"] = r.polished;
  j["warnings"] = r.warnings;
  return j;
}

nlohmann::json to_json(const PathResult& r) {
  nlohmann::json j;
  j["breakpoints"] = r.breakpoints;
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : r.segments) {
    nlohmann::json e = to_json(s.fingerprint);
    e["lambda_lo"] = s.lambda_lo;
    e["lambda_hi"] = s.lambda_hi;
    segs.push_back(e);
  }
  j["segments"] = segs;
  j["grid"] = r.lambdas;
  return j;
}

nlohmann::json to_json(const ThresholdDiagnostics& d) {
  nlohmann::json j;
  j["condition1"] = d.condition1;
  j["condition1_gap"] = json_number(d.condition1_gap);
  j["condition2"] = d.condition2;
  j["condition3"] = d.condition3;
  j["condition3_sampled"] = d.condition3_sampled;
  j["probes"] = d.probes;
  j["candidate_dimension"] = d.candidate_dimension;
  j["max_probe_dimension"] = d.max_probe_dimension;
  j["counterexample"] = d.counterexample ? json_vector(*d.counterexample) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const ThresholdResult& r) {
  nlohmann::json j;
  j["input"] = json_vector(r.input);
  j["tau"] = r.tau;
  j["output"] = json_vector(r.output);
  j["diagnostics"] = to_json(r.diagnostics);
  if (r.fingerprint) j["fingerprint"] = to_json(*r.fingerprint);
  return j;
}

nlohmann::json to_json(const ResultRow& r) {
  return {{"k", r.k}, {"p_acc", r.p_acc}, {"p_nrc", r.p_nrc}, {"se", r.se}, {"reps", r.reps}, {"failures", r.failures}};
}

}  // namespace pgauge
