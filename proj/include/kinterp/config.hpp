#pragma once

#include <optional>

#include <json.hpp>

#include "kinterp/stability.hpp"

namespace kinterp {

using json = nlohmann::ordered_json;

// Exponents serialize as numbers, with "inf" as a string (JSON has no infinity).
inline json exponent_to_json(double p) {
  if (is_inf(p)) return json("inf");
  return json(p);
}

inline double exponent_from_json(const json& j, const char* what) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return inf_exponent;
    throw std::invalid_argument(std::string(what) + ": unrecognized exponent string '" + s + "'");
  }
  if (j.is_number()) {
    const double p = j.get<double>();
    require_exponent(p);
    return p;
  }
  throw std::invalid_argument(std::string(what) + ": exponent must be a number or \"inf\"");
}

inline json finite_or_string(double v) {
  if (std::isfinite(v)) return json(v);
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json("nan");
}

// ---- function specs ------------------------------------------------------

inline json function_to_json(const QuasiConcaveFn& f) {
  json j;
  if (const auto* pl = f.as_power_log()) {
    j["kind"] = "power_log";
    j["theta"] = pl->theta;
    j["a"] = pl->a;
    j["b"] = pl->b;
  } else if (const auto* tb = f.as_table()) {
    j["kind"] = "table";
    json pts = json::array();
    for (size_t i = 0; i < tb->log_t.size(); ++i)
      pts.push_back({std::exp(tb->log_t[i]), std::exp(tb->log_phi[i])});
    j["points"] = std::move(pts);
  } else if (const auto* cp = f.as_composite()) {
    j["kind"] = "composite";
    j["phi"] = function_to_json(*cp->phi);
    j["phi0"] = function_to_json(*cp->phi0);
    j["phi1"] = function_to_json(*cp->phi1);
  }
  return j;
}

// Builds the representation without quasi-concavity checks so that failing
// functions can still be loaded and verified.
inline QuasiConcaveFn function_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument("function spec: expected object with \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power_log") {
    return QuasiConcaveFn::power_log_unchecked(j.at("theta").get<double>(),
                                               j.value("a", 0.0), j.value("b", 0.0));
  }
  if (kind == "table") {
    std::vector<std::array<double, 2>> pts;
    for (const auto& e : j.at("points")) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("table spec: points must be [t, phi] pairs");
      pts.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return QuasiConcaveFn::table_unchecked(std::move(pts));
  }
  if (kind == "composite") {
    return compose_parameter(function_from_json(j.at("phi")), function_from_json(j.at("phi0")),
                             function_from_json(j.at("phi1")));
  }
  throw std::invalid_argument("function spec: unknown kind '" + kind + "'");
}

// ---- experiment configuration --------------------------------------------

struct ExperimentConfig {
  std::optional<QuasiConcaveFn> phi, phi0, phi1;
  double rho = 2.0;
  double window_t_min = 1e-10;
  double window_t_max = 1e10;
  double p = 1.0;
  double q = 1.0;
  double q0 = 1.0;
  double q1 = inf_exponent;
  int samples = 100;
  std::uint64_t seed = 1;
  std::string orientation = "ratio10";  // ratio10 = phi1/phi0
  std::string out_dir = "out";
  std::string engine = "min_formula";
  int grid_points = 32;
  int schedule_windows = 3;
  double eps_deg = 1e-3;
  double drift_threshold = 0.10;

  // optional explicit objects
  std::optional<json> couple_spec;
  std::optional<json> vector_spec;
  std::optional<json> step_spec;

  Window window() const { return Window(window_t_min, window_t_max); }
  RatioOrientation ratio_orientation() const {
    if (orientation == "ratio10") return RatioOrientation::Phi1OverPhi0;
    if (orientation == "ratio01") return RatioOrientation::Phi0OverPhi1;
    throw std::invalid_argument("orientation must be ratio10 or ratio01");
  }
  Triple triple() const {
    if (!phi || !phi0 || !phi1)
      throw std::invalid_argument("config: this command needs phi, phi0 and phi1");
    return Triple{*phi, *phi0, *phi1};
  }
};

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  if (j.contains("phi")) c.phi = function_from_json(j.at("phi"));
  if (j.contains("phi0")) c.phi0 = function_from_json(j.at("phi0"));
  if (j.contains("phi1")) c.phi1 = function_from_json(j.at("phi1"));
  c.rho = j.value("rho", c.rho);
  if (j.contains("window")) {
    const auto& w = j.at("window");
    if (!w.is_array() || w.size() != 2)
      throw std::invalid_argument("config: window must be [t_min, t_max]");
    c.window_t_min = w[0].get<double>();
    c.window_t_max = w[1].get<double>();
  }
  if (j.contains("p")) c.p = exponent_from_json(j.at("p"), "p");
  if (j.contains("q")) c.q = exponent_from_json(j.at("q"), "q");
  if (j.contains("q0")) c.q0 = exponent_from_json(j.at("q0"), "q0");
  if (j.contains("q1")) c.q1 = exponent_from_json(j.at("q1"), "q1");
  c.samples = j.value("samples", c.samples);
  c.seed = j.value("seed", c.seed);
  c.orientation = j.value("orientation", c.orientation);
  c.out_dir = j.value("out", c.out_dir);
  c.engine = j.value("engine", c.engine);
  c.grid_points = j.value("grid_points", c.grid_points);
  c.schedule_windows = j.value("schedule_windows", c.schedule_windows);
  c.eps_deg = j.value("eps_deg", c.eps_deg);
  c.drift_threshold = j.value("drift_threshold", c.drift_threshold);
  if (j.contains("couple")) c.couple_spec = j.at("couple");
  if (j.contains("vector")) c.vector_spec = j.at("vector");
  if (j.contains("step")) c.step_spec = j.at("step");
  return c;
}

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  if (c.phi) j["phi"] = function_to_json(*c.phi);
  if (c.phi0) j["phi0"] = function_to_json(*c.phi0);
  if (c.phi1) j["phi1"] = function_to_json(*c.phi1);
  j["rho"] = c.rho;
  j["window"] = {c.window_t_min, c.window_t_max};
  j["p"] = exponent_to_json(c.p);
  j["q"] = exponent_to_json(c.q);
  j["q0"] = exponent_to_json(c.q0);
  j["q1"] = exponent_to_json(c.q1);
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["orientation"] = c.orientation;
  j["out"] = c.out_dir;
  j["engine"] = c.engine;
  j["grid_points"] = c.grid_points;
  j["schedule_windows"] = c.schedule_windows;
  j["eps_deg"] = c.eps_deg;
  j["drift_threshold"] = c.drift_threshold;
  if (c.couple_spec) j["couple"] = *c.couple_spec;
  if (c.vector_spec) j["vector"] = *c.vector_spec;
  if (c.step_spec) j["step"] = *c.step_spec;
  return j;
}

// ---- couples, vectors, step functions ------------------------------------

inline WeightedSeqCouple couple_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("couple: expected object");
  const double q = j.contains("q") ? exponent_from_json(j.at("q"), "couple.q") : 1.0;
  const int first = j.value("first_index", 0);
  auto v = j.at("v").get<std::vector<double>>();
  auto w = j.at("w").get<std::vector<double>>();
  return WeightedSeqCouple(q, first, std::move(v), std::move(w));
}

inline SeqVector vector_from_json(const json& j) {
  if (!j.is_object() || !j.contains("entries"))
    throw std::invalid_argument("vector: expected object with \"entries\"");
  std::vector<std::pair<int, double>> entries;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("vector: entries must be [index, value] pairs");
    entries.emplace_back(e[0].get<int>(), e[1].get<double>());
  }
  return SeqVector(std::move(entries));
}

inline StepFunction step_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("step: expected object");
  return StepFunction(j.at("breakpoints").get<std::vector<double>>(),
                      j.at("levels").get<std::vector<double>>());
}

// ---- report fragments ------------------------------------------------------

inline json verification_to_json(const VerificationReport& rep) {
  json j;
  j["passed"] = rep.passed();
  json obs = json::object();
  for (const auto& [k, v] : rep.observations) obs[k] = finite_or_string(v);
  j["observations"] = std::move(obs);
  json viols = json::array();
  for (const auto& v : rep.violations) {
    viols.push_back({{"check", v.check},
                     {"index", v.index},
                     {"lhs", finite_or_string(v.lhs)},
                     {"rhs", finite_or_string(v.rhs)},
                     {"slack", finite_or_string(v.slack)}});
  }
  j["violations"] = std::move(viols);
  return j;
}

inline json norm_report_to_json(const NormReport& rep) {
  json j;
  j["value"] = rep.value;
  j["window"] = {rep.k_min, rep.k_max};
  j["tail_estimate"] = rep.tail_estimate;
  return j;
}

inline json sequence_to_json(const DiscretizingSequence& seq) {
  json j;
  j["rho"] = seq.rho;
  j["k_min"] = seq.k_min;
  j["k_max"] = seq.k_max();
  json pts = json::array();
  for (int k = seq.k_min; k <= seq.k_max(); ++k) {
    json row;
    row["k"] = k;
    row["t"] = seq.t(k);
    row["phi_t"] = std::exp(seq.source.log_eval(seq.log_t(k)));
    if (k < seq.k_max()) row["zone"] = zone_name(seq.zone(k));
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  return j;
}

inline json profile_to_json(const CardinalityProfile& p) {
  json j;
  j["n_min"] = p.n_min;
  j["counts"] = p.counts;
  j["max_cardinality"] = p.max_count;
  j["unassigned"] = p.unassigned;
  j["ratio_log_span"] = p.ratio_log_span;
  j["degenerate_ratio"] = p.degenerate_ratio;
  return j;
}

inline json ratio_stats_to_json(const RatioStats& s) {
  return json{{"min", s.min}, {"max", s.max}, {"median", s.median}};
}

inline json equivalence_to_json(const EquivalenceReport& r) {
  json j;
  j["samples_used"] = r.samples_used;
  j["samples_skipped"] = r.samples_skipped;
  j["side_ratio"] = ratio_stats_to_json(r.side_ratio);
  j["side0_vs_rhs"] = ratio_stats_to_json(r.side0_vs_rhs);
  j["side1_vs_rhs"] = ratio_stats_to_json(r.side1_vs_rhs);
  j["profile"] = profile_to_json(r.profile);
  return j;
}

inline json divergence_table_to_json(std::span<const DivergenceRow> rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"t_min", r.t_min},
                   {"t_max", r.t_max},
                   {"worst_ratio", r.worst_ratio},
                   {"max_cardinality", r.max_cardinality},
                   {"witness_octave", r.witness_octave}});
  return arr;
}

}  // namespace kinterp
