// Command line front end: each subcommand reads a JSON config (plus flag
// overrides), runs one experiment and writes a deterministic report into the
// output directory. Exit codes: 0 pass, 1 property violation, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kinterp/config.hpp"
#include "kinterp/kfunc.hpp"

namespace fs = std::filesystem;
using namespace kinterp;

namespace {

struct FlagOverrides {
  std::string config_path;
  std::string window;  // "TMIN:TMAX"
  std::optional<double> rho;
  std::string p, q;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string orientation;
};

void add_common_flags(CLI::App* cmd, FlagOverrides& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--window", f.window, "window as TMIN:TMAX");
  cmd->add_option("--rho", f.rho, "separation factor (> 1)");
  cmd->add_option("--p", f.p, "outer exponent, number or 'inf'");
  cmd->add_option("--q", f.q, "couple exponent, number or 'inf'");
  cmd->add_option("--samples", f.samples, "random sample count");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--orientation", f.orientation, "ratio orientation: ratio10 or ratio01")
      ->check(CLI::IsMember({"ratio10", "ratio01"}));
}

ExperimentConfig resolve_config(const FlagOverrides& f) {
  json j = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + f.config_path);
    j = json::parse(in);  // parse_error carries byte/line diagnostics
  }
  ExperimentConfig c = config_from_json(j);
  if (!f.window.empty()) {
    const auto colon = f.window.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--window expects TMIN:TMAX");
    c.window_t_min = std::stod(f.window.substr(0, colon));
    c.window_t_max = std::stod(f.window.substr(colon + 1));
  }
  if (f.rho) c.rho = *f.rho;
  if (!f.p.empty()) c.p = exponent_from_json(json(f.p == "inf" ? json("inf") : json(std::stod(f.p))), "p");
  if (!f.q.empty()) c.q = exponent_from_json(json(f.q == "inf" ? json("inf") : json(std::stod(f.q))), "q");
  if (f.samples) c.samples = *f.samples;
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out_dir = f.out;
  if (!f.orientation.empty()) c.orientation = f.orientation;
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit_report(const ExperimentConfig& c, const std::string& command, const json& result) {
  json envelope;
  envelope["command"] = command;
  envelope["config"] = config_to_json(c);
  envelope["result"] = result;
  write_text(fs::path(c.out_dir) / (command + ".json"), envelope.dump(2) + "\n");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- subcommands ----------------------------------------------------------

int run_verify_fn(const ExperimentConfig& c) {
  if (!c.phi) throw std::invalid_argument("verify-fn: config needs at least \"phi\"");
  const Window w = c.window();
  auto grid = geometric_grid(w.t_min, w.t_max, std::max(c.grid_points, 129));
  json result = json::object();
  bool all_pass = true;
  const std::pair<const char*, const std::optional<QuasiConcaveFn>*> fns[] = {
      {"phi", &c.phi}, {"phi0", &c.phi0}, {"phi1", &c.phi1}};
  for (const auto& [name, fopt] : fns) {
    if (!*fopt) continue;
    const QuasiConcaveFn& f = **fopt;
    json entry;
    VerificationReport qc = verify_quasi_concave(f, grid);
    VerificationReport nd = verify_nondegenerate(f, w, c.eps_deg);
    entry["quasi_concave"] = verification_to_json(qc);
    entry["nondegenerate"] = verification_to_json(nd);
    QuasiPowerCheck qp = is_quasi_power(f, w);
    entry["quasi_power"] = {{"value", qp.quasi_power},
                            {"s_at_tmin", qp.s_at_tmin},
                            {"s_at_tmax", qp.s_at_tmax}};
    all_pass = all_pass && qc.passed() && nd.passed();
    result[name] = std::move(entry);
  }
  emit_report(c, "verify-fn", result);
  std::cout << "verify-fn: " << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass ? 0 : 1;
}

int run_discretize(const ExperimentConfig& c) {
  if (!c.phi) throw std::invalid_argument("discretize: config needs \"phi\"");
  DiscretizingSequence seq = build_discretizing_sequence(*c.phi, c.window(), c.rho);
  VerificationReport ver = verify_discretizing_sequence(seq);
  json result;
  result["sequence"] = sequence_to_json(seq);
  result["verification"] = verification_to_json(ver);
  emit_report(c, "discretize", result);
  std::string csv = "k,t,phi_t,zone\n";
  for (int k = seq.k_min; k <= seq.k_max(); ++k) {
    csv += std::to_string(k) + "," + fmt(seq.t(k)) + "," +
           fmt(std::exp(seq.source.log_eval(seq.log_t(k)))) + "," +
           (k < seq.k_max() ? zone_name(seq.zone(k)) : "") + "\n";
  }
  write_text(fs::path(c.out_dir) / "discretize.csv", csv);
  std::cout << "discretize: " << seq.size() << " points, "
            << (ver.passed() ? "PASS" : "FAIL") << "\n";
  return ver.passed() ? 0 : 1;
}

KEngine make_engine(const ExperimentConfig& c) {
  if (c.engine == "l1_linf") {
    if (!c.step_spec) throw std::invalid_argument("engine l1_linf needs a \"step\" spec");
    return k_engine_l1_linf(step_from_json(*c.step_spec));
  }
  if (!c.couple_spec || !c.vector_spec)
    throw std::invalid_argument("engine " + c.engine + " needs \"couple\" and \"vector\" specs");
  WeightedSeqCouple couple = couple_from_json(*c.couple_spec);
  SeqVector a = vector_from_json(*c.vector_spec);
  if (c.engine == "min_formula") return k_engine_min_formula(couple, a);
  if (c.engine == "oracle") {
    return [couple, a](double t) {
      try {
        return k_exact_oracle(couple, a, t).value;
      } catch (const std::length_error&) {
        throw std::invalid_argument(
            "oracle engine: support exceeds the small-instance cap; use engine min_formula");
      }
    };
  }
  throw std::invalid_argument("unknown engine: " + c.engine);
}

int run_kfunc(const ExperimentConfig& c) {
  const Window w = c.window();
  KEngine K = make_engine(c);
  auto grid = geometric_grid(w.t_min, w.t_max, std::max(2, c.grid_points));
  std::string csv = "t,K\n";
  for (double t : grid) csv += fmt(t) + "," + fmt(K(t)) + "\n";
  write_text(fs::path(c.out_dir) / "kfunc.csv", csv);
  VerificationReport shape = check_k_shape(K, grid);
  json result;
  result["grid_points"] = static_cast<int>(grid.size());
  result["shape"] = verification_to_json(shape);
  emit_report(c, "kfunc", result);
  std::cout << "kfunc: " << (shape.passed() ? "PASS" : "FAIL") << "\n";
  return shape.passed() ? 0 : 1;
}

int run_norm(const ExperimentConfig& c) {
  if (!c.phi) throw std::invalid_argument("norm: config needs \"phi\"");
  DiscretizingSequence seq = build_discretizing_sequence(*c.phi, c.window(), c.rho);
  NormReport rep = janson_norm(make_engine(c), seq, c.p);
  json result = norm_report_to_json(rep);
  result["tail_flagged"] = rep.tail_flagged;
  emit_report(c, "norm", result);
  std::cout << "norm: " << fmt(rep.value) << (rep.tail_flagged ? " (tail flagged)" : "") << "\n";
  return rep.tail_flagged ? 1 : 0;
}

struct GilbertSetup {
  WeightedSeqCouple couple;
  int interior_lo, interior_hi;
};

GilbertSetup gilbert_setup(const ExperimentConfig& c, const Window& w) {
  if (c.couple_spec) {
    WeightedSeqCouple couple = couple_from_json(*c.couple_spec);
    return {couple, couple.first_index + 4, couple.last_index() - 4};
  }
  if (!c.phi || !c.phi0 || !c.phi1)
    throw std::invalid_argument("gilbert-check: provide a couple or a full triple");
  QuasiConcaveFn comp = compose_parameter(*c.phi, *c.phi0, *c.phi1);
  DiscretizingSequence sc = build_discretizing_sequence(comp, w, c.rho);
  std::vector<double> lv(sc.log_points.size(), 0.0), lw(sc.log_points.size());
  for (size_t i = 0; i < sc.log_points.size(); ++i) lw[i] = -sc.log_points[i];
  auto couple = WeightedSeqCouple::from_logs(c.q, sc.k_min, std::move(lv), std::move(lw));
  return {couple, couple.first_index + 4, couple.last_index() - 4};
}

std::vector<SeqVector> draw_vectors(Rng& rng, int n, int lo, int hi, int max_support) {
  std::vector<SeqVector> out;
  for (int s = 0; s < n; ++s) {
    const int count = rng.uniform_int(1, std::min(max_support, hi - lo + 1));
    std::vector<std::pair<int, double>> entries;
    for (int i = 0; i < count; ++i) {
      const double mag = rng.log_uniform(0.1, 10.0);
      entries.emplace_back(rng.uniform_int(lo, hi), rng.coin() ? mag : -mag);
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end(),
                              [](const auto& a, const auto& b) { return a.first == b.first; }),
                  entries.end());
    out.emplace_back(entries);
  }
  return out;
}

int run_gilbert_check(const ExperimentConfig& c) {
  if (!c.phi) throw std::invalid_argument("gilbert-check: config needs \"phi\"");
  const Window w1 = c.window();
  const Window w2 = w1.doubled();
  GilbertSetup setup1 = gilbert_setup(c, w1);
  if (setup1.interior_lo > setup1.interior_hi)
    throw window_error("gilbert-check: couple window too small for a safe interior");
  json result;
  RatioStats stats[2];
  bool all_finite = true;
  json windows = json::array();
  const Window pair[2] = {w1, w2};
  for (int wi = 0; wi < 2; ++wi) {
    const Window& w = pair[wi];
    GilbertSetup setup = c.couple_spec ? setup1 : gilbert_setup(c, w);
    DiscretizingSequence seq = build_discretizing_sequence(*c.phi, w, c.rho);
    Rng rng(c.seed);
    auto vectors =
        draw_vectors(rng, c.samples, setup1.interior_lo, setup1.interior_hi, 8);
    std::vector<double> ratios;
    for (const auto& a : vectors) {
      if (a.empty()) continue;
      const double lhs = janson_norm(k_engine_min_formula(setup.couple, a), seq, c.p).value;
      const double rhs = gilbert_rhs(setup.couple, *c.phi, seq, c.p, a);
      if (!(lhs > 0.0) || !(rhs > 0.0)) {
        all_finite = false;
        continue;
      }
      ratios.push_back(lhs / rhs);
    }
    stats[wi] = ratio_stats(ratios);
    windows.push_back({{"t_min", w.t_min},
                       {"t_max", w.t_max},
                       {"samples", static_cast<int>(ratios.size())},
                       {"ratio", ratio_stats_to_json(stats[wi])}});
  }
  const double drift_min = std::abs(stats[1].min / stats[0].min - 1.0);
  const double drift_max = std::abs(stats[1].max / stats[0].max - 1.0);
  result["drift_min"] = drift_min;
  result["drift_max"] = drift_max;
  result["drift_pass"] =
      all_finite && drift_min < c.drift_threshold && drift_max < c.drift_threshold;
  result["windows"] = std::move(windows);
  emit_report(c, "gilbert-check", result);
  const bool pass = result["drift_pass"].get<bool>();
  std::cout << "gilbert-check: " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int run_condition_v(const ExperimentConfig& c) {
  TripleContext ctx = make_triple_context(c.triple(), c.window(), c.rho);
  TripleContext ctx2 = make_triple_context(c.triple(), c.window().doubled(), c.rho);
  CardinalityProfile p1 = condition_v_profile(ctx, c.ratio_orientation());
  CardinalityProfile p2 = condition_v_profile(ctx2, c.ratio_orientation());
  json result;
  result["max_cardinality"] = p1.max_count;
  result["bounded"] = p2.max_count <= p1.max_count;
  result["profile"] = profile_to_json(p1);
  result["profile_doubled_window"] = profile_to_json(p2);
  emit_report(c, "condition-v", result);
  std::cout << "condition-v: max_cardinality=" << p1.max_count
            << " bounded=" << (p2.max_count <= p1.max_count ? "true" : "false") << "\n";
  return 0;
}

int run_sum_sup(const ExperimentConfig& c) {
  TripleContext ctx = make_triple_context(c.triple(), c.window(), c.rho);
  TripleContext ctx2 = make_triple_context(c.triple(), c.window().doubled(), c.rho);
  const std::pair<SumSupVariant, const char*> variants[] = {
      {SumSupVariant::RatioOverTau, "ratio_over_tau"},
      {SumSupVariant::RatioOverZ, "ratio_over_z"},
      {SumSupVariant::PhiRatioOverTau, "phi_ratio_over_tau"},
      {SumSupVariant::InvRatioPhiRatioOverZ, "inv_ratio_phi_ratio_over_z"}};
  const double rs[] = {1.0, -1.0, 2.0};
  json result = json::object();
  bool pass = true;
  for (const auto& [variant, name] : variants) {
    json per_r = json::object();
    for (double r : rs) {
      auto worst = [&](const TripleContext& context) {
        double m = 1.0;
        for (const BlockRatio& br : sum_sup_ratio(context, variant, r))
          m = std::max(m, br.value);
        return m;
      };
      const double m1 = worst(ctx), m2 = worst(ctx2);
      const double drift = std::abs(m2 / m1 - 1.0);
      const bool ok = drift < c.drift_threshold;
      pass = pass && ok;
      per_r[fmt(r)] = {{"max_block_ratio", m1},
                       {"max_block_ratio_doubled_window", m2},
                       {"drift", drift},
                       {"pass", ok}};
    }
    result[name] = std::move(per_r);
  }
  emit_report(c, "sum-sup", result);
  std::cout << "sum-sup: " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int run_stability(const ExperimentConfig& c) {
  TripleContext ctx = make_triple_context(c.triple(), c.window(), c.rho);
  EquivalenceOptions opts;
  opts.q0 = c.q0;
  opts.q1 = c.q1;
  opts.p = c.p;
  opts.samples = c.samples;
  opts.seed = c.seed;
  EquivalenceReport rep = equivalence_experiment(ctx, opts);
  // embedding direction: the smaller inner index gives the larger norm
  bool embedding_ok;
  if (opts.q0 <= opts.q1)
    embedding_ok = rep.side_ratio.min >= 1.0 - 1e-9;
  else
    embedding_ok = rep.side_ratio.max <= 1.0 + 1e-9;
  json result = equivalence_to_json(rep);
  result["embedding_ok"] = embedding_ok;
  emit_report(c, "stability", result);
  std::cout << "stability: " << (embedding_ok ? "PASS" : "FAIL")
            << " side_ratio=[" << fmt(rep.side_ratio.min) << ", " << fmt(rep.side_ratio.max)
            << "]\n";
  return embedding_ok ? 0 : 1;
}

int run_falsify(const ExperimentConfig& c) {
  std::vector<Window> schedule;
  Window w = c.window();
  for (int i = 0; i < std::max(1, c.schedule_windows); ++i) {
    schedule.push_back(w);
    if (i + 1 < std::max(1, c.schedule_windows)) w = w.doubled();
  }
  auto rows = counterexample_search(c.triple(), schedule, c.p, c.rho, c.ratio_orientation());
  json result;
  result["table"] = divergence_table_to_json(rows);
  bool increasing = true;
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    increasing = increasing && rows[i + 1].worst_ratio > rows[i].worst_ratio;
  result["ratio_strictly_increasing"] = increasing;
  emit_report(c, "falsify", result);
  std::string csv = "t_min,t_max,worst_ratio,max_cardinality,witness_octave\n";
  for (const auto& r : rows)
    csv += fmt(r.t_min) + "," + fmt(r.t_max) + "," + fmt(r.worst_ratio) + "," +
           std::to_string(r.max_cardinality) + "," + std::to_string(r.witness_octave) + "\n";
  write_text(fs::path(c.out_dir) / "falsify.csv", csv);
  std::cout << "falsify: worst_ratio";
  for (const auto& r : rows) std::cout << " " << fmt(r.worst_ratio);
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interpolation-space numerics: discretization, K-functionals, stability"};
  app.require_subcommand(1);
  FlagOverrides flags;
  const std::pair<const char*, int (*)(const ExperimentConfig&)> commands[] = {
      {"verify-fn", run_verify_fn},   {"discretize", run_discretize},
      {"kfunc", run_kfunc},           {"norm", run_norm},
      {"gilbert-check", run_gilbert_check}, {"condition-v", run_condition_v},
      {"sum-sup", run_sum_sup},       {"stability", run_stability},
      {"falsify", run_falsify}};
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    add_common_flags(sub, flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  try {
    const ExperimentConfig config = resolve_config(flags);
    for (const auto& [name, fn] : commands)
      if (app.get_subcommand(name)->parsed()) return fn(config);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
