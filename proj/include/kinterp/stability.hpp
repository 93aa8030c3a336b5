#pragma once

#include "kinterp/kfunc.hpp"
#include "kinterp/spaces.hpp"

namespace kinterp {

struct Triple {
  QuasiConcaveFn phi, phi0, phi1;
};

enum class RatioOrientation { Phi1OverPhi0, Phi0OverPhi1 };

// Everything the stability experiments derive from (triple, window, rho):
// the composite parameter, the four discretizing sequences and the weight
// ratio sampled along the composite sequence.
struct TripleContext {
  Triple triple;
  Window window;
  double rho;
  QuasiConcaveFn composite;            // phi0 * phi(phi1/phi0)
  DiscretizingSequence seq_phi;        // {t_j}
  DiscretizingSequence seq_phi0;       // {tau_k}
  DiscretizingSequence seq_phi1;       // {z_k}
  DiscretizingSequence seq_composite;  // {ttilde_i}
  std::vector<double> log_ratio;       // log(phi1/phi0)(ttilde_i), by composite index

  double log_ratio_at(int i) const {
    return log_ratio[static_cast<size_t>(i - seq_composite.k_min)];
  }
};

inline TripleContext make_triple_context(const Triple& tr, const Window& w, double rho = 2.0) {
  QuasiConcaveFn comp = compose_parameter(tr.phi, tr.phi0, tr.phi1);
  DiscretizingSequence sp = build_discretizing_sequence(tr.phi, w, rho);
  DiscretizingSequence s0 = build_discretizing_sequence(tr.phi0, w, rho);
  DiscretizingSequence s1 = build_discretizing_sequence(tr.phi1, w, rho);
  DiscretizingSequence sc = build_discretizing_sequence(comp, w, rho);
  std::vector<double> lr;
  lr.reserve(sc.log_points.size());
  for (double x : sc.log_points)
    lr.push_back(tr.phi1.log_eval(x) - tr.phi0.log_eval(x));
  return TripleContext{tr, w, rho, std::move(comp), std::move(sp), std::move(s0),
                       std::move(s1), std::move(sc), std::move(lr)};
}

struct CardinalityProfile {
  int n_min = 0;               // first octave index; octave n spans [t_n, t_{n+1}]
  std::vector<int> counts;     // per octave, closed at both ends
  int max_count = 0;
  int unassigned = 0;          // ratios outside the outer range
  double ratio_log_span = 0.0;
  bool degenerate_ratio = false;  // ratio range smaller than one rho step
};

// Counts, per outer octave [t_n, t_{n+1}], how many composite points carry a
// weight ratio inside it. Bounded counts are exactly the stability criterion.
inline CardinalityProfile condition_v_profile(const TripleContext& ctx,
                                              RatioOrientation orientation =
                                                  RatioOrientation::Phi1OverPhi0,
                                              double boundary_tol = 1e-9) {
  const auto& outer = ctx.seq_phi.log_points;
  CardinalityProfile prof;
  prof.n_min = ctx.seq_phi.k_min;
  prof.counts.assign(outer.size() > 1 ? outer.size() - 1 : 0, 0);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double lr : ctx.log_ratio) {
    if (orientation == RatioOrientation::Phi0OverPhi1) lr = -lr;
    lo = std::min(lo, lr);
    hi = std::max(hi, lr);
    bool assigned = false;
    for (size_t n = 0; n + 1 < outer.size(); ++n) {
      if (lr >= outer[n] - boundary_tol && lr <= outer[n + 1] + boundary_tol) {
        ++prof.counts[n];
        assigned = true;
      }
    }
    if (!assigned) ++prof.unassigned;
  }
  for (int c : prof.counts) prof.max_count = std::max(prof.max_count, c);
  prof.ratio_log_span = ctx.log_ratio.empty() ? 0.0 : hi - lo;
  prof.degenerate_ratio = prof.ratio_log_span < std::log(ctx.rho);
  return prof;
}

enum class SumSupVariant {
  RatioOverTau,           // sum vs sup of (phi1/phi0)^r over tau blocks
  RatioOverZ,             // same terms over z blocks
  PhiRatioOverTau,        // phi(phi1/phi0)^r over tau blocks
  InvRatioPhiRatioOverZ,  // ((phi0/phi1) * phi(phi1/phi0))^r over z blocks
};

struct BlockRatio {
  int block = 0;
  double value = 1.0;  // (sum of terms) / (max term); 1 for empty blocks
  int cardinality = 0;
};

// Per-block sum/sup ratios of the four weight comparisons. The bound being
// independent of the block (and the window) is what makes the two-scale norms
// collapse.
inline std::vector<BlockRatio> sum_sup_ratio(const TripleContext& ctx, SumSupVariant variant,
                                             double r) {
  if (!std::isfinite(r) || r == 0.0)
    throw std::invalid_argument("sum_sup_ratio: need finite r != 0");
  const bool tau_blocks =
      variant == SumSupVariant::RatioOverTau || variant == SumSupVariant::PhiRatioOverTau;
  const DiscretizingSequence& outer = tau_blocks ? ctx.seq_phi0 : ctx.seq_phi1;
  std::vector<std::pair<int, double>> positions;
  for (int i = ctx.seq_composite.k_min; i <= ctx.seq_composite.k_max(); ++i)
    positions.emplace_back(i, ctx.seq_composite.log_t(i));
  BlockPartition bp = block_partition_log(outer, positions);

  auto log_term = [&](int i) {
    const double lr = ctx.log_ratio_at(i);
    switch (variant) {
      case SumSupVariant::RatioOverTau:
      case SumSupVariant::RatioOverZ:
        return r * lr;
      case SumSupVariant::PhiRatioOverTau:
        return r * ctx.triple.phi.log_eval(lr);
      case SumSupVariant::InvRatioPhiRatioOverZ:
        return r * (ctx.triple.phi.log_eval(lr) - lr);
    }
    throw std::logic_error("unreachable");
  };

  std::vector<BlockRatio> out;
  for (int k = bp.block_lo(); k <= bp.block_hi(); ++k) {
    BlockRatio br;
    br.block = k;
    if (const auto* members = bp.block(k)) {
      br.cardinality = static_cast<int>(members->size());
      std::vector<double> logs;
      logs.reserve(members->size());
      for (int i : *members) logs.push_back(log_term(i));
      const double log_sum = lp_norm_log(logs, 1.0);
      const double log_sup = lp_norm_log(logs, inf_exponent);
      br.value = std::exp(log_sum - log_sup);
    }
    out.push_back(br);
  }
  return out;
}

// Block space forming one half of a stability side: lq-inside-lp over the
// composite points, blocks cut by the phi0 (resp. phi1) sequence and weights
// 1/phi0 (resp. 1/phi1) at the composite points.
inline BlockSpace side_block_space(const TripleContext& ctx, int which, double p, double q) {
  const DiscretizingSequence& outer = which == 0 ? ctx.seq_phi0 : ctx.seq_phi1;
  const QuasiConcaveFn& phi_i = which == 0 ? ctx.triple.phi0 : ctx.triple.phi1;
  std::vector<std::pair<int, double>> positions;
  std::map<int, double> log_w;
  for (int i = ctx.seq_composite.k_min; i <= ctx.seq_composite.k_max(); ++i) {
    const double x = ctx.seq_composite.log_t(i);
    positions.emplace_back(i, x);
    log_w[i] = -phi_i.log_eval(x);
  }
  return BlockSpace(p, q, block_partition_log(outer, positions), std::move(log_w));
}

// One stability side: the interpolation norm (phi, p) built on the couple of
// block spaces realized with inner index s (s = 1 and s = inf are the two
// sides whose equivalence the cardinality criterion governs).
struct StabilitySide {
  BlockSpace space0;
  BlockSpace space1;
  std::map<int, double> log_ratio;

  StabilitySide(const TripleContext& ctx, double s)
      : space0(side_block_space(ctx, 0, s, s)), space1(side_block_space(ctx, 1, s, s)) {
    for (int i = ctx.seq_composite.k_min; i <= ctx.seq_composite.k_max(); ++i)
      log_ratio[i] = ctx.log_ratio_at(i);
  }
  // Composite points outside the outer block boundaries stay unassigned, so
  // vector supports must be kept inside [first_assigned, last_assigned].
  bool assigned(int i) const {
    return space0.partition.block_of.count(i) != 0 && space1.partition.block_of.count(i) != 0;
  }
  int first_assigned() const {
    if (space0.partition.block_of.empty() || space1.partition.block_of.empty())
      throw window_error("stability side: no assigned composite points; enlarge the window");
    return std::max(space0.partition.block_of.begin()->first,
                    space1.partition.block_of.begin()->first);
  }
  int last_assigned() const {
    if (space0.partition.block_of.empty() || space1.partition.block_of.empty())
      throw window_error("stability side: no assigned composite points; enlarge the window");
    return std::min(space0.partition.block_of.rbegin()->first,
                    space1.partition.block_of.rbegin()->first);
  }
  double norm(const TripleContext& ctx, const SeqVector& a, double p) const {
    return janson_norm(k_engine_block_couple(space0, space1, log_ratio, a), ctx.seq_phi, p).value;
  }
};

// lp norm of a_i / composite(ttilde_i): the single-scale target both sides are
// measured against.
inline double flat_target_norm(const TripleContext& ctx, const SeqVector& a, double p) {
  std::vector<double> log_terms;
  log_terms.reserve(a.size());
  for (const auto& [i, v] : a)
    log_terms.push_back(std::log(std::abs(v)) -
                        ctx.composite.log_eval(ctx.seq_composite.log_t(i)));
  return std::exp(lp_norm_log(log_terms, p));
}

struct RatioStats {
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

inline RatioStats ratio_stats(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  RatioStats s;
  s.min = values.front();
  s.max = values.back();
  const size_t n = values.size();
  s.median = (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

struct EquivalenceOptions {
  double q0 = 1.0;
  double q1 = inf_exponent;
  double p = 1.0;
  int samples = 100;
  std::uint64_t seed = 1;
  int max_support = 8;
  int edge_margin = 4;  // support stays this many indices away from the window edges
};

struct EquivalenceReport {
  int samples_used = 0;
  int samples_skipped = 0;
  RatioStats side_ratio;     // side(q0) / side(q1)
  RatioStats side0_vs_rhs;   // side(q0) / flat target
  RatioStats side1_vs_rhs;   // side(q1) / flat target
  CardinalityProfile profile;
};

// Draws random vectors supported in the safe interior of the composite window
// and compares the two stability sides against each other and against the flat
// target norm.
inline EquivalenceReport equivalence_experiment(const TripleContext& ctx,
                                                const EquivalenceOptions& opts) {
  StabilitySide side_a(ctx, opts.q0);
  StabilitySide side_b(ctx, opts.q1);
  const int lo = std::max(ctx.seq_composite.k_min + opts.edge_margin, side_a.first_assigned());
  const int hi = std::min(ctx.seq_composite.k_max() - opts.edge_margin, side_a.last_assigned());
  if (lo > hi) throw window_error("equivalence_experiment: window too small for safe interior");

  Rng rng(opts.seed);
  EquivalenceReport rep;
  std::vector<double> r_ab, r_a_rhs, r_b_rhs;
  for (int s = 0; s < opts.samples; ++s) {
    const int span = hi - lo + 1;
    const int support = std::min(opts.max_support, span);
    const int count = rng.uniform_int(1, support);
    std::vector<std::pair<int, double>> entries;
    for (int c = 0; c < count; ++c) {
      const int i = rng.uniform_int(lo, hi);
      const double mag = rng.log_uniform(0.1, 10.0);
      entries.emplace_back(i, rng.coin() ? mag : -mag);
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end(),
                              [](const auto& x, const auto& y) { return x.first == y.first; }),
                  entries.end());
    SeqVector a(entries);
    if (a.empty()) {
      ++rep.samples_skipped;
      continue;
    }
    const double na = side_a.norm(ctx, a, opts.p);
    const double nb = side_b.norm(ctx, a, opts.p);
    const double rhs = flat_target_norm(ctx, a, opts.p);
    if (!(na > 0.0) || !(nb > 0.0) || !(rhs > 0.0)) {
      ++rep.samples_skipped;
      continue;
    }
    r_ab.push_back(na / nb);
    r_a_rhs.push_back(na / rhs);
    r_b_rhs.push_back(nb / rhs);
    ++rep.samples_used;
  }
  rep.side_ratio = ratio_stats(std::move(r_ab));
  rep.side0_vs_rhs = ratio_stats(std::move(r_a_rhs));
  rep.side1_vs_rhs = ratio_stats(std::move(r_b_rhs));
  rep.profile = condition_v_profile(ctx);
  return rep;
}

struct DivergenceRow {
  double t_min = 0.0;
  double t_max = 0.0;
  double worst_ratio = 0.0;  // max over octave witnesses of side(1)/side(inf)
  int max_cardinality = 0;
  int witness_octave = 0;
};

// For each window in the schedule, builds the octave witnesses (weighted
// indicators of all composite points whose ratio falls in one outer octave)
// and records the worst side(1)/side(inf) norm ratio. A triple with bounded
// octave counts produces a flat table; unbounded counts drag the ratio up.
inline std::vector<DivergenceRow> counterexample_search(
    const Triple& triple, std::span<const Window> schedule, double p, double rho = 2.0,
    RatioOrientation orientation = RatioOrientation::Phi1OverPhi0, double boundary_tol = 1e-9) {
  std::vector<DivergenceRow> rows;
  for (const Window& w : schedule) {
    TripleContext ctx = make_triple_context(triple, w, rho);
    CardinalityProfile prof = condition_v_profile(ctx, orientation, boundary_tol);
    StabilitySide side1(ctx, 1.0);
    StabilitySide side_inf(ctx, inf_exponent);
    DivergenceRow row;
    row.t_min = w.t_min;
    row.t_max = w.t_max;
    row.max_cardinality = prof.max_count;
    const auto& outer = ctx.seq_phi.log_points;
    for (size_t n = 0; n + 1 < outer.size(); ++n) {
      if (prof.counts[n] == 0) continue;
      std::vector<std::pair<int, double>> entries;
      double peak = -std::numeric_limits<double>::infinity();
      std::vector<std::pair<int, double>> members;  // index, log composite weight
      for (int i = side1.first_assigned(); i <= side1.last_assigned(); ++i) {
        double lr = ctx.log_ratio_at(i);
        if (orientation == RatioOrientation::Phi0OverPhi1) lr = -lr;
        if (lr < outer[n] - boundary_tol || lr > outer[n + 1] + boundary_tol) continue;
        const double lc = ctx.composite.log_eval(ctx.seq_composite.log_t(i));
        members.emplace_back(i, lc);
        peak = std::max(peak, lc);
      }
      if (members.empty()) continue;
      for (const auto& [i, lc] : members) entries.emplace_back(i, std::exp(lc - peak));
      SeqVector witness(entries);
      const double n1 = side1.norm(ctx, witness, p);
      const double ninf = side_inf.norm(ctx, witness, p);
      if (!(ninf > 0.0)) continue;
      const double ratio = n1 / ninf;
      if (ratio > row.worst_ratio) {
        row.worst_ratio = ratio;
        row.witness_octave = prof.n_min + static_cast<int>(n);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace kinterp
