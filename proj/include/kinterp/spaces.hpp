#pragma once

#include <functional>

#include "kinterp/discretize.hpp"
#include "kinterp/kfunc.hpp"
#include "kinterp/seq.hpp"

namespace kinterp {

// Two-scale sequence space lp over blocks of lq(weight): the inner lq norm is
// taken within each partition block, the outer lp norm across blocks.
struct BlockSpace {
  double p = 1.0;
  double q = 1.0;
  BlockPartition partition;
  std::map<int, double> log_weight;  // keyed by inner index

  BlockSpace(double p_, double q_, BlockPartition part, std::map<int, double> log_w)
      : p(p_), q(q_), partition(std::move(part)), log_weight(std::move(log_w)) {
    require_exponent(p_);
    require_exponent(q_);
  }
};

inline double block_norm(const BlockSpace& E, const SeqVector& a) {
  if (a.empty()) return 0.0;
  std::map<int, std::vector<double>> per_block;  // block -> inner log terms
  for (const auto& [i, v] : a) {
    auto bit = E.partition.block_of.find(i);
    if (bit == E.partition.block_of.end())
      throw window_error("block_norm: supported index " + std::to_string(i) +
                         " not assigned to any block");
    auto wit = E.log_weight.find(i);
    if (wit == E.log_weight.end())
      throw window_error("block_norm: no weight for index " + std::to_string(i));
    per_block[bit->second].push_back(std::log(std::abs(v)) + wit->second);
  }
  std::vector<double> outer;
  outer.reserve(per_block.size());
  for (const auto& [k, terms] : per_block) outer.push_back(lp_norm_log(terms, E.q));
  return std::exp(lp_norm_log(outer, E.p));
}

struct NormReport {
  double value = 0.0;
  int k_min = 0;  // window of the discretizing sequence actually summed
  int k_max = 0;
  double tail_estimate = 0.0;  // max of first and last summand, same scale as value
  bool tail_flagged = false;   // tail_estimate > 1e-6 * value
};

using KEngine = std::function<double(double t)>;

// Discrete interpolation norm: lp over k of K(t_k) / phi(t_k), phi and {t_k}
// taken from the sequence. The window truncation error is surfaced through the
// edge summands.
inline NormReport janson_norm(const KEngine& K, const DiscretizingSequence& seq, double p) {
  require_exponent(p);
  std::vector<double> log_terms;
  log_terms.reserve(seq.log_points.size());
  for (int k = seq.k_min; k <= seq.k_max(); ++k) {
    const double kv = K(seq.t(k));
    if (!(kv >= 0.0)) throw std::domain_error("janson_norm: K engine returned negative value");
    const double lt =
        kv == 0.0 ? -std::numeric_limits<double>::infinity()
                  : std::log(kv) - seq.source.log_eval(seq.log_t(k));
    log_terms.push_back(lt);
  }
  NormReport rep;
  rep.k_min = seq.k_min;
  rep.k_max = seq.k_max();
  rep.value = std::exp(lp_norm_log(log_terms, p));
  const double edge = std::max(log_terms.front(), log_terms.back());
  rep.tail_estimate = std::exp(edge);
  rep.tail_flagged = rep.tail_estimate > 1e-6 * rep.value;
  return rep;
}

// Checks the three shape properties every K-functional has in t: nondecreasing,
// K(t)/t nonincreasing, and midpoint concavity. Violations beyond rel_tol of the
// local scale are reported; the grid must be positive and strictly increasing.
inline VerificationReport check_k_shape(const KEngine& K, std::span<const double> grid,
                                        double rel_tol = 1e-7) {
  if (grid.size() < 2) throw std::invalid_argument("check_k_shape: need >= 2 grid points");
  VerificationReport rep;
  std::vector<double> kv(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
      throw std::invalid_argument("check_k_shape: grid must be positive and increasing");
    kv[i] = K(grid[i]);
  }
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    const long idx = static_cast<long>(i);
    const double scale = std::max(kv[i], kv[i + 1]);
    if (kv[i + 1] < kv[i] - rel_tol * scale)
      rep.violations.push_back({"k_nondecreasing", idx, kv[i + 1], kv[i], kv[i] - kv[i + 1]});
    const double ra = kv[i] / grid[i], rb = kv[i + 1] / grid[i + 1];
    if (rb > ra + rel_tol * std::max(ra, rb))
      rep.violations.push_back({"k_over_t_nonincreasing", idx, rb, ra, rb - ra});
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    const double km = K(mid);
    const double chord = 0.5 * (kv[i] + kv[i + 1]);
    if (km < chord - rel_tol * std::max(km, chord))
      rep.violations.push_back({"k_midpoint_concave", idx, km, chord, chord - km});
  }
  return rep;
}

// K engines bound to a concrete argument.
inline KEngine k_engine_min_formula(const WeightedSeqCouple& couple, const SeqVector& a) {
  return [couple, a](double t) { return k_min_formula(couple, a, t); };
}
inline KEngine k_engine_l1_linf(const StepFunction& f) {
  return [f](double t) { return k_l1_linf(f, t); };
}

// One-decomposition upper bound for K(t, a) between two block spaces: split a
// along Omega_t = {i : ratio_i <= t} and pay each part in its natural space.
inline double k_block_couple(const SeqVector& a, double t, const BlockSpace& space0,
                             const BlockSpace& space1, const std::map<int, double>& log_ratio) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("k_block_couple: need t > 0");
  const double log_t = std::log(t);
  for (const auto& [i, v] : a)
    if (!log_ratio.count(i))
      throw window_error("k_block_couple: no ratio for supported index " + std::to_string(i));
  const SeqVector near = a.filtered([&](int i) { return log_ratio.at(i) <= log_t; });
  const SeqVector far = a.filtered([&](int i) { return log_ratio.at(i) > log_t; });
  return block_norm(space0, near) + t * block_norm(space1, far);
}

inline KEngine k_engine_block_couple(const BlockSpace& space0, const BlockSpace& space1,
                                     const std::map<int, double>& log_ratio, const SeqVector& a) {
  return [&space0, &space1, &log_ratio, a](double t) {
    return k_block_couple(a, t, space0, space1, log_ratio);
  };
}

// Block-space realization of the interpolation norm of (lq(v), lq(w)) with
// parameter phi: blocks collect indices by where v_i/w_i falls among {t_k},
// weights are v_i / phi(v_i/w_i).
inline double gilbert_rhs(const WeightedSeqCouple& couple, const QuasiConcaveFn& phi,
                          const DiscretizingSequence& seq, double p, const SeqVector& a) {
  require_exponent(p);
  if (a.empty()) return 0.0;
  std::vector<std::pair<int, double>> log_ratios;
  std::map<int, double> log_w;
  for (const auto& [i, v] : a) {
    const double lr = couple.log_v_at(i) - couple.log_w_at(i);
    log_ratios.emplace_back(i, lr);
    log_w[i] = couple.log_v_at(i) - phi.log_eval(lr);
  }
  BlockPartition bp = block_partition_log(seq, log_ratios);
  if (!bp.unassigned.empty())
    throw window_error("gilbert_rhs: ratio outside the sequence window for index " +
                       std::to_string(bp.unassigned.front()) + "; enlarge the window");
  BlockSpace E(p, couple.q, std::move(bp), std::move(log_w));
  return block_norm(E, a);
}

}  // namespace kinterp
