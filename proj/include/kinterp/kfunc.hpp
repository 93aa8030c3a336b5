#pragma once

#include <functional>

#include "kinterp/seq.hpp"

namespace kinterp {

// || a_i * min(v_i, t w_i) ||_lq. Exact K for q = 1, two-sided surrogate
// (F <= K <= 2F) for every q.
inline double k_min_formula(const WeightedSeqCouple& couple, const SeqVector& a, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("k_min_formula: need t > 0");
  if (a.empty()) return 0.0;
  const double log_t = std::log(t);
  std::vector<double> log_terms;
  log_terms.reserve(a.size());
  for (const auto& [i, v] : a)
    log_terms.push_back(std::log(std::abs(v)) +
                        std::min(couple.log_v_at(i), log_t + couple.log_w_at(i)));
  return std::exp(lp_norm_log(log_terms, couple.q));
}

struct OracleOptions {
  int max_support = 8;
  double rel_tol = 1e-10;   // per-sweep relative improvement threshold
  int max_sweeps = 200;
  double lambda_tol = 1e-11;  // golden-section width per coordinate
};

struct OracleResult {
  double value = 0.0;
  std::vector<double> lambda;  // c_i = lambda_i * a_i, b_i = (1 - lambda_i) * a_i
  int sweeps = 0;
};

namespace detail {

inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
  static const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace detail

// Exhaustive convex search for K(t, a) = inf_{b+c=a} norm0(b) + t*norm1(c) with
// pluggable norms. The optimum has b_i = (1-lambda_i) a_i with lambda in [0,1]^n;
// cyclic coordinate descent with golden sections plus endpoint snapping, seeded
// from both trivial splits and the per-coordinate cheaper-side split.
inline OracleResult k_decomposition_oracle(
    const std::function<double(std::span<const double>)>& norm0,
    const std::function<double(std::span<const double>)>& norm1, std::span<const double> a,
    double t, const OracleOptions& opts = {}) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("oracle: need t > 0");
  const size_t n = a.size();
  if (n == 0) return {};
  if (n > static_cast<size_t>(opts.max_support))
    throw std::length_error("oracle: support exceeds capacity cap");

  std::vector<double> b(n), c(n);
  auto objective = [&](const std::vector<double>& lam) {
    for (size_t i = 0; i < n; ++i) {
      b[i] = (1.0 - lam[i]) * a[i];
      c[i] = lam[i] * a[i];
    }
    return norm0(b) + t * norm1(c);
  };

  // starting candidates
  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(n, 0.0));
  starts.push_back(std::vector<double>(n, 1.0));
  {
    std::vector<double> split(n);
    std::vector<double> e(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
      e[i] = a[i];
      const double side0 = norm0(e);
      const double side1 = t * norm1(e);
      e[i] = 0.0;
      split[i] = side0 > side1 ? 1.0 : 0.0;
    }
    starts.push_back(std::move(split));
  }
  std::vector<double> lam = starts[0];
  double best = objective(lam);
  for (size_t s = 1; s < starts.size(); ++s) {
    const double val = objective(starts[s]);
    if (val < best) {
      best = val;
      lam = starts[s];
    }
  }

  OracleResult res;
  for (res.sweeps = 0; res.sweeps < opts.max_sweeps; ++res.sweeps) {
    const double before = best;
    for (size_t i = 0; i < n; ++i) {
      auto along = [&](double l) {
        const double keep = lam[i];
        lam[i] = l;
        const double v = objective(lam);
        lam[i] = keep;
        return v;
      };
      const double cand = detail::golden_min(along, 0.0, 1.0, opts.lambda_tol);
      double v_cand = along(cand), v0 = along(0.0), v1 = along(1.0);
      double pick = cand, v_pick = v_cand;
      if (v0 <= v_pick) {
        pick = 0.0;
        v_pick = v0;
      }
      if (v1 < v_pick) {
        pick = 1.0;
        v_pick = v1;
      }
      if (v_pick < best) {
        lam[i] = pick;
        best = v_pick;
      }
    }
    if (before - best <= opts.rel_tol * std::max(best, 1e-300)) break;
  }
  res.value = best;
  res.lambda = std::move(lam);
  return res;
}

namespace detail {

// Exact minimum for q = inf: with budget beta on max_i v_i |b_i|, the best tail
// is t * max_i w_i (|a_i| - beta / v_i)_+, a convex piecewise-linear function of
// beta whose minimum sits on a kink.
inline double k_exact_linf(const WeightedSeqCouple& couple, const std::vector<int>& idx,
                           const std::vector<double>& abs_a, double t) {
  const size_t n = idx.size();
  std::vector<double> v(n), w(n);
  for (size_t i = 0; i < n; ++i) {
    v[i] = couple.v_at(idx[i]);
    w[i] = couple.w_at(idx[i]);
  }
  auto value = [&](double beta) {
    double tail = 0.0;
    for (size_t i = 0; i < n; ++i)
      tail = std::max(tail, w[i] * std::max(0.0, abs_a[i] - beta / v[i]));
    return beta + t * tail;
  };
  std::vector<double> candidates{0.0};
  for (size_t i = 0; i < n; ++i) candidates.push_back(v[i] * abs_a[i]);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      // crossing of the two linear pieces w_i(|a_i| - beta/v_i), w_j(...)
      const double den = w[i] / v[i] - w[j] / v[j];
      if (den == 0.0) continue;
      const double beta = (w[i] * abs_a[i] - w[j] * abs_a[j]) / den;
      if (beta > 0.0 && std::isfinite(beta)) candidates.push_back(beta);
    }
  double best = std::numeric_limits<double>::infinity();
  const double beta_max = *std::max_element(candidates.begin(), candidates.end());
  for (double beta : candidates)
    if (beta <= beta_max) best = std::min(best, value(beta));
  return best;
}

}  // namespace detail

// Reference K for small supports: the true infimum over decompositions of the
// couple (lq(v), lq(w)). Independent search path from k_min_formula.
inline OracleResult k_exact_oracle(const WeightedSeqCouple& couple, const SeqVector& a, double t,
                                   const OracleOptions& opts = {}) {
  if (a.empty()) return {};
  if (a.size() > static_cast<size_t>(opts.max_support))
    throw std::length_error("k_exact_oracle: support exceeds capacity cap");
  std::vector<int> idx;
  std::vector<double> abs_a;
  for (const auto& [i, val] : a) {
    if (!couple.in_window(i)) throw window_error("k_exact_oracle: index outside couple window");
    idx.push_back(i);
    abs_a.push_back(std::abs(val));
  }
  auto weighted_norm = [&](const std::vector<double>& log_weight) {
    return [&couple, log_weight](std::span<const double> values) {
      std::vector<double> log_terms;
      log_terms.reserve(values.size());
      for (size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0.0) log_terms.push_back(std::log(std::abs(values[i])) + log_weight[i]);
      return std::exp(lp_norm_log(log_terms, couple.q));
    };
  };
  std::vector<double> lv(idx.size()), lw(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    lv[i] = couple.log_v_at(idx[i]);
    lw[i] = couple.log_w_at(idx[i]);
  }
  OracleResult res =
      k_decomposition_oracle(weighted_norm(lv), weighted_norm(lw), abs_a, t, opts);
  if (is_inf(couple.q)) {
    const double exact = detail::k_exact_linf(couple, idx, abs_a, t);
    if (exact < res.value) {
      res.value = exact;
      res.lambda.clear();  // kink search does not track the decomposition
    }
  }
  return res;
}

// K(t, f; L1, Linf) for step functions: integral of the decreasing
// rearrangement over [0, t].
inline double k_l1_linf(const StepFunction& f, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("k_l1_linf: need t > 0");
  double remaining = t;
  double acc = 0.0;
  for (const auto& [level, measure] : f.rearrangement_pieces()) {
    if (remaining <= 0.0) break;
    const double take = std::min(remaining, measure);
    acc += level * take;
    remaining -= take;
  }
  return acc;
}

}  // namespace kinterp
