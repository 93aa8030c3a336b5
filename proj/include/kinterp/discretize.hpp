#pragma once

#include <map>

#include "kinterp/qcfn.hpp"

namespace kinterp {

// Zone of a step k -> k+1: Z1 when the phi-growth constraint is the tight one
// (phi(t_{k+1}) <= rho * phi(t_k)), Z2 when the phi/t-decay constraint is.
enum class Zone { Z1, Z2 };

inline const char* zone_name(Zone z) { return z == Zone::Z1 ? "Z1" : "Z2"; }

struct DiscretizingSequence {
  QuasiConcaveFn source;
  double rho = 2.0;
  int k_min = 0;                  // index of log_points.front()
  std::vector<double> log_points; // strictly increasing, t_k = exp(log_points[k - k_min])
  std::vector<Zone> zones;        // zones[j]: zone of step (k_min + j) -> (k_min + j + 1)

  int k_max() const { return k_min + static_cast<int>(log_points.size()) - 1; }
  int size() const { return static_cast<int>(log_points.size()); }
  double log_t(int k) const {
    if (k < k_min || k > k_max()) throw std::out_of_range("sequence index out of window");
    return log_points[static_cast<size_t>(k - k_min)];
  }
  double t(int k) const { return std::exp(log_t(k)); }
  Zone zone(int k) const {  // zone of step k -> k+1
    if (k < k_min || k >= k_max()) throw std::out_of_range("zone index out of window");
    return zones[static_cast<size_t>(k - k_min)];
  }
};

struct BuildOptions {
  double log_bisect_tol = 1e-12;  // bisection tolerance in log t
  double tight_tol = 1e-9;        // max slack allowed for the binding constraint
};

namespace detail {

// First x in (anchor, limit] where g(x) >= 0, g non-decreasing and continuous,
// g(anchor) < 0. Returns NaN when g stays negative up to limit.
template <class G>
double rising_crossing(G&& g, double anchor, double limit, double tol) {
  double lo = anchor;
  double step = 1.0;
  double hi = anchor;
  for (;;) {
    if (hi >= limit) {
      if (g(limit) < 0.0) return std::numeric_limits<double>::quiet_NaN();
      hi = limit;
      break;
    }
    hi = std::min(limit, hi + step);
    if (g(hi) >= 0.0) break;
    lo = hi;
    step *= 2.0;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace detail

// Greedy construction anchored at t_0 = 1: each forward step takes the infimum
// of t where both phi and t/phi have grown by rho since the previous point;
// backward steps mirror it. The binding constraint decides the zone, ties to Z1.
inline DiscretizingSequence build_discretizing_sequence(const QuasiConcaveFn& f, const Window& w,
                                                        double rho = 2.0,
                                                        const BuildOptions& opts = {}) {
  if (!(rho > 1.0) || !std::isfinite(rho))
    throw std::invalid_argument("build_discretizing_sequence: need 1 < rho < inf");
  {
    auto grid = geometric_grid(w.t_min, w.t_max, 257);
    if (!verify_quasi_concave(f, grid).passed())
      throw std::invalid_argument("build_discretizing_sequence: f fails quasi-concavity");
    if (!verify_nondegenerate(f, w).passed())
      throw std::invalid_argument("build_discretizing_sequence: f degenerate on window");
  }
  const double log_rho = std::log(rho);
  auto g = [&f](double x) { return f.log_eval(x); };

  std::vector<double> fwd{0.0};  // log t, forward from t_0 = 1
  std::vector<Zone> fwd_zones;
  for (;;) {
    const double xk = fwd.back();
    const double pk = g(xk);
    auto grow = [&](double x) {
      const double p = g(x);
      const double g1 = p - pk - log_rho;               // phi grew by rho
      const double g2 = (x - p) - (xk - pk) - log_rho;  // t/phi grew by rho
      return std::min(g1, g2);
    };
    const double x = detail::rising_crossing(grow, xk, w.log_max(), opts.log_bisect_tol);
    if (std::isnan(x)) break;
    const double p = g(x);
    const double g1 = p - pk - log_rho;
    const double g2 = (x - p) - (xk - pk) - log_rho;
    if (std::min(g1, g2) > opts.tight_tol)
      throw std::runtime_error("build_discretizing_sequence: no tight constraint at step");
    fwd_zones.push_back(g1 <= g2 ? Zone::Z1 : Zone::Z2);
    fwd.push_back(x);
  }

  std::vector<double> bwd;  // log t, going down from t_0
  std::vector<Zone> bwd_zones;
  {
    double xk = 0.0;
    for (;;) {
      const double pk = g(xk);
      // h1, h2 are non-increasing in x; searching in y = -x makes min(h1,h2)
      // non-decreasing, so the same crossing helper finds the supremum.
      auto shrink = [&](double y) {
        const double x = -y;
        const double p = g(x);
        const double h1 = pk - p - log_rho;
        const double h2 = (xk - pk) - (x - p) - log_rho;
        return std::min(h1, h2);
      };
      const double ny = detail::rising_crossing(shrink, -xk, -w.log_min(), opts.log_bisect_tol);
      if (std::isnan(ny)) break;
      const double x = -ny;
      const double p = g(x);
      const double h1 = pk - p - log_rho;
      const double h2 = (xk - pk) - (x - p) - log_rho;
      if (std::min(h1, h2) > opts.tight_tol)
        throw std::runtime_error("build_discretizing_sequence: no tight constraint at step");
      bwd_zones.push_back(h1 <= h2 ? Zone::Z1 : Zone::Z2);
      bwd.push_back(x);
      xk = x;
    }
  }

  DiscretizingSequence seq{f, rho, -static_cast<int>(bwd.size()), {}, {}};
  seq.log_points.reserve(bwd.size() + fwd.size());
  seq.zones.reserve(bwd.size() + fwd.size() - 1);
  for (size_t i = bwd.size(); i-- > 0;) {
    seq.log_points.push_back(bwd[i]);
    seq.zones.push_back(bwd_zones[i]);
  }
  for (size_t i = 0; i < fwd.size(); ++i) seq.log_points.push_back(fwd[i]);
  for (Zone z : fwd_zones) seq.zones.push_back(z);
  return seq;
}

// Checks strong monotonicity of phi(t_k) and t_k/phi(t_k) at ratio rho and the
// per-step zone conditions. With assigned zones the assignment itself is
// checked; without, any per-step assignment is accepted if one exists.
inline VerificationReport verify_discretizing_sequence(const QuasiConcaveFn& f,
                                                       std::span<const double> points, double rho,
                                                       const std::vector<Zone>* zones = nullptr,
                                                       double rel_tol = 1e-9) {
  if (points.size() < 2)
    throw std::invalid_argument("verify_discretizing_sequence: need >= 2 points");
  if (zones && zones->size() + 1 != points.size())
    throw std::invalid_argument("verify_discretizing_sequence: zone count mismatch");
  VerificationReport rep;
  const double log_rho = std::log(rho);
  double max_growth_slack = 0.0;
  for (size_t j = 0; j + 1 < points.size(); ++j) {
    if (!(points[j] > 0.0) || !(points[j + 1] > points[j]))
      throw std::invalid_argument("verify_discretizing_sequence: points must increase");
    const double xa = std::log(points[j]), xb = std::log(points[j + 1]);
    const double pa = f.log_eval(xa), pb = f.log_eval(xb);
    const double r1 = pb - pa;                // log phi growth
    const double r2 = (xb - pb) - (xa - pa);  // log t/phi growth
    const long idx = static_cast<long>(j);
    if (r1 < log_rho - rel_tol)
      rep.violations.push_back({"phi_strongly_increasing", idx, r1, log_rho, log_rho - r1});
    if (r2 < log_rho - rel_tol)
      rep.violations.push_back({"phi_over_t_strongly_decreasing", idx, r2, log_rho, log_rho - r2});
    max_growth_slack = std::max(max_growth_slack, std::min(r1, r2) - log_rho);
    const bool z1_ok = r1 <= log_rho + rel_tol;
    const bool z2_ok = r2 <= log_rho + rel_tol;
    if (zones) {
      const Zone z = (*zones)[j];
      if (z == Zone::Z1 && !z1_ok)
        rep.violations.push_back({"zone_z1_bound", idx, r1, log_rho, r1 - log_rho});
      if (z == Zone::Z2 && !z2_ok)
        rep.violations.push_back({"zone_z2_bound", idx, r2, log_rho, r2 - log_rho});
    } else if (!z1_ok && !z2_ok) {
      rep.violations.push_back(
          {"zone_assignable", idx, std::min(r1, r2), log_rho, std::min(r1, r2) - log_rho});
    }
  }
  rep.observe("max_tightness_slack", max_growth_slack);
  return rep;
}

inline VerificationReport verify_discretizing_sequence(const DiscretizingSequence& seq,
                                                       double rel_tol = 1e-9) {
  std::vector<double> pts(seq.log_points.size());
  for (size_t i = 0; i < pts.size(); ++i) pts[i] = std::exp(seq.log_points[i]);
  return verify_discretizing_sequence(seq.source, pts, seq.rho, &seq.zones, rel_tol);
}

// Assignment of ratio values to the right-closed octaves (t_{k-1}, t_k] of an
// outer sequence. Boundary hits go to the lower block; log-space comparisons
// use boundary_tol to absorb bisection drift.
struct BlockPartition {
  int outer_k_min = 0;
  std::vector<double> outer_log;          // boundaries
  std::map<int, std::vector<int>> blocks; // nonempty blocks only, k -> inner indices
  std::map<int, int> block_of;            // inner index -> block
  std::vector<int> unassigned;            // inner indices with ratio outside the window

  int block_lo() const { return outer_k_min + 1; }  // first defined block
  int block_hi() const { return outer_k_min + static_cast<int>(outer_log.size()) - 1; }
  const std::vector<int>* block(int k) const {
    auto it = blocks.find(k);
    return it == blocks.end() ? nullptr : &it->second;
  }
};

inline BlockPartition block_partition_log(const DiscretizingSequence& outer,
                                          std::span<const std::pair<int, double>> log_ratios,
                                          double boundary_tol = 1e-9) {
  BlockPartition bp;
  bp.outer_k_min = outer.k_min;
  bp.outer_log = outer.log_points;
  const auto& b = bp.outer_log;
  for (const auto& [i, lr] : log_ratios) {
    if (lr <= b.front() + boundary_tol || lr > b.back() + boundary_tol) {
      bp.unassigned.push_back(i);
      continue;
    }
    // first boundary with lr <= boundary + tol; that boundary's index is the block
    const auto it = std::lower_bound(b.begin(), b.end(), lr - boundary_tol);
    const int k = bp.outer_k_min + static_cast<int>(it - b.begin());
    bp.blocks[k].push_back(i);
    bp.block_of[i] = k;
  }
  for (auto& [k, v] : bp.blocks) std::sort(v.begin(), v.end());
  std::sort(bp.unassigned.begin(), bp.unassigned.end());
  return bp;
}

inline BlockPartition block_partition(const DiscretizingSequence& outer,
                                      std::span<const std::pair<int, double>> ratios,
                                      double boundary_tol = 1e-9) {
  std::vector<std::pair<int, double>> logs;
  logs.reserve(ratios.size());
  for (const auto& [i, r] : ratios) {
    if (!(r > 0.0)) throw std::domain_error("block_partition: ratios must be > 0");
    logs.emplace_back(i, std::log(r));
  }
  return block_partition_log(outer, logs, boundary_tol);
}

}  // namespace kinterp
