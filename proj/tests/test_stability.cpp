#include <catch_amalgamated.hpp>

#include "kinterp/stability.hpp"

using namespace kinterp;
using Catch::Approx;

namespace {

Triple power_triple() {
  return {QuasiConcaveFn::power_log(0.5, 0.0, 0.0),
          QuasiConcaveFn::power_log(1.0 / 3.0, 0.0, 0.0),
          QuasiConcaveFn::power_log(2.0 / 3.0, 0.0, 0.0)};
}

Triple log_triple() {
  return {QuasiConcaveFn::power_log(0.5, 0.0, 0.0), QuasiConcaveFn::power_log(0.5, 0.0, 0.0),
          QuasiConcaveFn::power_log(0.5, 1.0, 0.0)};
}

Window power_window() {  // covers 4^{+-15} with slack on both sides
  return Window(std::ldexp(1.0, -30) / 1.5, std::ldexp(1.0, 30) * 1.5);
}

}  // namespace

TEST_CASE("power triple context produces the expected four sequences") {
  auto ctx = make_triple_context(power_triple(), power_window());
  CHECK(ctx.seq_phi.k_min == -15);
  CHECK(ctx.seq_phi.k_max() == 15);
  CHECK(ctx.seq_composite.k_min == -15);
  CHECK(ctx.seq_phi0.k_min == -10);  // cube root steps by 8
  CHECK(ctx.seq_phi0.k_max() == 10);
  CHECK(ctx.seq_phi1.k_min == -10);
  const double log4 = std::log(4.0);
  for (int k = ctx.seq_composite.k_min; k <= ctx.seq_composite.k_max(); ++k) {
    CHECK(ctx.seq_composite.log_t(k) == Approx(k * log4).margin(1e-9));
    CHECK(ctx.log_ratio_at(k) == Approx(k * log4 / 3.0).margin(1e-9));
  }
}

TEST_CASE("octave counts of the power triple are flat at four") {
  auto ctx = make_triple_context(power_triple(), power_window());
  auto prof = condition_v_profile(ctx);
  CHECK(prof.max_count == 4);
  CHECK_FALSE(prof.degenerate_ratio);
  // interior octave [t_n, t_{n+1}] with boundaries hit on both ends: 4 members
  int fours = 0;
  for (int c : prof.counts) fours += c == 4;
  CHECK(fours >= 8);
}

TEST_CASE("octave counts of the log triple grow with the window") {
  auto small = make_triple_context(log_triple(), Window(1e-9, 1e9));
  auto large = make_triple_context(log_triple(), Window(1e-18, 1e18));
  auto ps = condition_v_profile(small);
  auto pl = condition_v_profile(large);
  CHECK(ps.max_count >= 12);
  CHECK(pl.max_count > ps.max_count);
  CHECK(pl.max_count >= 2 * ps.max_count - 8);  // roughly doubles with the exponent range
}

TEST_CASE("orientation flip preserves the ratio span, coincident weights degenerate") {
  auto ctx = make_triple_context(log_triple(), Window(1e-9, 1e9));
  auto p10 = condition_v_profile(ctx, RatioOrientation::Phi1OverPhi0);
  auto p01 = condition_v_profile(ctx, RatioOrientation::Phi0OverPhi1);
  CHECK(p10.ratio_log_span == Approx(p01.ratio_log_span).epsilon(1e-12));

  auto s = QuasiConcaveFn::power_log(0.5, 0.0, 0.0);
  auto flat = make_triple_context({s, s, s}, Window(1e-9, 1e9));
  auto pf = condition_v_profile(flat);
  CHECK(pf.degenerate_ratio);
}

TEST_CASE("sum against sup of block weights stays under the geometric bounds") {
  auto ctx = make_triple_context(power_triple(), power_window());
  const double bound_ratio = 2.7024143839193153;      // 1 / (1 - 4^{-1/3})
  const double bound_phi_ratio = 4.8473221018630726;  // 1 / (1 - 4^{-1/6})
  const double rs[] = {1.0, -1.0, 2.0};
  for (double r : rs) {
    for (auto v : {SumSupVariant::RatioOverTau, SumSupVariant::RatioOverZ})
      for (const auto& br : sum_sup_ratio(ctx, v, r)) CHECK(br.value <= bound_ratio + 1e-9);
    for (auto v : {SumSupVariant::PhiRatioOverTau, SumSupVariant::InvRatioPhiRatioOverZ})
      for (const auto& br : sum_sup_ratio(ctx, v, r)) CHECK(br.value <= bound_phi_ratio + 1e-9);
  }
  // composite points 4^k sit between tau boundaries 8^j, so blocks alternate
  // between pairs {3m-1, 3m} and singletons; a pair's terms differ by 4^{1/3}
  const double pair_value = 1.0 + std::pow(4.0, -1.0 / 3.0);
  int pairs = 0;
  for (const auto& br : sum_sup_ratio(ctx, SumSupVariant::RatioOverTau, 1.0)) {
    REQUIRE(br.cardinality <= 2);
    if (br.cardinality == 1) CHECK(br.value == Approx(1.0).epsilon(1e-12));
    if (br.cardinality == 2 && br.value == Approx(pair_value).epsilon(1e-9)) ++pairs;
  }
  CHECK(pairs >= 8);
}

TEST_CASE("block-couple split of an indicator hits the frozen reference value") {
  auto ctx = make_triple_context(power_triple(), power_window());
  StabilitySide side1(ctx, 1.0);
  std::vector<std::pair<int, double>> entries;
  for (int k = -6; k <= 6; ++k) entries.emplace_back(k, 1.0);
  SeqVector a(entries);
  // independently computed: sum_{k<=0} 4^{-k/3} + sum_{k>=1} 4^{-2k/3} over |k| <= 6
  const double near_part = 41.536215758789729;
  const double far_part = 0.65539291886821583;
  CHECK(k_block_couple(a, 1.0, side1.space0, side1.space1, side1.log_ratio) ==
        Approx(near_part + far_part).epsilon(1e-9));

  StabilitySide side_inf(ctx, inf_exponent);
  const double sup_split = 16.0 + std::pow(4.0, -2.0 / 3.0);
  CHECK(k_block_couple(a, 1.0, side_inf.space0, side_inf.space1, side_inf.log_ratio) ==
        Approx(sup_split).epsilon(1e-9));
}

TEST_CASE("equivalence samples always respect the embedding direction") {
  auto ctx = make_triple_context(log_triple(), Window(1e-9, 1e9));
  EquivalenceOptions opts;
  opts.samples = 60;
  opts.seed = 9;
  auto rep = equivalence_experiment(ctx, opts);
  CHECK(rep.samples_used >= 50);
  CHECK(rep.side_ratio.min >= 1.0 - 1e-9);  // inner index 1 dominates inner index inf
  CHECK(std::isfinite(rep.side_ratio.max));
  CHECK(rep.side0_vs_rhs.min > 0.0);
  CHECK(rep.side1_vs_rhs.min > 0.0);
}

TEST_CASE("equivalence experiment is deterministic in the seed") {
  auto ctx = make_triple_context(power_triple(), power_window());
  EquivalenceOptions opts;
  opts.samples = 25;
  opts.seed = 4242;
  auto r1 = equivalence_experiment(ctx, opts);
  auto r2 = equivalence_experiment(ctx, opts);
  CHECK(r1.side_ratio.min == r2.side_ratio.min);
  CHECK(r1.side_ratio.max == r2.side_ratio.max);
  CHECK(r1.side_ratio.median == r2.side_ratio.median);
  opts.seed = 4243;
  auto r3 = equivalence_experiment(ctx, opts);
  CHECK(r3.side_ratio.median != r1.side_ratio.median);
}

TEST_CASE("bounded octaves keep the divergence table flat") {
  const Window w = power_window();
  const Window schedule[] = {w, w.doubled()};
  auto rows = counterexample_search(power_triple(), schedule, 1.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].max_cardinality == 4);
  CHECK(rows[1].max_cardinality == 4);
  CHECK(rows[1].worst_ratio == Approx(rows[0].worst_ratio).epsilon(0.01));
}

TEST_CASE("unbounded octaves drag the divergence table upward") {
  const Window w(1e-9, 1e9);
  const Window schedule[] = {w, w.doubled()};
  auto rows = counterexample_search(log_triple(), schedule, 1.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].max_cardinality > rows[0].max_cardinality);
  CHECK(rows[1].worst_ratio > rows[0].worst_ratio * 1.2);
}
