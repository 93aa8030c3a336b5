#include <catch_amalgamated.hpp>

#include "kinterp/discretize.hpp"

using namespace kinterp;
using Catch::Approx;

namespace {
Window pow2_window(int e) {
  return Window(std::ldexp(1.0, -e), std::ldexp(1.0, e));
}
}  // namespace

TEST_CASE("square root at ratio 2 lands on powers of four") {
  auto s = QuasiConcaveFn::power_log(0.5, 0.0, 0.0);
  auto seq = build_discretizing_sequence(s, pow2_window(81), 2.0);
  CHECK(seq.k_min == -40);
  CHECK(seq.k_max() == 40);
  const double log4 = std::log(4.0);
  for (int k = seq.k_min; k <= seq.k_max(); ++k) {
    CHECK(seq.log_t(k) == Approx(k * log4).margin(1e-9));
    if (k < seq.k_max()) CHECK(seq.zone(k) == Zone::Z1);
  }
  auto rep = verify_discretizing_sequence(seq);
  CHECK(rep.passed());
  CHECK(rep.observation("max_tightness_slack") <= 1e-9);
}

TEST_CASE("cube root at ratio 2 lands on powers of eight, zone follows the tight side") {
  auto f = QuasiConcaveFn::power_log(1.0 / 3.0, 0.0, 0.0);
  auto seq = build_discretizing_sequence(f, pow2_window(40), 2.0);
  const double log8 = std::log(8.0);
  for (int k = seq.k_min; k <= seq.k_max(); ++k)
    CHECK(seq.log_t(k) == Approx(k * log8).margin(1e-9));
  for (int k = seq.k_min; k < seq.k_max(); ++k) CHECK(seq.zone(k) == Zone::Z1);

  // mirrored exponent: the t/phi side is the tight one
  auto g = QuasiConcaveFn::power_log(2.0 / 3.0, 0.0, 0.0);
  auto seq2 = build_discretizing_sequence(g, pow2_window(40), 2.0);
  for (int k = seq2.k_min; k <= seq2.k_max(); ++k)
    CHECK(seq2.log_t(k) == Approx(k * log8).margin(1e-9));
  for (int k = seq2.k_min; k < seq2.k_max(); ++k) CHECK(seq2.zone(k) == Zone::Z2);
}

TEST_CASE("ratio sqrt(2) halves the step") {
  auto s = QuasiConcaveFn::power_log(0.5, 0.0, 0.0);
  auto seq = build_discretizing_sequence(s, pow2_window(20), std::sqrt(2.0));
  const double log2 = std::log(2.0);
  for (int k = seq.k_min; k <= seq.k_max(); ++k)
    CHECK(seq.log_t(k) == Approx(k * log2).margin(1e-9));
  CHECK(verify_discretizing_sequence(seq).passed());
}

TEST_CASE("verifier rejects undergrown and overgrown point sets") {
  auto s = QuasiConcaveFn::power_log(0.5, 0.0, 0.0);

  // for t^{1/4} on 4^k the t/phi side grows by 4^{3/4} > 2 but phi only by sqrt(2)
  auto quarter = QuasiConcaveFn::power_log(0.25, 0.0, 0.0);
  std::vector<double> too_dense;
  for (int k = -4; k <= 4; ++k) too_dense.push_back(std::pow(4.0, k));
  auto rep = verify_discretizing_sequence(quarter, too_dense, 2.0);
  REQUIRE_FALSE(rep.passed());
  for (const auto& v : rep.violations) CHECK(v.check == "phi_strongly_increasing");

  std::vector<double> too_sparse;  // both sides grow by 4 > 2: no zone fits
  for (int k = -3; k <= 3; ++k) too_sparse.push_back(std::pow(16.0, k));
  rep = verify_discretizing_sequence(s, too_sparse, 2.0);
  REQUIRE_FALSE(rep.passed());
  for (const auto& v : rep.violations) CHECK(v.check == "zone_assignable");

  // same points with explicit zones: the zone bound is what fails
  std::vector<Zone> zones(too_sparse.size() - 1, Zone::Z1);
  rep = verify_discretizing_sequence(s, too_sparse, 2.0, &zones);
  REQUIRE_FALSE(rep.passed());
  for (const auto& v : rep.violations) CHECK(v.check == "zone_z1_bound");
}

TEST_CASE("build rejects functions that fail the window checks") {
  auto flat = QuasiConcaveFn::table({{1e-8, 1e-8}, {1.0, 1.0}, {1e8, 1.0}});
  CHECK_THROWS_AS(build_discretizing_sequence(flat, Window(1e-6, 1e6), 2.0),
                  std::invalid_argument);
  auto s = QuasiConcaveFn::power_log(0.5, 0.0, 0.0);
  CHECK_THROWS_AS(build_discretizing_sequence(s, Window(0.5, 2.0), 2.0), std::invalid_argument);
}

TEST_CASE("bisection tolerance refinement moves points by less than 1e-10") {
  auto f = QuasiConcaveFn::power_log(0.4, 0.6, 0.2);
  BuildOptions coarse, fine;
  coarse.log_bisect_tol = 1e-12;
  fine.log_bisect_tol = 1e-14;
  auto a = build_discretizing_sequence(f, Window(1e-10, 1e10), 2.0, coarse);
  auto b = build_discretizing_sequence(f, Window(1e-10, 1e10), 2.0, fine);
  REQUIRE(a.k_min == b.k_min);
  REQUIRE(a.size() == b.size());
  for (int k = a.k_min; k <= a.k_max(); ++k)
    CHECK(std::abs(a.log_t(k) - b.log_t(k)) <= 1e-10);
}

TEST_CASE("random admissible functions build verifiable sequences") {
  Rng rng(77);
  auto probe = default_probe_grid();
  int built = 0;
  while (built < 10) {
    QuasiConcaveFn f = QuasiConcaveFn::power_log_unchecked(
        rng.uniform(0.25, 0.75), rng.uniform(0.0, 0.8), rng.uniform(0.0, 0.8));
    if (!verify_quasi_concave(f, probe).passed()) continue;
    ++built;
    auto seq = build_discretizing_sequence(f, Window(1e-12, 1e12), 2.0);
    auto rep = verify_discretizing_sequence(seq);
    CHECK(rep.passed());
    CHECK(rep.observation("max_tightness_slack") <= 1e-9);
    // each step multiplies t by at least rho^2: both factors grow by rho
    const double floor_step = 2.0 * std::log(2.0) - 1e-9;
    for (int k = seq.k_min; k < seq.k_max(); ++k)
      CHECK(seq.log_t(k + 1) - seq.log_t(k) >= floor_step);
  }
}

TEST_CASE("block partition groups third-octave ratios three per block") {
  auto s = QuasiConcaveFn::power_log(0.5, 0.0, 0.0);
  auto outer = build_discretizing_sequence(s, pow2_window(21), 2.0);  // t_k = 4^k, |k| <= 10
  REQUIRE(outer.k_min == -10);
  const double log4 = std::log(4.0);
  std::vector<std::pair<int, double>> ratios;
  for (int i = -30; i <= 31; ++i) ratios.emplace_back(i, i * log4 / 3.0);
  auto bp = block_partition_log(outer, ratios);
  CHECK(bp.block_lo() == -9);
  CHECK(bp.block_hi() == 10);
  for (int k = -9; k <= 10; ++k) {
    const auto* members = bp.block(k);
    REQUIRE(members != nullptr);
    CHECK(*members == std::vector<int>{3 * k - 2, 3 * k - 1, 3 * k});
  }
  // the lower window edge and anything above the top boundary stay out
  CHECK(bp.unassigned == std::vector<int>{-30, 31});
}

TEST_CASE("block partition agrees with a direct boundary scan") {
  auto s = QuasiConcaveFn::power_log(0.5, 0.0, 0.0);
  auto outer = build_discretizing_sequence(s, pow2_window(21), 2.0);
  std::vector<std::pair<int, double>> ratios;
  const double log3 = std::log(3.0);
  for (int i = -8; i <= 8; ++i) ratios.emplace_back(i, i * log3);
  auto bp = block_partition_log(outer, ratios);
  for (const auto& [i, lr] : ratios) {
    int expected = outer.k_min;
    bool found = false;
    for (int k = outer.k_min + 1; k <= outer.k_max(); ++k) {
      if (lr > outer.log_t(k - 1) + 1e-9 && lr <= outer.log_t(k) + 1e-9) {
        expected = k;
        found = true;
        break;
      }
    }
    REQUIRE(found);
    CHECK(bp.block_of.at(i) == expected);
  }
}

TEST_CASE("plain-ratio partition wrapper rejects non-positive ratios") {
  auto s = QuasiConcaveFn::power_log(0.5, 0.0, 0.0);
  auto outer = build_discretizing_sequence(s, pow2_window(21), 2.0);
  std::vector<std::pair<int, double>> bad = {{0, -1.0}};
  CHECK_THROWS_AS(block_partition(outer, bad), std::domain_error);
  std::vector<std::pair<int, double>> good = {{0, 2.0}};
  auto bp = block_partition(outer, good);
  CHECK(bp.block_of.at(0) == 1);  // 2.0 lies in (1, 4]
}
