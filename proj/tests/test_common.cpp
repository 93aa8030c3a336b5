#include <catch_amalgamated.hpp>

#include "kinterp/common.hpp"

using namespace kinterp;
using Catch::Approx;

TEST_CASE("exponent helpers") {
  CHECK(is_inf(inf_exponent));
  CHECK_FALSE(is_inf(2.0));
  CHECK_FALSE(is_inf(-std::numeric_limits<double>::infinity()));
  CHECK_NOTHROW(require_exponent(1.0));
  CHECK_NOTHROW(require_exponent(inf_exponent));
  CHECK_THROWS_AS(require_exponent(0.5), std::invalid_argument);
  CHECK_THROWS_AS(require_exponent(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("lp reductions agree between plain and log variants") {
  std::vector<double> v = {3.0, 4.0};
  std::vector<double> lv = {std::log(3.0), std::log(4.0)};
  CHECK(lp_norm(v, 1.0) == Approx(7.0).epsilon(1e-15));
  CHECK(lp_norm(v, 2.0) == Approx(5.0).epsilon(1e-15));
  CHECK(lp_norm(v, inf_exponent) == Approx(4.0).epsilon(1e-15));
  for (double p : {1.0, 2.0, 7.0, inf_exponent})
    CHECK(std::exp(lp_norm_log(lv, p)) == Approx(lp_norm(v, p)).epsilon(1e-13));
}

TEST_CASE("log-scale reduction survives magnitudes far outside double range") {
  std::vector<double> lv = {800.0, 799.0, -900.0};
  const double r = lp_norm_log(lv, 1.0);
  CHECK(r == Approx(800.0 + std::log1p(std::exp(-1.0))).epsilon(1e-14));
  CHECK(lp_norm_log(std::vector<double>{}, 2.0) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("geometric grids hit both endpoints") {
  auto g = geometric_grid(1e-4, 1e4, 9);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == Approx(1e-4).epsilon(1e-12));
  CHECK(g.back() == Approx(1e4).epsilon(1e-12));
  CHECK(g[4] == Approx(1.0).epsilon(1e-12));
  auto p = power_grid(2.0, -3, 3);
  REQUIRE(p.size() == 7);
  CHECK(p.front() == Approx(0.125).epsilon(1e-15));
  CHECK(p.back() == Approx(8.0).epsilon(1e-15));
}

TEST_CASE("rng streams are reproducible and bounded") {
  Rng a(123), b(123), c(124);
  bool all_equal = true;
  for (int i = 0; i < 200; ++i) {
    const double x = a.uniform();
    const double y = b.uniform();
    all_equal = all_equal && x == y;
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(all_equal);
  bool any_diff = false;
  for (int i = 0; i < 50; ++i) any_diff = any_diff || a.uniform() != c.uniform();
  CHECK(any_diff);

  Rng r(7);
  for (int i = 0; i < 200; ++i) {
    const int k = r.uniform_int(-3, 3);
    CHECK(k >= -3);
    CHECK(k <= 3);
    const double u = r.log_uniform(0.1, 10.0);
    CHECK(u >= 0.1 * (1 - 1e-12));
    CHECK(u <= 10.0 * (1 + 1e-12));
  }
}

TEST_CASE("verification report accumulates observations by name") {
  VerificationReport rep;
  rep.observe("alpha", 1.0);
  rep.observe("beta", 2.0);
  CHECK(rep.passed());
  CHECK(rep.observation("beta") == 2.0);
  CHECK_THROWS_AS(rep.observation("gamma"), std::out_of_range);
}
