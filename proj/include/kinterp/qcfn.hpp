#pragma once

#include <array>
#include <memory>
#include <variant>

#include "kinterp/common.hpp"

namespace kinterp {

// Parameter functions for the interpolation method: positive, non-decreasing,
// with t/phi(t) non-decreasing. All evaluation happens in log-log coordinates
// so windows like [1e-16, 1e16] never overflow.
class QuasiConcaveFn {
 public:
  enum class Kind { PowerLog, Composite, Table };

  struct PowerLogSpec {
    double theta, a, b;
  };
  struct TableSpec {
    std::vector<double> log_t;    // strictly increasing
    std::vector<double> log_phi;  // positive ordinates, stored as logs
  };
  struct CompositeSpec {
    std::shared_ptr<const QuasiConcaveFn> phi, phi0, phi1;
  };

  Kind kind() const { return impl_->kind; }

  double log_eval(double x) const {
    switch (impl_->kind) {
      case Kind::PowerLog: {
        const auto& s = std::get<PowerLogSpec>(impl_->spec);
        return s.theta * x + s.a * std::log(log_e_plus_exp(x)) -
               s.b * std::log(log_e_plus_exp(-x));
      }
      case Kind::Composite: {
        const auto& s = std::get<CompositeSpec>(impl_->spec);
        const double p0 = s.phi0->log_eval(x);
        const double p1 = s.phi1->log_eval(x);
        return p0 + s.phi->log_eval(p1 - p0);
      }
      case Kind::Table: {
        const auto& s = std::get<TableSpec>(impl_->spec);
        return table_eval(s, x);
      }
    }
    throw std::logic_error("unreachable");
  }

  double operator()(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("eval: need finite t > 0");
    return std::exp(log_eval(std::log(t)));
  }
  double eval(double t) const { return (*this)(t); }

  const PowerLogSpec* as_power_log() const {
    return std::get_if<PowerLogSpec>(&impl_->spec);
  }
  const TableSpec* as_table() const { return std::get_if<TableSpec>(&impl_->spec); }
  const CompositeSpec* as_composite() const {
    return std::get_if<CompositeSpec>(&impl_->spec);
  }

  // Unchecked factories build the representation only; checked ones reject
  // parameters that break monotonicity of phi or t/phi.
  static QuasiConcaveFn power_log_unchecked(double theta, double a, double b);
  static QuasiConcaveFn power_log(double theta, double a, double b);
  static QuasiConcaveFn table_unchecked(std::vector<std::array<double, 2>> points);
  static QuasiConcaveFn table(std::vector<std::array<double, 2>> points);

  friend QuasiConcaveFn compose_parameter(const QuasiConcaveFn&, const QuasiConcaveFn&,
                                          const QuasiConcaveFn&);

 private:
  struct Impl {
    Kind kind;
    std::variant<PowerLogSpec, CompositeSpec, TableSpec> spec;
  };
  explicit QuasiConcaveFn(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  // log(e + e^x), stable at both ends
  static double log_e_plus_exp(double x) {
    if (x > 1.0) return x + std::log1p(std::exp(1.0 - x));
    return 1.0 + std::log1p(std::exp(x - 1.0));
  }

  static double table_eval(const TableSpec& s, double x) {
    const auto& xs = s.log_t;
    const auto& ys = s.log_phi;
    const size_t n = xs.size();
    size_t j;  // segment [j, j+1]; end segments extend linearly past the table
    if (x <= xs.front())
      j = 0;
    else if (x >= xs.back())
      j = n - 2;
    else
      j = static_cast<size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    const double slope = (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);
    return ys[j] + slope * (x - xs[j]);
  }

  std::shared_ptr<const Impl> impl_;
};

// Checks phi non-decreasing and phi(t)/t non-increasing on adjacent grid pairs,
// to relative tolerance rel_tol.
inline VerificationReport verify_quasi_concave(const QuasiConcaveFn& f,
                                               std::span<const double> grid,
                                               double rel_tol = 1e-12) {
  if (grid.size() < 3) throw std::invalid_argument("verify_quasi_concave: grid needs >= 3 points");
  VerificationReport rep;
  double prev_x = 0, prev_lp = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (!(t > 0.0)) throw std::domain_error("verify_quasi_concave: grid values must be > 0");
    const double x = std::log(t);
    if (i > 0 && !(x > prev_x))
      throw std::invalid_argument("verify_quasi_concave: grid must be strictly increasing");
    const double lp = f.log_eval(x);
    if (!std::isfinite(lp)) {
      rep.violations.push_back({"finite_positive", static_cast<long>(i), lp, 0.0, 0.0});
    } else if (i > 0) {
      // phi(s) <= phi(t) up to rel_tol, in logs
      if (lp < prev_lp - rel_tol)
        rep.violations.push_back(
            {"phi_nondecreasing", static_cast<long>(i), lp, prev_lp, prev_lp - lp});
      // phi(t)/t <= phi(s)/s up to rel_tol
      const double d = (lp - x) - (prev_lp - prev_x);
      if (d > rel_tol)
        rep.violations.push_back(
            {"phi_over_t_nonincreasing", static_cast<long>(i), lp - x, prev_lp - prev_x, d});
    }
    prev_x = x;
    prev_lp = lp;
  }
  return rep;
}

// Probes the window edges for the four degeneracy limits. All four values must
// be <= eps_deg for the function to count as non-degenerate on the window.
inline VerificationReport verify_nondegenerate(const QuasiConcaveFn& f, const Window& w,
                                               double eps_deg = 1e-3) {
  VerificationReport rep;
  const double xl = w.log_min(), xr = w.log_max();
  const double pl = f.log_eval(xl), pr = f.log_eval(xr);
  const struct {
    const char* name;
    double log_value;
  } probes[] = {
      {"phi_at_tmin", pl},
      {"tmin_over_phi", xl - pl},
      {"phi_over_t_at_tmax", pr - xr},
      {"inv_phi_at_tmax", -pr},
  };
  const double log_eps = std::log(eps_deg);
  for (long i = 0; i < 4; ++i) {
    const double v = std::exp(probes[i].log_value);
    rep.observe(probes[i].name, v);
    if (!(probes[i].log_value <= log_eps))
      rep.violations.push_back({probes[i].name, i, v, eps_deg, v - eps_deg});
  }
  return rep;
}

inline std::vector<double> default_probe_grid() { return power_grid(2.0, -40, 40); }

inline QuasiConcaveFn QuasiConcaveFn::power_log_unchecked(double theta, double a, double b) {
  if (!std::isfinite(theta) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("power_log: parameters must be finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::PowerLog;
  impl->spec = PowerLogSpec{theta, a, b};
  return QuasiConcaveFn(std::move(impl));
}

inline QuasiConcaveFn QuasiConcaveFn::power_log(double theta, double a, double b) {
  QuasiConcaveFn f = power_log_unchecked(theta, a, b);
  auto grid = default_probe_grid();
  if (!verify_quasi_concave(f, grid).passed())
    throw std::invalid_argument("power_log: parameters fail quasi-concavity");
  return f;
}

inline QuasiConcaveFn QuasiConcaveFn::table_unchecked(std::vector<std::array<double, 2>> points) {
  if (points.size() < 2) throw std::invalid_argument("table: need >= 2 points");
  TableSpec s;
  s.log_t.reserve(points.size());
  s.log_phi.reserve(points.size());
  for (const auto& [t, phi] : points) {
    if (!(t > 0.0) || !(phi > 0.0))
      throw std::invalid_argument("table: abscissae and ordinates must be > 0");
    if (!s.log_t.empty() && !(std::log(t) > s.log_t.back()))
      throw std::invalid_argument("table: abscissae must be strictly increasing");
    s.log_t.push_back(std::log(t));
    s.log_phi.push_back(std::log(phi));
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Table;
  impl->spec = std::move(s);
  return QuasiConcaveFn(std::move(impl));
}

inline QuasiConcaveFn QuasiConcaveFn::table(std::vector<std::array<double, 2>> points) {
  QuasiConcaveFn f = table_unchecked(std::move(points));
  // slope within [0, 1] per segment is exactly quasi-concavity for log-log
  // linear interpolants (end segments extend with the same slopes)
  const auto& s = std::get<TableSpec>(f.impl_->spec);
  for (size_t j = 0; j + 1 < s.log_t.size(); ++j) {
    const double slope = (s.log_phi[j + 1] - s.log_phi[j]) / (s.log_t[j + 1] - s.log_t[j]);
    if (slope < -1e-12 || slope > 1.0 + 1e-12)
      throw std::invalid_argument("table: segment slope outside [0, 1]");
  }
  return f;
}

// phi0(t) * phi(phi1(t)/phi0(t)). Inputs must individually pass the probe-grid
// check; the result is checked as well (it is again quasi-concave whenever the
// inputs are).
inline QuasiConcaveFn compose_parameter(const QuasiConcaveFn& phi, const QuasiConcaveFn& phi0,
                                        const QuasiConcaveFn& phi1) {
  auto grid = default_probe_grid();
  for (const auto* f : {&phi, &phi0, &phi1})
    if (!verify_quasi_concave(*f, grid).passed())
      throw std::invalid_argument("compose_parameter: input fails quasi-concavity");
  auto impl = std::make_shared<QuasiConcaveFn::Impl>();
  impl->kind = QuasiConcaveFn::Kind::Composite;
  impl->spec = QuasiConcaveFn::CompositeSpec{std::make_shared<const QuasiConcaveFn>(phi),
                                             std::make_shared<const QuasiConcaveFn>(phi0),
                                             std::make_shared<const QuasiConcaveFn>(phi1)};
  QuasiConcaveFn out((std::shared_ptr<const QuasiConcaveFn::Impl>(std::move(impl))));
  if (!verify_quasi_concave(out, grid).passed())
    throw std::invalid_argument("compose_parameter: composite fails quasi-concavity");
  return out;
}

// s_phi(t) = sup_u phi(ut)/phi(u), supremum taken over the probe grid.
inline double dilation_function(const QuasiConcaveFn& f, double t,
                                std::span<const double> u_grid) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("dilation_function: need t > 0");
  if (u_grid.empty()) throw std::invalid_argument("dilation_function: empty grid");
  const double log_t = std::log(t);
  double best = -std::numeric_limits<double>::infinity();
  for (double u : u_grid) {
    if (!(u > 0.0)) throw std::domain_error("dilation_function: grid values must be > 0");
    const double xu = std::log(u);
    best = std::max(best, f.log_eval(xu + log_t) - f.log_eval(xu));
  }
  return std::exp(best);
}

struct QuasiPowerCheck {
  bool quasi_power;
  double s_at_tmin;
  double s_at_tmax;
};

// Probes s_phi at the window edges: quasi-power means s_phi -> 0 at 0 and
// s_phi -> inf at inf, witnessed here by s(t_min) <= edge_threshold and
// s(t_max) >= 1/edge_threshold.
inline QuasiPowerCheck is_quasi_power(const QuasiConcaveFn& f, const Window& w,
                                      double edge_threshold = 0.1, int grid_points = 241) {
  auto grid = geometric_grid(w.t_min, w.t_max, grid_points);
  QuasiPowerCheck c{};
  c.s_at_tmin = dilation_function(f, w.t_min, grid);
  c.s_at_tmax = dilation_function(f, w.t_max, grid);
  c.quasi_power = c.s_at_tmin <= edge_threshold && c.s_at_tmax >= 1.0 / edge_threshold;
  return c;
}

}  // namespace kinterp
