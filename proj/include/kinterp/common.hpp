#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kinterp {

inline constexpr double inf_exponent = std::numeric_limits<double>::infinity();

inline bool is_inf(double p) { return std::isinf(p) && p > 0; }

inline void require_exponent(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("exponent must satisfy 1 <= p <= inf");
}

// Thrown when a supported index falls outside the discretization window.
struct window_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Window {
  double t_min;
  double t_max;

  Window(double lo, double hi) : t_min(lo), t_max(hi) {
    if (!(lo > 0.0) || !(lo < 1.0) || !(hi > 1.0) || !std::isfinite(hi))
      throw std::domain_error("window requires 0 < t_min < 1 < t_max");
  }
  double log_min() const { return std::log(t_min); }
  double log_max() const { return std::log(t_max); }
  // Doubles the window in log scale.
  Window doubled() const { return Window(t_min * t_min, t_max * t_max); }
};

// (sum_i v_i^p)^{1/p}, max for p = inf. Scaled to avoid overflow.
inline double lp_norm(std::span<const double> values, double p) {
  require_exponent(p);
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  if (is_inf(p)) return m;
  double acc = 0.0;
  for (double v : values) acc += std::pow(std::abs(v) / m, p);
  return m * std::pow(acc, 1.0 / p);
}

// Same reduction over log-magnitudes; returns log of the norm, -inf for empty input.
inline double lp_norm_log(std::span<const double> log_values, double p) {
  require_exponent(p);
  if (log_values.empty()) return -std::numeric_limits<double>::infinity();
  double m = -std::numeric_limits<double>::infinity();
  for (double lv : log_values) m = std::max(m, lv);
  if (m == -std::numeric_limits<double>::infinity() || is_inf(p)) return m;
  double acc = 0.0;
  for (double lv : log_values) acc += std::exp(p * (lv - m));
  return m + std::log(acc) / p;
}

// Geometric grid, endpoints included, strictly increasing, n >= 2.
inline std::vector<double> geometric_grid(double t_min, double t_max, int n) {
  if (!(t_min > 0.0) || !(t_max > t_min) || n < 2)
    throw std::invalid_argument("geometric_grid: need 0 < t_min < t_max and n >= 2");
  std::vector<double> g(n);
  const double lo = std::log(t_min), hi = std::log(t_max);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  g.front() = t_min;
  g.back() = t_max;
  return g;
}

// {base^k : k_min <= k <= k_max}
inline std::vector<double> power_grid(double base, int k_min, int k_max) {
  if (!(base > 1.0) || k_max < k_min) throw std::invalid_argument("power_grid: bad arguments");
  std::vector<double> g;
  g.reserve(static_cast<size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) g.push_back(std::pow(base, k));
  return g;
}

struct Violation {
  std::string check;
  long index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct VerificationReport {
  std::vector<Violation> violations;
  // named probe values, insertion-ordered for deterministic reports
  std::vector<std::pair<std::string, double>> observations;

  bool passed() const { return violations.empty(); }
  void observe(std::string name, double value) {
    observations.emplace_back(std::move(name), value);
  }
  double observation(const std::string& name) const {
    for (const auto& [k, v] : observations)
      if (k == name) return v;
    throw std::out_of_range("no observation named " + name);
  }
};

// Deterministic RNG. Double extraction is pinned to the raw 64-bit stream so
// reports are reproducible byte-for-byte for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double log_uniform(double a, double b) {
    return std::exp(uniform(std::log(a), std::log(b)));
  }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (static_cast<double>(hi) - lo + 1));
  }
  bool coin() { return (gen_() & 1u) != 0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kinterp
