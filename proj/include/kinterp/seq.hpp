#pragma once

#include "kinterp/common.hpp"

namespace kinterp {

// Finitely supported real sequence indexed by Z. Entries are kept sorted by
// index with exact zeros dropped.
class SeqVector {
 public:
  SeqVector() = default;
  explicit SeqVector(std::vector<std::pair<int, double>> entries) {
    std::sort(entries.begin(), entries.end());
    for (size_t i = 0; i + 1 < entries.size(); ++i)
      if (entries[i].first == entries[i + 1].first)
        throw std::invalid_argument("SeqVector: duplicate index");
    for (const auto& [i, v] : entries) {
      if (!std::isfinite(v)) throw std::invalid_argument("SeqVector: non-finite value");
      if (v != 0.0) entries_.emplace_back(i, v);
    }
  }
  static SeqVector unit(int i) { return SeqVector({{i, 1.0}}); }

  double operator[](int i) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const auto& e, int k) { return e.first < k; });
    return (it != entries_.end() && it->first == i) ? it->second : 0.0;
  }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  int support_min() const { return entries_.front().first; }
  int support_max() const { return entries_.back().first; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  SeqVector scaled(double c) const {
    SeqVector out;
    if (c == 0.0) return out;
    out.entries_ = entries_;
    for (auto& [i, v] : out.entries_) v *= c;
    return out;
  }
  template <class Pred>  // keeps entries whose index satisfies pred
  SeqVector filtered(Pred&& pred) const {
    SeqVector out;
    for (const auto& e : entries_)
      if (pred(e.first)) out.entries_.push_back(e);
    return out;
  }

 private:
  std::vector<std::pair<int, double>> entries_;
};

// Couple of weighted little-lq spaces over a common index window: (lq(v), lq(w)).
// Weights are stored as logs so windows like 4^{+-40} stay exact.
struct WeightedSeqCouple {
  double q = 1.0;
  int first_index = 0;
  std::vector<double> log_v;
  std::vector<double> log_w;

  WeightedSeqCouple(double q_, int first, std::vector<double> v, std::vector<double> w)
      : q(q_), first_index(first) {
    require_exponent(q_);
    if (v.size() != w.size() || v.empty())
      throw std::invalid_argument("WeightedSeqCouple: weight arrays must match and be nonempty");
    log_v.reserve(v.size());
    log_w.reserve(w.size());
    for (size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0) || !(w[i] > 0.0))
        throw std::invalid_argument("WeightedSeqCouple: weights must be > 0");
      log_v.push_back(std::log(v[i]));
      log_w.push_back(std::log(w[i]));
    }
  }
  static WeightedSeqCouple from_logs(double q_, int first, std::vector<double> lv,
                                     std::vector<double> lw) {
    WeightedSeqCouple c(q_, first, {1.0}, {1.0});
    if (lv.size() != lw.size() || lv.empty())
      throw std::invalid_argument("WeightedSeqCouple: weight arrays must match and be nonempty");
    c.log_v = std::move(lv);
    c.log_w = std::move(lw);
    return c;
  }

  int last_index() const { return first_index + static_cast<int>(log_v.size()) - 1; }
  bool in_window(int i) const { return i >= first_index && i <= last_index(); }
  double log_v_at(int i) const { return log_v[check(i)]; }
  double log_w_at(int i) const { return log_w[check(i)]; }
  double v_at(int i) const { return std::exp(log_v_at(i)); }
  double w_at(int i) const { return std::exp(log_w_at(i)); }

 private:
  size_t check(int i) const {
    if (!in_window(i)) throw window_error("index outside couple window");
    return static_cast<size_t>(i - first_index);
  }
};

// Nonnegative step function on [0, inf): level levels[j] on [breaks[j], breaks[j+1]),
// zero beyond the last breakpoint. breaks[0] must be 0.
class StepFunction {
 public:
  StepFunction(std::vector<double> breaks, std::vector<double> levels)
      : breaks_(std::move(breaks)), levels_(std::move(levels)) {
    if (breaks_.size() != levels_.size() + 1 || levels_.empty())
      throw std::invalid_argument("StepFunction: need n+1 breakpoints for n levels");
    if (breaks_.front() != 0.0)
      throw std::invalid_argument("StepFunction: domain starts at 0");
    for (size_t i = 0; i + 1 < breaks_.size(); ++i)
      if (!(breaks_[i + 1] > breaks_[i]))
        throw std::invalid_argument("StepFunction: breakpoints must increase");
    for (double l : levels_)
      if (!(l >= 0.0) || !std::isfinite(l))
        throw std::invalid_argument("StepFunction: levels must be finite and >= 0");
  }

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& levels() const { return levels_; }

  // pieces of the decreasing rearrangement: (level, measure) sorted by level desc
  std::vector<std::pair<double, double>> rearrangement_pieces() const {
    std::vector<std::pair<double, double>> ps;
    ps.reserve(levels_.size());
    for (size_t i = 0; i < levels_.size(); ++i)
      ps.emplace_back(levels_[i], breaks_[i + 1] - breaks_[i]);
    std::sort(ps.begin(), ps.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return ps;
  }

 private:
  std::vector<double> breaks_;
  std::vector<double> levels_;
};

}  // namespace kinterp
