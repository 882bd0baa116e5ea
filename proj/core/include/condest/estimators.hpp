#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "condest/oracle.hpp"
#include "condest/profile.hpp"
#include "condest/vx.hpp"

namespace condest {

// Either a positive finite value or the TooLow sentinel. TooLow orders below
// every value so medians can mix the two.
class Estimate {
 public:
  static Estimate too_low() { return Estimate(); }
  static Estimate of(double v);

  bool is_too_low() const { return too_low_; }
  double value() const;
  double value_or(double fallback) const { return too_low_ ? fallback : value_; }

  friend bool operator<(const Estimate& a, const Estimate& b) {
    if (a.too_low_ || b.too_low_) return a.too_low_ && !b.too_low_;
    return a.value_ < b.value_;
  }
  friend bool operator==(const Estimate& a, const Estimate& b) {
    return a.too_low_ == b.too_low_ && (a.too_low_ || a.value_ == b.value_);
  }

 private:
  Estimate() = default;
  bool too_low_ = true;
  double value_ = 0.0;
};

// Median of m values produced by f (lower median for even m).
template <class F>
auto median_of(int m, F&& f) -> decltype(f()) {
  if (m < 1) throw std::invalid_argument("median_of needs m >= 1");
  std::vector<decltype(f())> v;
  v.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) v.push_back(f());
  auto mid = v.begin() + (m - 1) / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Draws bits until M = ceil(m_const / delta^2) successes or L = floor(6M/a)
// trials; returns M / trials, or TooLow if the trial cap is hit first.
Estimate saturation_aware_est(double a, const std::function<bool()>& indicator, double delta,
                              double m_const = 48.0);
std::uint64_t saturation_successes(double delta, double m_const = 48.0);

// Average of beta_outer indicators, each over a fresh filter: hit x -> 0,
// gross target test accepts -> 1, inner cap reached -> 0.
double est_expected_beta(OracleSession& s, const Config& cfg, Element x, double alpha);

struct SingleBetaConstants {
  std::uint64_t outer = 0;
  std::uint64_t inner = 0;
};
SingleBetaConstants single_beta_constants(double delta, double m_const = 8.0);

// Estimates beta for one realized (filter, vx) pair.
double est_single_beta(OracleSession& s, const Config& cfg, Element x, double delta,
                       const FilterUnion& filter, VxObject& vx);

double h_threshold(double eps);
// min(beta / (1 - beta), T) with T = 8 ln(1/eps) + 100.
double h_of(double beta, double eps);

struct HBetaConstants {
  std::uint64_t m1 = 0;
  int m2 = 0;
  double delta = 0.0;
  std::uint64_t q = 0;
  double t = 0.0;
};
HBetaConstants h_beta_constants(const Config& cfg);

struct HBetaResult {
  double value = 0.0;
  HBetaConstants constants;
  bool over_budget = false;
};

// Averages h of median single-beta estimates over m1 fresh (filter, vx) draws.
HBetaResult est_expected_h_beta(OracleSession& s, const Config& cfg, Element x, double alpha);

}  // namespace condest
