#include "condest/estimators.hpp"

#include <cmath>
#include <limits>

#include "condest/error.hpp"
#include "condest/target.hpp"

namespace condest {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must be in (0,1]");
}

std::uint64_t ceil_u64(double v) {
  if (!(v < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace

Estimate Estimate::of(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("estimate must be positive");
  Estimate e;
  e.too_low_ = false;
  e.value_ = v;
  return e;
}

double Estimate::value() const {
  if (too_low_) throw std::logic_error("value() on a TooLow estimate");
  return value_;
}

std::uint64_t saturation_successes(double delta, double m_const) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must be in (0,1)");
  return ceil_u64(m_const / (delta * delta));
}

Estimate saturation_aware_est(double a, const std::function<bool()>& indicator, double delta,
                              double m_const) {
  if (!(a > 0.0)) throw ValidationError("saturation threshold must be positive");
  const std::uint64_t m_target = saturation_successes(delta, m_const);
  const auto l_cap = static_cast<std::uint64_t>(std::floor(6.0 * static_cast<double>(m_target) / a));
  std::uint64_t m = 0;
  std::uint64_t trials = 0;
  while (m < m_target && trials < l_cap) {
    ++trials;
    if (indicator()) ++m;
  }
  if (m < m_target) return Estimate::too_low();
  return Estimate::of(static_cast<double>(m_target) / static_cast<double>(trials));
}

double est_expected_beta(OracleSession& s, const Config& cfg, Element x, double alpha) {
  check_alpha(alpha);
  const std::uint64_t outer = cfg.k.beta_outer;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < outer; ++i) {
    FilterUnion filter{s.fresh_seed(), alpha, x, {}};
    for (std::uint64_t j = 0; j < cfg.k.beta_inner_cap; ++j) {
      auto y = s.sample_conditional(filter);
      if (!y || *y == x) break;
      if (target_test_gross(s, x, *y, cfg.target)) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(outer);
}

SingleBetaConstants single_beta_constants(double delta, double m_const) {
  if (!(delta > 0.0 && delta < 0.25)) throw ValidationError("delta must be in (0, 1/4)");
  return {ceil_u64(m_const / (delta * delta)), ceil_u64(3.0 * std::log(6.0 / delta) / delta)};
}

double est_single_beta(OracleSession& s, const Config& cfg, Element x, double delta,
                       const FilterUnion& filter, VxObject& vx) {
  const auto k = single_beta_constants(delta, cfg.k.single_beta_const);
  std::uint64_t m = 0;
  for (std::uint64_t i = 0; i < k.outer; ++i) {
    for (std::uint64_t j = 0; j < k.inner; ++j) {
      auto y = s.sample_conditional(filter);
      if (!y || *y == x) break;
      if (vx_query(s, cfg.target, vx, *y)) {
        ++m;
        break;
      }
    }
  }
  return static_cast<double>(m) / static_cast<double>(k.outer);
}

double h_threshold(double eps) { return 8.0 * std::log(1.0 / eps) + 100.0; }

double h_of(double beta, double eps) {
  const double t = h_threshold(eps);
  if (beta >= 1.0) return t;
  return std::min(beta / (1.0 - beta), t);
}

HBetaConstants h_beta_constants(const Config& cfg) {
  const double eps = cfg.eps;
  HBetaConstants k;
  k.t = h_threshold(eps);
  k.m1 = std::max<std::uint64_t>(1, ceil_u64(cfg.k.h_m1_const / (eps * eps)));
  k.m2 = std::max(1, static_cast<int>(std::ceil(cfg.k.h_m2_const * std::log(static_cast<double>(k.m1)))));
  k.delta = eps / (cfg.k.h_delta_a * std::log(1.0 / eps) + cfg.k.h_delta_b);
  k.delta = std::min(k.delta, 0.2);
  const double q = std::floor(25.0 * k.m2 * std::log(6.0 / k.delta) / std::pow(k.delta, 3));
  k.q = q < 1.8e19 ? static_cast<std::uint64_t>(q) : std::numeric_limits<std::uint64_t>::max();
  return k;
}

HBetaResult est_expected_h_beta(OracleSession& s, const Config& cfg, Element x, double alpha) {
  check_alpha(alpha);
  HBetaResult r;
  r.constants = h_beta_constants(cfg);
  const auto& k = r.constants;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < k.m1; ++i) {
    FilterUnion filter{s.fresh_seed(), alpha, x, {}};
    VxObject vx = initialize_new_vx(x, k.q);
    const double beta_hat =
        median_of(k.m2, [&] { return est_single_beta(s, cfg, x, k.delta, filter, vx); });
    sum += h_of(beta_hat, cfg.eps);
    r.over_budget = r.over_budget || vx.over_budget();
  }
  r.value = sum / static_cast<double>(k.m1);
  return r;
}

}  // namespace condest
