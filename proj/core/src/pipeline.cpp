#include "condest/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "condest/error.hpp"
#include "condest/search.hpp"
#include "condest/target.hpp"

namespace condest {

namespace {

std::map<std::string, std::uint64_t> diff(const std::map<std::string, std::uint64_t>& after,
                                          const std::map<std::string, std::uint64_t>& before) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [k, v] : after) {
    auto it = before.find(k);
    const std::uint64_t d = v - (it == before.end() ? 0 : it->second);
    if (d > 0) out[k] = d;
  }
  return out;
}

Estimate median(std::vector<Estimate> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

const char* to_string(Branch b) {
  switch (b) {
    case Branch::Direct: return "direct";
    case Branch::BetaPath: return "beta-path";
    case Branch::TooLow: return "too-low";
  }
  return "?";
}

Estimate preamble_w(OracleSession& s, const Config& cfg, Element x) {
  const double a0 = cfg.c - cfg.target.eta;
  if (!(a0 > 0.0)) throw ValidationError("eta must be below c");
  auto w_oracle = [&] {
    const Element y = s.sample();
    return y == x || target_test(s, x, y, cfg.target);
  };
  return median_of(cfg.k.preamble_medians,
                   [&] { return saturation_aware_est(a0, w_oracle, 1.0 / 3.0, cfg.k.sat_const); });
}

Estimate preamble_p(OracleSession& s, const Config& cfg, Element x, const Estimate& w) {
  if (w.is_too_low()) return w;
  auto p_oracle = [&] { return s.sample() == x; };
  return median_of(cfg.k.preamble_medians, [&] {
    return saturation_aware_est(w.value() / 9.0, p_oracle, cfg.eps, cfg.k.sat_const);
  });
}

Estimate preamble_s(OracleSession& s, const Config& cfg, Element x, const Estimate& w) {
  if (w.is_too_low()) return w;
  auto s_oracle = [&] {
    const Element y = s.sample();
    return y != x && target_test(s, x, y, cfg.target);
  };
  return median_of(cfg.k.preamble_medians, [&] {
    return saturation_aware_est(w.value() / 9.0, s_oracle, cfg.eps / 6.0, cfg.k.sat_const);
  });
}

PreambleResult preamble(OracleSession& s, const Config& cfg, Element x) {
  PreambleResult r;
  r.w_hat = preamble_w(s, cfg, x);
  r.s_hat = preamble_s(s, cfg, x, r.w_hat);
  r.p_hat = preamble_p(s, cfg, x, r.w_hat);
  return r;
}

EstimationReport estimate_single(OracleSession& s, const Config& cfg, Element x) {
  if (x < 1 || x > s.dist().size()) throw ValidationError("element id out of range");
  const auto before = s.counters();
  const int m = cfg.k.top_medians;
  EstimationReport rep;

  // The s_x half of each preamble draws fresh samples and is only read when
  // the mu(x) median is TooLow, so it runs on demand.
  std::vector<Estimate> ws;
  {
    auto ph = s.phase("preamble");
    std::vector<Estimate> ps;
    for (int i = 0; i < m; ++i) {
      ws.push_back(preamble_w(s, cfg, x));
      ps.push_back(preamble_p(s, cfg, x, ws.back()));
    }
    rep.p_hat = median(ps);
    if (rep.p_hat.is_too_low()) {
      std::vector<Estimate> ss;
      for (const auto& w : ws) ss.push_back(preamble_s(s, cfg, x, w));
      rep.s_hat = median(ss);
    }
  }

  if (!rep.p_hat.is_too_low()) {
    rep.branch = Branch::Direct;
    rep.estimate = rep.p_hat;
  } else if (rep.s_hat->is_too_low()) {
    rep.branch = Branch::TooLow;
  } else {
    rep.branch = Branch::BetaPath;
    {
      auto ph = s.phase("find-alpha");
      const int e = median_of(m, [&] {
        auto fa = find_good_alpha(s, cfg, x);
        rep.comparator_calls += fa.comparator_calls;
        return fa.exponent;
      });
      rep.alpha_exponent = e;
      rep.alpha = std::ldexp(1.0, -e);
    }
    {
      auto ph = s.phase("h-beta");
      rep.b_hat = median_of(m, [&] {
        auto hb = est_expected_h_beta(s, cfg, x, *rep.alpha);
        rep.vx_over_budget = rep.vx_over_budget || hb.over_budget;
        return hb.value;
      });
    }
    const double p = *rep.alpha * rep.s_hat->value() / *rep.b_hat;
    rep.estimate = (p > 0.0 && std::isfinite(p)) ? Estimate::of(p) : Estimate::too_low();
  }
  rep.counters = diff(s.counters(), before);
  return rep;
}

}  // namespace condest
