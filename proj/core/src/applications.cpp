#include "condest/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "condest/error.hpp"
#include "condest/pipeline.hpp"

namespace condest {

namespace {

int amplify(double k, double log_arg) {
  if (k <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(k * std::log(log_arg))));
}

void merge_counters(std::map<std::string, std::uint64_t>& into,
                    const std::map<std::string, std::uint64_t>& from) {
  for (const auto& [k, v] : from) into[k] += v;
}

}  // namespace

int amplification_for_queries(const Profile& p, std::uint64_t q) {
  return amplify(p.peek_amp_const, 12.0 * static_cast<double>(std::max<std::uint64_t>(q, 1)));
}

int amplification_for_error(const Profile& p, double r) {
  if (!(r > 0.0 && r < 1.0)) throw ValidationError("error rate must be in (0,1)");
  return amplify(p.peek_amp_const, 1.0 / r);
}

PeekLayer::PeekLayer(OracleSession& s, Config cfg, int amplification)
    : s_(&s), cfg_(std::move(cfg)), amp_(amplification) {
  if (amp_ < 1) throw ValidationError("amplification must be positive");
}

double PeekLayer::peek(Element x) {
  if (auto it = cache_.find(x); it != cache_.end()) return it->second;
  const Estimate e = median_of(amp_, [&] { return estimate_single(*s_, cfg_, x).estimate; });
  const double v = e.value_or(0.0);
  cache_.emplace(x, v);
  return v;
}

std::pair<Element, double> PeekLayer::explicit_sample() {
  Element x = 0;
  {
    auto ph = s_->phase("explicit-draw");
    x = s_->sample();
  }
  return {x, peek(x)};
}

std::size_t histogram_bucket_count(std::size_t n, double eps_hat) {
  if (!(eps_hat > 0.0 && eps_hat < 1.0)) throw ValidationError("bucket resolution must be in (0,1)");
  const double v = std::log(static_cast<double>(n) / (eps_hat * eps_hat)) / (2.0 * eps_hat);
  return static_cast<std::size_t>(std::ceil(v)) + 2;
}

std::size_t bucket_of(double p, double eps_hat, std::size_t t) {
  if (!(p > 0.0)) return 0;
  const double f = std::ceil(-std::log(p) / (2.0 * eps_hat));
  if (f > static_cast<double>(t)) return 0;
  return f < 1.0 ? 1 : static_cast<std::size_t>(f);
}

BucketHistogram learn_histogram_buckets(PeekLayer& layer, double eps_hat) {
  const std::size_t n = layer.session().dist().size();
  BucketHistogram h;
  h.eps_hat = eps_hat;
  h.t = histogram_bucket_count(n, eps_hat);
  h.masses.assign(h.t, 0.0);
  const auto q = static_cast<std::uint64_t>(std::ceil(static_cast<double>(h.t + 1) / (eps_hat * eps_hat)));
  std::vector<std::uint64_t> counts(h.t + 1, 0);  // slot 0 is infinity
  for (std::uint64_t i = 0; i < q; ++i) {
    const auto [y, p] = layer.explicit_sample();
    (void)y;
    ++counts[bucket_of(p, eps_hat, h.t)];
  }
  const auto qd = static_cast<double>(q);
  h.infinity = static_cast<double>(counts[0]) / qd;
  for (std::size_t i = 1; i <= h.t; ++i) h.masses[i - 1] = static_cast<double>(counts[i]) / qd;
  return h;
}

BucketSolution solve_bucket_constraints(const BucketHistogram& nu, std::size_t n) {
  const std::size_t t = nu.t;
  BucketSolution sol;
  sol.counts.assign(t, 0);
  sol.masses.resize(t);
  for (std::size_t i = 0; i < t; ++i) {
    sol.masses[i] = std::exp(-2.0 * nu.eps_hat * static_cast<double>(i + 1));
    const double want = std::round(nu.masses[i] / sol.masses[i]);
    sol.counts[i] = static_cast<std::uint64_t>(std::clamp(want, 0.0, static_cast<double>(n)));
  }

  auto total_count = [&] { return std::accumulate(sol.counts.begin(), sol.counts.end(), std::uint64_t{0}); };
  auto total_mass = [&] {
    double m = 0.0;
    for (std::size_t i = 0; i < t; ++i) m += static_cast<double>(sol.counts[i]) * sol.masses[i];
    return m;
  };
  // Drop one element at a time from the bucket that overshoots nu the most.
  while (total_count() > n || total_mass() > 1.0 + 1e-12) {
    std::size_t best = t;
    double best_res = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t; ++i) {
      if (sol.counts[i] == 0) continue;
      const double res = static_cast<double>(sol.counts[i]) * sol.masses[i] - nu.masses[i];
      if (res > best_res) {
        best_res = res;
        best = i;
      }
    }
    if (best == t) break;
    --sol.counts[best];
  }

  sol.residual = 0.0;
  for (std::size_t i = 0; i < t; ++i)
    sol.residual += std::abs(static_cast<double>(sol.counts[i]) * sol.masses[i] - nu.masses[i]);

  const double e = nu.eps_hat;
  bool ok = total_count() <= n && total_mass() <= 1.0 + 1e-12 && sol.residual <= 24.0 * e + 1e-12;
  for (std::size_t i = 0; ok && i < t; ++i) {
    const double idx = static_cast<double>(i + 1);
    ok = sol.masses[i] >= std::exp(-2.0 * e * (idx + 2.0)) && sol.masses[i] <= std::exp(-2.0 * e * (idx - 2.0));
  }
  if (!ok) throw ValidationError("bucket constraints infeasible");
  return sol;
}

HistogramResult learn_histogram(OracleSession& s, const Profile& p, double eps) {
  const double eps_hat = eps / p.hist_eps_div;
  const Config cfg = make_config(p, eps_hat, eps_hat);
  PeekLayer layer(s, cfg, amplification_for_error(p, eps_hat));
  HistogramResult r;
  r.buckets = learn_histogram_buckets(layer, eps_hat);
  const std::size_t n = s.dist().size();
  r.solution = solve_bucket_constraints(r.buckets, n);

  double total = 0.0;
  for (std::size_t i = 0; i < r.solution.counts.size(); ++i)
    total += static_cast<double>(r.solution.counts[i]) * r.solution.masses[i];
  std::vector<double> w(n, 0.0);
  if (total > 0.0) {
    std::size_t next = 0;
    for (std::size_t i = 0; i < r.solution.counts.size(); ++i) {
      for (std::uint64_t j = 0; j < r.solution.counts[i]; ++j) w[next++] = r.solution.masses[i] / total;
    }
  } else {
    // Every sample landed in the infinity bucket; nothing to rebuild from.
    std::fill(w.begin(), w.end(), 1.0);
  }
  r.tau = make_distribution(std::move(w));
  return r;
}

double estimate_bounded_ratio(const std::function<Element()>& draw, double eps,
                              const std::function<double(Element)>& num,
                              const std::function<double(Element)>& den) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  const auto m = static_cast<std::uint64_t>(std::ceil(6.0 / (eps * eps)));
  double sum = 0.0;
  for (std::uint64_t i = 0; i < m; ++i) {
    const Element x = draw();
    const double p = num(x);
    const double q = den(x);
    sum += q > 0.0 ? std::min(1.0, p / q) : 1.0;
  }
  return 1.0 - sum / static_cast<double>(m);
}

DtvResult estimate_dtv(OracleSession& a, OracleSession& b, const Profile& p, double eps) {
  if (a.dist().size() != b.dist().size()) throw ValidationError("domain sizes differ");
  const double eps_hat = eps / p.dtv_eps_div;
  const Config cfg = make_config(p, eps_hat, eps_hat);
  const auto m = static_cast<std::uint64_t>(std::ceil(6.0 / (eps_hat * eps_hat)));
  const int amp = amplification_for_queries(p, 4 * m);
  PeekLayer la(a, cfg, amp);
  PeekLayer lb(b, cfg, amp);
  auto draw_from = [](OracleSession& s) {
    auto ph = s.phase("explicit-draw");
    return s.sample();
  };
  DtvResult r;
  // E_mu[max(0, 1 - tau/mu)] + E_tau[max(0, 1 - mu/tau)] = 2 d_TV.
  r.x_a = estimate_bounded_ratio([&] { return draw_from(a); }, eps_hat,
                                 [&](Element x) { return lb.peek(x); },
                                 [&](Element x) { return la.peek(x); });
  r.x_b = estimate_bounded_ratio([&] { return draw_from(b); }, eps_hat,
                                 [&](Element x) { return la.peek(x); },
                                 [&](Element x) { return lb.peek(x); });
  r.estimate = 0.5 * r.x_a + 0.5 * r.x_b;
  return r;
}

std::uint64_t equivalence_iterations(double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  return static_cast<std::uint64_t>(std::ceil(3.0 / eps));
}

bool equivalence_core(PeekLayer& a, PeekLayer& b, double eps) {
  const std::uint64_t iters = equivalence_iterations(eps);
  for (std::uint64_t i = 0; i < iters; ++i) {
    const auto [x, p] = a.explicit_sample();
    const double q = b.peek(x);
    if (p <= 0.0) {
      // Both layers call x negligible: nothing to compare.
      if (q <= 0.0) continue;
      return false;
    }
    if (std::abs(q / p - 1.0) > eps / 4.0) return false;
  }
  return true;
}

EquivalenceResult equivalence_test(OracleSession& a, OracleSession& b, const Profile& p,
                                   double eps, double q) {
  if (a.dist().size() != b.dist().size()) throw ValidationError("domain sizes differ");
  const double peek_eps = eps / p.equiv_peek_div;
  const Config cfg = make_config(p, peek_eps, peek_eps);
  const int amp = amplification_for_queries(p, 2 * equivalence_iterations(eps));

  EquivalenceResult r;
  std::shared_ptr<SampleBudget> budget;
  if (q > 0.0) {
    r.budget_limit = static_cast<std::uint64_t>(std::floor(p.equiv_budget_factor * q));
    budget = std::make_shared<SampleBudget>(SampleBudget{r.budget_limit, 0});
  }
  for (int i = 0; i < p.equiv_instances; ++i) {
    OracleSession ca(a.dist(), a.fresh_seed(), a.zero_policy());
    OracleSession cb(b.dist(), b.fresh_seed(), b.zero_policy());
    if (budget) {
      ca.attach_budget(budget);
      cb.attach_budget(budget);
    }
    PeekLayer la(ca, cfg, amp);
    PeekLayer lb(cb, cfg, amp);
    bool verdict = false;
    try {
      verdict = equivalence_core(la, lb, eps);
    } catch (const BudgetExhausted&) {
      r.budget_hit = true;
    }
    r.samples += ca.total() + cb.total();
    merge_counters(r.counters, ca.counters());
    merge_counters(r.counters, cb.counters());
    if (r.budget_hit) break;
    ++r.instances_run;
    (verdict ? r.accepts : r.rejects) += 1;
  }
  r.accept = !r.budget_hit && 2 * r.accepts > p.equiv_instances;
  return r;
}

EquivalenceResult equivalence_test(OracleSession& a, OracleSession& b, const Profile& p,
                                   double eps) {
  return equivalence_test(a, b, p, eps, p.equiv_q);
}

LabelInvariantResult label_invariant_test(
    OracleSession& s, const Profile& p, double eps,
    const std::function<double(const Distribution&)>& property_distance) {
  LabelInvariantResult r;
  r.tau = learn_histogram(s, p, eps / 4.0).tau;
  r.distance = property_distance(r.tau);
  r.threshold = eps / 2.0;
  r.accept = r.distance <= r.threshold;
  return r;
}

}  // namespace condest
