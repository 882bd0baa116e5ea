#include "condest/testkit.hpp"

#include <cmath>
#include <limits>

#include "condest/error.hpp"
#include "condest/estimators.hpp"
#include "condest/target.hpp"

namespace condest {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must be in [0,1]");
}

// Calls visit(mass, weight) for every subset of the elements other than x.
template <class F>
void enumerate(const ExactContext& ctx, double alpha, F&& visit) {
  const std::size_t n = ctx.dist.size();
  if (n > kMaxEnumeration) throw ValidationError("enumeration supports N <= 12");
  std::vector<Element> ids;
  std::vector<double> pin;
  for (Element y = 1; y <= n; ++y) {
    if (y == ctx.x) continue;
    ids.push_back(y);
    pin.push_back(alpha * ctx.inclusion[y]);
  }
  const std::size_t k = ids.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    double mass = 0.0;
    double w = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (mask >> j & 1U) {
        w *= pin[j];
        mass += ctx.dist.mass(ids[j]);
      } else {
        w *= 1.0 - pin[j];
      }
    }
    if (w > 0.0) visit(mass, w);
  }
}

}  // namespace

ExactContext make_exact_context(const Distribution& d, Element x, const TargetParams& p) {
  if (x < 1 || x > d.size()) throw ValidationError("element id out of range");
  ExactContext ctx;
  ctx.dist = d;
  ctx.x = x;
  ctx.f.assign(d.size() + 1, 0.0);
  ctx.inclusion.assign(d.size() + 1, 0.0);
  const double mx = d.mass(x);
  for (Element y = 1; y <= d.size(); ++y) {
    if (y == x) continue;
    ctx.f[y] = exact_accept_probability(d, x, y, p);
    const double my = d.mass(y);
    if (my <= mx) {
      ctx.inclusion[y] = 1.0;
    } else if (my < 1.2 * mx) {
      ctx.inclusion[y] = ctx.f[y];
    }
  }
  return ctx;
}

ExactContext make_exact_context(const Distribution& d, Element x, double eta, double multiplier) {
  TargetParams p;
  p.eta = eta;
  p.gross_eta = eta;
  p.ell_multiplier = multiplier;
  return make_exact_context(d, x, p);
}

ScaleMasses exact_s_gamma_w(const ExactContext& ctx) {
  ScaleMasses r;
  for (Element y = 1; y <= ctx.dist.size(); ++y) r.s += ctx.dist.mass(y) * ctx.inclusion[y];
  const double mx = ctx.dist.mass(ctx.x);
  r.gamma = r.s > 0.0 ? mx / r.s : std::numeric_limits<double>::infinity();
  r.w = mx + r.s;
  return r;
}

std::vector<std::pair<double, double>> filtered_mass_atoms(const ExactContext& ctx, double alpha) {
  check_alpha(alpha);
  std::vector<std::pair<double, double>> atoms;
  enumerate(ctx, alpha, [&](double m, double w) { atoms.emplace_back(m, w); });
  return atoms;
}

double exact_expected_beta(const ExactContext& ctx, double alpha) {
  check_alpha(alpha);
  const double mx = ctx.dist.mass(ctx.x);
  double e = 0.0;
  enumerate(ctx, alpha, [&](double m, double w) {
    if (m + mx > 0.0) e += w * m / (m + mx);
  });
  return e;
}

double exact_expected_h_beta(const ExactContext& ctx, double alpha, double eps) {
  check_alpha(alpha);
  const double mx = ctx.dist.mass(ctx.x);
  double e = 0.0;
  enumerate(ctx, alpha, [&](double m, double w) {
    const double beta = m + mx > 0.0 ? m / (m + mx) : 0.0;
    e += w * h_of(beta, eps);
  });
  return e;
}

double exact_expected_beta_ratio(const ExactContext& ctx, double alpha) {
  check_alpha(alpha);
  const double mx = ctx.dist.mass(ctx.x);
  if (!(mx > 0.0)) throw ValidationError("anchor has zero mass");
  double e = 0.0;
  // beta / (1 - beta) = mu(V cap A) / mu(x).
  enumerate(ctx, alpha, [&](double m, double w) { e += w * m / mx; });
  return e;
}

double exact_filtered_tail(const ExactContext& ctx, double alpha, double threshold, bool upper) {
  check_alpha(alpha);
  double pr = 0.0;
  enumerate(ctx, alpha, [&](double m, double w) {
    if (upper ? m >= threshold : m <= threshold) pr += w;
  });
  return pr;
}

RateInterval wilson(std::uint64_t successes, std::uint64_t trials, double z) {
  RateInterval r;
  r.successes = successes;
  r.trials = trials;
  if (trials == 0) {
    r.hi = 1.0;
    return r;
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  r.rate = p;
  r.lo = std::max(0.0, centre - half);
  r.hi = std::min(1.0, centre + half);
  return r;
}

RateInterval success_rate(const std::function<bool(std::uint64_t)>& trial, std::uint64_t trials,
                          std::uint64_t base_seed) {
  std::uint64_t ok = 0;
  for (std::uint64_t i = 0; i < trials; ++i) ok += trial(base_seed + i) ? 1 : 0;
  return wilson(ok, trials);
}

double beta_lower_bound(double a) { return (1.0 - std::exp(-a / 9.0)) * (1.0 - 3.0 / (3.0 + a)); }

double beta_upper_bound(double a) {
  const double r = std::sqrt(a * a + a);
  return 2.0 * r / (1.0 + a + r);
}

}  // namespace condest
