#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "condest/dist.hpp"
#include "condest/profile.hpp"

namespace condest {

// Exact target-set data for one anchor. inclusion[y] is the probability that
// y lands in V_x: 1 on light elements, f_x(y) on medium ones, 0 on heavy ones
// and on x itself. Index 0 is unused.
struct ExactContext {
  Distribution dist;
  Element x = 0;
  std::vector<double> f;          // exact acceptance probabilities f_x(y)
  std::vector<double> inclusion;
};

ExactContext make_exact_context(const Distribution& d, Element x, const TargetParams& p);
ExactContext make_exact_context(const Distribution& d, Element x, double eta,
                                double multiplier = 968.0);

struct ScaleMasses {
  double s = 0.0;
  double gamma = 0.0;  // +inf when s = 0
  double w = 0.0;
};

ScaleMasses exact_s_gamma_w(const ExactContext& ctx);

constexpr std::size_t kMaxEnumeration = 12;

// Distribution of mu(V_x cap A_alpha) as (mass, probability) atoms, by
// enumerating the 2^(N-1) joint states. Throws ValidationError past N = 12.
std::vector<std::pair<double, double>> filtered_mass_atoms(const ExactContext& ctx, double alpha);

double exact_expected_beta(const ExactContext& ctx, double alpha);
double exact_expected_h_beta(const ExactContext& ctx, double alpha, double eps);
// E[beta / (1 - beta)]; requires mu(x) > 0.
double exact_expected_beta_ratio(const ExactContext& ctx, double alpha);
// Pr[mu(V_x cap A_alpha) >= threshold] (or <= when upper is false).
double exact_filtered_tail(const ExactContext& ctx, double alpha, double threshold, bool upper);

struct RateInterval {
  double rate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

// 95% Wilson score interval.
RateInterval wilson(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

// Runs trial(seed_i) for seed_i = base_seed + i and reports the success rate.
RateInterval success_rate(const std::function<bool(std::uint64_t)>& trial, std::uint64_t trials,
                          std::uint64_t base_seed);

// Bounds on E[beta] at a = alpha / gamma_x.
double beta_lower_bound(double a);
double beta_upper_bound(double a);

}  // namespace condest
