#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "condest/dist.hpp"
#include "condest/oracle.hpp"
#include "condest/profile.hpp"

namespace condest {

// ceil(k ln(12 q)) and ceil(k ln(1/r)) with k = profile.peek_amp_const,
// floored at one call.
int amplification_for_queries(const Profile& p, std::uint64_t q);
int amplification_for_error(const Profile& p, double r);

// Memoized, amplified mass queries on top of estimate_single. TooLow is
// reported as 0.
class PeekLayer {
 public:
  PeekLayer(OracleSession& s, Config cfg, int amplification);

  double peek(Element x);
  // Draws x ~ mu and attaches its (cached) estimate.
  std::pair<Element, double> explicit_sample();

  const Config& config() const { return cfg_; }
  int amplification() const { return amp_; }
  std::size_t cached() const { return cache_.size(); }
  OracleSession& session() { return *s_; }

 private:
  OracleSession* s_;
  Config cfg_;
  int amp_;
  std::unordered_map<Element, double> cache_;
};

struct BucketHistogram {
  std::size_t t = 0;
  double eps_hat = 0.0;
  std::vector<double> masses;  // masses[i - 1] is bucket i
  double infinity = 0.0;
};

// ceil(ln(N / eps^2) / (2 eps)) + 2.
std::size_t histogram_bucket_count(std::size_t n, double eps_hat);
// Bucket of an estimated mass: ceil(-ln p / (2 eps)), 0 promoted to 1; 0 for
// the infinity bucket (p <= 0 or beyond t).
std::size_t bucket_of(double p, double eps_hat, std::size_t t);

BucketHistogram learn_histogram_buckets(PeekLayer& layer, double eps_hat);

struct BucketSolution {
  std::vector<std::uint64_t> counts;  // N_i
  std::vector<double> masses;         // p_i
  double residual = 0.0;              // sum |N_i p_i - nu(i)|
};

// Relaxed solver: p_i = e^{-2 eps i}, N_i = round(nu(i)/p_i), then greedy
// repair. Throws ValidationError if the result breaks any constraint.
BucketSolution solve_bucket_constraints(const BucketHistogram& nu, std::size_t n);

struct HistogramResult {
  Distribution tau;
  BucketHistogram buckets;
  BucketSolution solution;
};

HistogramResult learn_histogram(OracleSession& s, const Profile& p, double eps);

// 1 - mean of min(1, num(x)/den(x)) over ceil(6/eps^2) draws. den = 0 counts
// as an unbounded ratio (X = 1).
double estimate_bounded_ratio(const std::function<Element()>& draw, double eps,
                              const std::function<double(Element)>& num,
                              const std::function<double(Element)>& den);

struct DtvResult {
  double estimate = 0.0;
  double x_a = 0.0;
  double x_b = 0.0;
};

DtvResult estimate_dtv(OracleSession& a, OracleSession& b, const Profile& p, double eps);

std::uint64_t equivalence_iterations(double eps);

struct EquivalenceResult {
  bool accept = false;
  int accepts = 0;
  int rejects = 0;
  int instances_run = 0;
  bool budget_hit = false;
  std::uint64_t budget_limit = 0;  // 0 means no cutoff
  std::uint64_t samples = 0;
  std::map<std::string, std::uint64_t> counters;  // summed over child sessions
};

// One core run over two peek layers.
bool equivalence_core(PeekLayer& a, PeekLayer& b, double eps);

// Majority of profile.equiv_instances core runs on child sessions sharing a
// sample budget of floor(equiv_budget_factor * q); the run rejects as soon as
// the budget would be exceeded. q <= 0 disables the cutoff.
EquivalenceResult equivalence_test(OracleSession& a, OracleSession& b, const Profile& p,
                                   double eps, double q);
EquivalenceResult equivalence_test(OracleSession& a, OracleSession& b, const Profile& p,
                                   double eps);

struct LabelInvariantResult {
  bool accept = false;
  double distance = 0.0;
  double threshold = 0.0;
  Distribution tau;
};

// Learns at eps/4 and accepts iff property_distance(tau) <= eps/2.
LabelInvariantResult label_invariant_test(
    OracleSession& s, const Profile& p, double eps,
    const std::function<double(const Distribution&)>& property_distance);

}  // namespace condest
