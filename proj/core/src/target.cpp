#include "condest/target.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "condest/error.hpp"

namespace condest {

namespace {

// Largest k with 44k < 23 ell, so "Y < 23/44 ell" is exact in integers.
std::uint64_t lightweight_cutoff(std::uint64_t ell) { return (23 * ell - 1) / 44; }

double binomial_cdf(std::uint64_t n, double p, double k) {
  if (k < 0.0) return 0.0;
  if (k >= static_cast<double>(n)) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  boost::math::binomial_distribution<double> bin(static_cast<double>(n), p);
  return boost::math::cdf(bin, std::floor(k));
}

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("eta must be in (0,1)");
}

}  // namespace

double target_error(double c, double eps) {
  if (!(eps > 0.0 && eps < 0.1)) throw ValidationError("target error needs 0 < eps < 1/10");
  if (!(c > 0.0 && c < 1.0 / 16.0)) throw ValidationError("target error needs 0 < c < 1/16");
  const double l = std::log(1.0 / eps);
  const double third = std::pow(eps, 5) / (1.2e21 * std::pow(l, 5));
  return std::min({eps * c / 4.0, 1e-9, third});
}

std::uint64_t lightweight_ell(double eta, double multiplier) {
  check_eta(eta);
  return static_cast<std::uint64_t>(std::ceil(multiplier * std::log(1.0 / eta)));
}

std::uint64_t explicit_ell(double eta, double kappa) {
  check_eta(eta);
  if (!(kappa > 0.0 && kappa < 1.0 / 44.0)) throw ValidationError("kappa must be in (0, 1/44)");
  const double ell = std::ceil(std::log(1.0 / eta) / (2.0 * kappa * kappa));
  if (!(ell < 1e18)) throw ValidationError("kappa too small to simulate the explicit test");
  return static_cast<std::uint64_t>(ell);
}

bool target_test_lightweight(OracleSession& s, Element x, Element y, double eta,
                             double multiplier) {
  if (y == x) return false;
  const std::uint64_t ell = lightweight_ell(eta, multiplier);
  auto hits = s.count_pair(x, y, ell);
  if (!hits) return false;
  return *hits <= lightweight_cutoff(ell);
}

bool target_test_explicit(OracleSession& s, Element x, Element y, double eta, double kappa) {
  if (y == x) return false;
  const std::uint64_t ell = explicit_ell(eta, kappa);
  const double t =
      std::uniform_real_distribution<double>(0.5 + kappa, 6.0 / 11.0 - kappa)(s.rng());
  auto hits = s.count_pair(x, y, ell);
  if (!hits) return false;
  return static_cast<double>(*hits) < t * static_cast<double>(ell);
}

bool target_test(OracleSession& s, Element x, Element y, const TargetParams& p) {
  if (p.kind == TestKind::Explicit) return target_test_explicit(s, x, y, p.eta, p.kappa);
  return target_test_lightweight(s, x, y, p.eta, p.ell_multiplier);
}

bool target_test_gross(OracleSession& s, Element x, Element y, const TargetParams& p) {
  TargetParams q = p;
  q.eta = std::min(p.eta, p.gross_eta);
  return target_test(s, x, y, q);
}

double exact_accept_probability(const Distribution& d, Element x, Element y, double eta,
                                double multiplier, TestKind kind, double kappa) {
  if (y == x) return 0.0;
  const double mx = d.mass(x);
  const double my = d.mass(y);
  if (my <= 0.0) return 1.0;
  const double p = my / (mx + my);
  if (kind == TestKind::Lightweight) {
    const std::uint64_t ell = lightweight_ell(eta, multiplier);
    return binomial_cdf(ell, p, static_cast<double>(lightweight_cutoff(ell)));
  }
  // Average over t by the midpoint rule; Y < t ell means Y <= ceil(t ell) - 1.
  const std::uint64_t ell = explicit_ell(eta, kappa);
  const double lo = 0.5 + kappa;
  const double hi = 6.0 / 11.0 - kappa;
  constexpr int kGrid = 4000;
  double acc = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double t = lo + (hi - lo) * (i + 0.5) / kGrid;
    acc += binomial_cdf(ell, p, std::ceil(t * static_cast<double>(ell)) - 1.0);
  }
  return acc / kGrid;
}

double exact_accept_probability(const Distribution& d, Element x, Element y,
                                const TargetParams& p) {
  return exact_accept_probability(d, x, y, p.eta, p.ell_multiplier, p.kind, p.kappa);
}

}  // namespace condest
