#pragma once

#include <cstdint>

#include "condest/dist.hpp"
#include "condest/oracle.hpp"
#include "condest/profile.hpp"

namespace condest {

// min(eps*c/4, 1e-9, eps^5 / (1.2e21 ln(1/eps)^5)). Throws ValidationError
// unless eps < 1/10 and c < 1/16.
double target_error(double c, double eps);

// ceil(multiplier * ln(1/eta)).
std::uint64_t lightweight_ell(double eta, double multiplier = 968.0);
// ceil(ln(1/eta) / (2 kappa^2)); throws ValidationError if it overflows.
std::uint64_t explicit_ell(double eta, double kappa);

// Accepts iff Y < (23/44) ell, Y = draws equal to y among ell draws from {x, y}.
bool target_test_lightweight(OracleSession& s, Element x, Element y, double eta,
                             double multiplier = 968.0);
// Draws t uniformly from [1/2 + kappa, 6/11 - kappa] and accepts iff Y < t ell.
bool target_test_explicit(OracleSession& s, Element x, Element y, double eta, double kappa);

// Canonical test at the configured eta.
bool target_test(OracleSession& s, Element x, Element y, const TargetParams& p);
// Canonical test at min(eta, gross_eta).
bool target_test_gross(OracleSession& s, Element x, Element y, const TargetParams& p);

// Exact acceptance probability of the test on (x, y), i.e. f_x(y).
double exact_accept_probability(const Distribution& d, Element x, Element y, double eta,
                                double multiplier = 968.0,
                                TestKind kind = TestKind::Lightweight, double kappa = 0.0);
double exact_accept_probability(const Distribution& d, Element x, Element y,
                                const TargetParams& p);

}  // namespace condest
