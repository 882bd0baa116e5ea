#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "condest/estimators.hpp"
#include "condest/oracle.hpp"
#include "condest/profile.hpp"

namespace condest {

struct PreambleResult {
  Estimate p_hat = Estimate::too_low();
  Estimate s_hat = Estimate::too_low();
  Estimate w_hat = Estimate::too_low();
};

// Joint estimate of (mu(x), s_x). Runs in the caller's phase.
PreambleResult preamble(OracleSession& s, const Config& cfg, Element x);

enum class Branch { Direct, BetaPath, TooLow };
const char* to_string(Branch b);

struct EstimationReport {
  Estimate estimate = Estimate::too_low();
  Estimate p_hat = Estimate::too_low();
  std::optional<Estimate> s_hat;  // only computed when p_hat is TooLow
  Branch branch = Branch::TooLow;
  std::optional<double> alpha;
  std::optional<int> alpha_exponent;
  std::optional<double> b_hat;
  std::uint64_t comparator_calls = 0;
  bool vx_over_budget = false;
  std::map<std::string, std::uint64_t> counters;  // samples drawn by this call
};

// Phases: "preamble", "find-alpha", "h-beta".
EstimationReport estimate_single(OracleSession& s, const Config& cfg, Element x);

}  // namespace condest
