#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "condest/oracle.hpp"
#include "condest/profile.hpp"

namespace condest {

enum class Verdict { Low = 0, Good = 1, High = 2 };

const char* to_string(Verdict v);

// Median-of-k estimates of E[beta] at alpha and min(1, 2 alpha):
// Low if the latter is below 0.905, High if the former exceeds 0.915.
Verdict uncertain_comparator(OracleSession& s, const Config& cfg, Element x, double alpha);

struct WalkStep {
  std::size_t l = 0;
  std::size_t r = 0;
};

// Backtracking random walk on the dyadic tree over {1..n}, n padded to a
// power of two with "High" beyond n. Runs walk_factor * log2(n) steps and
// returns the left end of the final node. The comparator must be
// non-decreasing in its argument (Low < Good < High).
std::size_t strict_binary_search(std::size_t n, const std::function<Verdict(std::size_t)>& cmp,
                                 int walk_factor = 20, std::vector<WalkStep>* trace = nullptr);

// Sizes |I'_r| for r = 0..5; zero marks an empty residue class.
std::vector<std::size_t> residue_sizes(std::size_t n);

struct FindAlphaResult {
  double alpha = 0.0;
  int exponent = 0;          // alpha = 2^-exponent
  bool fallback = false;
  std::uint64_t comparator_calls = 0;  // amplified comparator invocations
};

// Generic form over any per-alpha comparator; each amplified call is the
// median of profile.oracle_medians base calls.
FindAlphaResult find_good_alpha_with(std::size_t n, const std::function<Verdict(double)>& base,
                                     const Profile& profile);
FindAlphaResult find_good_alpha(OracleSession& s, const Config& cfg, Element x);

// Amplified comparator calls when every answer is "High" (all six residues
// searched, then the fallback).
std::uint64_t find_alpha_fallback_calls(std::size_t n, const Profile& profile);
// Upper bound with three calls on every walk step.
std::uint64_t find_alpha_worst_case_calls(std::size_t n, const Profile& profile);

}  // namespace condest
