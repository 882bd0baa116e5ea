#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace condest {

enum class TestKind { Lightweight, Explicit };

// Every repetition constant used by the estimator and its applications.
// "paper" keeps the printed constants; "desk" scales them down so full
// pipelines run in seconds.
struct Profile {
  std::string name;

  // Target test.
  bool eta_from_formula = true;   // eta = target_error(c, eps)
  double eta = 1e-3;              // used when eta_from_formula is false
  double gross_eta = 1e-9;
  double ell_multiplier = 968.0;
  double kappa = 2e-11;
  TestKind test_kind = TestKind::Lightweight;
  bool enforce_ranges = true;     // eps < 1/10, c < 1/16

  // Median amplification.
  int top_medians = 13;
  int preamble_medians = 13;
  double sat_const = 48.0;

  // Expected-beta estimator.
  std::uint64_t beta_outer = 70000;
  std::uint64_t beta_inner_cap = 10000;

  // Search for alpha.
  int comparator_medians = 9;
  int oracle_medians = 47;
  int search_repeats = 9;
  int walk_factor = 20;

  // Expected-h-beta estimator: delta = eps / (h_delta_a ln(1/eps) + h_delta_b).
  double h_m1_const = 9600.0;
  double h_m2_const = 30.0;
  double h_delta_a = 168.0;
  double h_delta_b = 2163.0;
  double single_beta_const = 8.0;

  // Applications.
  double peek_amp_const = 30.0;
  double hist_eps_div = 300.0;
  double dtv_eps_div = 6.0;
  double equiv_peek_div = 16.0;
  int equiv_instances = 45;
  double equiv_budget_factor = 540.0;
  double equiv_q = 0.0;           // expected per-instance cost when mu = tau
};

Profile paper_profile();
Profile desk_profile();
// Throws ValidationError for names other than "paper" and "desk".
Profile profile(std::string_view name);

struct TargetParams {
  double c = 0.0;
  double eps = 0.0;
  double eta = 0.0;
  double gross_eta = 0.0;
  double kappa = 0.0;
  double ell_multiplier = 968.0;
  TestKind kind = TestKind::Lightweight;
};

// Everything an estimator call needs.
struct Config {
  double c = 0.0;
  double eps = 0.0;
  TargetParams target;
  Profile k;
};

struct Overrides {
  std::optional<double> eta;
  std::optional<double> ell_multiplier;
};

Config make_config(const Profile& p, double c, double eps, const Overrides& o = {});

}  // namespace condest
