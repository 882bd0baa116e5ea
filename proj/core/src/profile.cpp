#include "condest/profile.hpp"

#include <cmath>

#include "condest/error.hpp"
#include "condest/target.hpp"

namespace condest {

Profile paper_profile() {
  Profile p;
  p.name = "paper";
  return p;
}

Profile desk_profile() {
  Profile p;
  p.name = "desk";
  p.eta_from_formula = false;
  p.eta = 1e-3;
  p.gross_eta = 1e-3;
  p.enforce_ranges = false;

  p.top_medians = 3;
  p.preamble_medians = 3;
  p.sat_const = 6.0;

  p.beta_outer = 70;
  p.beta_inner_cap = 10000;

  p.comparator_medians = 3;
  p.oracle_medians = 3;
  p.search_repeats = 3;
  p.walk_factor = 20;

  p.h_m1_const = 96.0;  // printed constant divided by 100
  p.h_m2_const = 0.0;  // one single-beta call per outer draw
  p.h_delta_a = 0.0;
  p.h_delta_b = 2.0;
  p.single_beta_const = 8.0;

  p.peek_amp_const = 0.0;  // one estimate per element
  p.hist_eps_div = 3.0;
  p.dtv_eps_div = 6.0;
  p.equiv_peek_div = 8.0;
  p.equiv_instances = 9;
  p.equiv_budget_factor = 540.0;
  p.equiv_q = 0.0;
  return p;
}

Profile profile(std::string_view name) {
  if (name == "paper") return paper_profile();
  if (name == "desk") return desk_profile();
  throw ValidationError("unknown profile '" + std::string(name) + "'");
}

Config make_config(const Profile& p, double c, double eps, const Overrides& o) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must be in (0,1)");
  if (!(c > 0.0 && c < 1.0)) throw ValidationError("c must be in (0,1)");
  if (p.enforce_ranges && !(eps < 0.1 && c < 1.0 / 16.0)) {
    throw ValidationError("paper profile needs eps < 1/10 and c < 1/16");
  }
  Config cfg;
  cfg.c = c;
  cfg.eps = eps;
  cfg.k = p;
  TargetParams& t = cfg.target;
  t.c = c;
  t.eps = eps;
  t.eta = o.eta ? *o.eta : (p.eta_from_formula ? target_error(c, eps) : p.eta);
  if (!(t.eta > 0.0 && t.eta < 1.0)) throw ValidationError("eta must be in (0,1)");
  if (!(t.eta < c)) throw ValidationError("eta must be below c");
  t.gross_eta = p.gross_eta;
  t.kappa = p.kappa;
  t.ell_multiplier = o.ell_multiplier ? *o.ell_multiplier : p.ell_multiplier;
  if (!(t.ell_multiplier > 0.0)) throw ValidationError("ell multiplier must be positive");
  t.kind = p.test_kind;
  return cfg;
}

}  // namespace condest
