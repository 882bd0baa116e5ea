// condest: command-line front end for the conditional-sampling estimators.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "condest/condest.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace condest;

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string dist;
  std::string dist_a;
  std::string dist_b;
  Element x = 1;
  double eps = 0.2;
  double c = 0.05;
  std::string profile = "desk";
  std::optional<std::uint64_t> seed;
  std::uint64_t trials = 1;
  std::string out;
  std::string format = "json";
  bool timing = false;
  std::optional<double> q;
  std::vector<std::size_t> ns;
  unsigned k_offset = 8;
  std::size_t verify_n = 8;
  bool forced_high = false;
};

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("CONDEST_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') throw ValidationError("CONDEST_SEED is not an integer");
    return v;
  }
  return 1;
}

// A file path, or "gen:<family>:<N>" with family as in parse_family plus
// "dk:<k>" for the D_k fixtures.
Distribution load_source(const std::string& src, std::uint64_t seed) {
  if (src.empty()) throw ValidationError("missing distribution source");
  if (src.rfind("gen:", 0) != 0) return load_distribution(src);
  const std::string body = src.substr(4);
  const auto colon = body.rfind(':');
  if (colon == std::string::npos) throw ValidationError("generator source needs ':<N>'");
  std::size_t n = 0;
  try {
    std::size_t pos = 0;
    n = std::stoull(body.substr(colon + 1), &pos);
    if (pos != body.size() - colon - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ValidationError("bad domain size in '" + src + "'");
  }
  const std::string fam = body.substr(0, colon);
  if (fam.rfind("dk:", 0) == 0) {
    try {
      return gen_dk(n, static_cast<unsigned>(std::stoul(fam.substr(3))), seed);
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ValidationError*>(&e) != nullptr) throw;
      throw ValidationError("bad k in '" + src + "'");
    }
  }
  return gen_named(parse_family(fam), n, seed);
}

json estimate_json(const Estimate& e) {
  if (e.is_too_low()) return "too_low";
  return e.value();
}

json counters_json(const std::map<std::string, std::uint64_t>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

json profile_json(const Profile& p) {
  return json{
      {"name", p.name},
      {"eta", p.eta_from_formula ? json("formula") : json(p.eta)},
      {"gross_eta", p.gross_eta},
      {"ell_multiplier", p.ell_multiplier},
      {"test_kind", p.test_kind == TestKind::Lightweight ? "lightweight" : "explicit"},
      {"top_medians", p.top_medians},
      {"preamble_medians", p.preamble_medians},
      {"sat_const", p.sat_const},
      {"beta_outer", p.beta_outer},
      {"beta_inner_cap", p.beta_inner_cap},
      {"comparator_medians", p.comparator_medians},
      {"oracle_medians", p.oracle_medians},
      {"search_repeats", p.search_repeats},
      {"walk_factor", p.walk_factor},
      {"h_m1_const", p.h_m1_const},
      {"h_m2_const", p.h_m2_const},
      {"h_delta_a", p.h_delta_a},
      {"h_delta_b", p.h_delta_b},
      {"single_beta_const", p.single_beta_const},
      {"peek_amp_const", p.peek_amp_const},
      {"hist_eps_div", p.hist_eps_div},
      {"dtv_eps_div", p.dtv_eps_div},
      {"equiv_peek_div", p.equiv_peek_div},
      {"equiv_instances", p.equiv_instances},
      {"equiv_budget_factor", p.equiv_budget_factor},
      {"equiv_q", p.equiv_q},
  };
}

json header(const std::string& command, const Options& o, std::uint64_t seed) {
  json j;
  j["schema"] = "condest/1";
  j["command"] = command;
  j["seed"] = seed;
  j["profile"] = profile_json(profile(o.profile));
  return j;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
  f << text;
  if (!f) throw std::runtime_error("write to '" + o.out + "' failed");
}

void emit_json(const Options& o, const json& j) {
  if (o.format != "json") throw ValidationError("this command only writes json");
  emit(o, j.dump(2) + "\n");
}

// Child seeds for trial i, independent of how many trials run.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t i) { return hash64(seed, i + 1); }

json run_estimate(const Options& o, std::uint64_t seed) {
  const Distribution d = load_source(o.dist, seed);
  const Config cfg = make_config(profile(o.profile), o.c, o.eps);
  if (o.x < 1 || o.x > d.size()) throw ValidationError("--x outside 1..N");
  json j = header("estimate", o, seed);
  j["params"] = {{"x", o.x}, {"eps", o.eps}, {"c", o.c}, {"trials", o.trials}, {"eta", cfg.target.eta}};
  const double truth = d.mass(o.x);
  j["true_mass"] = truth;
  j["cdf_mu"] = cdf_mu(d, o.x);
  json runs = json::array();
  std::uint64_t within = 0;
  for (std::uint64_t t = 0; t < o.trials; ++t) {
    OracleSession s(d, trial_seed(seed, t));
    const auto r = estimate_single(s, cfg, o.x);
    json run;
    run["estimate"] = estimate_json(r.estimate);
    run["branch"] = to_string(r.branch);
    run["p_hat"] = estimate_json(r.p_hat);
    run["s_hat"] = r.s_hat ? estimate_json(*r.s_hat) : json(nullptr);
    run["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
    run["b_hat"] = r.b_hat ? json(*r.b_hat) : json(nullptr);
    run["comparator_calls"] = r.comparator_calls;
    run["vx_over_budget"] = r.vx_over_budget;
    run["counters"] = counters_json(r.counters);
    run["total_samples"] = s.total();
    if (!r.estimate.is_too_low() && std::abs(r.estimate.value() - truth) <= o.eps * truth) ++within;
    runs.push_back(std::move(run));
  }
  if (o.trials == 1) {
    for (auto& [k, v] : runs[0].items()) j[k] = v;
  } else {
    j["runs"] = std::move(runs);
    const auto w = wilson(within, o.trials);
    j["within_eps"] = {{"rate", w.rate}, {"lo", w.lo}, {"hi", w.hi}};
  }
  return j;
}

json run_histogram(const Options& o, std::uint64_t seed) {
  const Distribution d = load_source(o.dist_a.empty() ? o.dist : o.dist_a, seed);
  const Profile p = profile(o.profile);
  OracleSession s(d, trial_seed(seed, 0));
  const auto r = learn_histogram(s, p, o.eps);
  json j = header("histogram", o, seed);
  j["params"] = {{"eps", o.eps}, {"eps_hat", r.buckets.eps_hat}};
  json buckets = json::array();
  for (std::size_t i = 0; i < r.solution.counts.size(); ++i) {
    if (r.solution.counts[i] == 0 && r.buckets.masses[i] == 0.0) continue;
    buckets.push_back({{"bucket", i + 1},
                       {"nu", r.buckets.masses[i]},
                       {"count", r.solution.counts[i]},
                       {"mass", r.solution.masses[i]}});
  }
  j["buckets"] = std::move(buckets);
  j["nu_infinity"] = r.buckets.infinity;
  j["residual"] = r.solution.residual;
  std::vector<double> sorted = r.tau.masses();
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  while (!sorted.empty() && sorted.back() == 0.0) sorted.pop_back();
  j["tau_sorted"] = sorted;
  j["min_perm_tv"] = min_perm_tv(d, r.tau);
  j["counters"] = counters_json(s.counters());
  j["total_samples"] = s.total();
  return j;
}

json run_dtv(const Options& o, std::uint64_t seed) {
  const Distribution a = load_source(o.dist_a, seed);
  const Distribution b = load_source(o.dist_b, hash64(seed, 0xb));
  const Profile p = profile(o.profile);
  OracleSession sa(a, trial_seed(seed, 0));
  OracleSession sb(b, trial_seed(seed, 1));
  const auto r = estimate_dtv(sa, sb, p, o.eps);
  json j = header("dtv", o, seed);
  j["params"] = {{"eps", o.eps}};
  j["estimate"] = r.estimate;
  j["x_a"] = r.x_a;
  j["x_b"] = r.x_b;
  j["true_tv"] = tv_distance(a, b);
  j["counters_a"] = counters_json(sa.counters());
  j["counters_b"] = counters_json(sb.counters());
  j["total_samples"] = sa.total() + sb.total();
  return j;
}

json run_equiv(const Options& o, std::uint64_t seed) {
  const Distribution a = load_source(o.dist_a, seed);
  const Distribution b = load_source(o.dist_b, hash64(seed, 0xb));
  const Profile p = profile(o.profile);
  OracleSession sa(a, trial_seed(seed, 0));
  OracleSession sb(b, trial_seed(seed, 1));
  const double q = o.q ? *o.q : p.equiv_q;
  const auto r = equivalence_test(sa, sb, p, o.eps, q);
  json j = header("equiv", o, seed);
  j["params"] = {{"eps", o.eps}, {"q", q}, {"iterations", equivalence_iterations(o.eps)}};
  j["decision"] = r.accept ? "accept" : "reject";
  j["accepts"] = r.accepts;
  j["rejects"] = r.rejects;
  j["instances_run"] = r.instances_run;
  j["budget_limit"] = r.budget_limit;
  j["budget_hit"] = r.budget_hit;
  j["true_tv"] = tv_distance(a, b);
  j["counters"] = counters_json(r.counters);
  j["total_samples"] = r.samples;
  return j;
}

struct ScalingRow {
  std::size_t n = 0;
  std::size_t support = 0;
  double median_calls = 0.0;
  std::uint64_t fallback_formula = 0;
  std::uint64_t worst_case = 0;
};

std::vector<ScalingRow> scaling_rows(const Options& o, std::uint64_t seed) {
  const Profile p = profile(o.profile);
  const Config cfg = make_config(p, o.c, o.eps);
  std::vector<std::size_t> ns = o.ns;
  if (ns.empty()) ns = {std::size_t{1} << 10, std::size_t{1} << 14, std::size_t{1} << 18, std::size_t{1} << 22};
  std::vector<ScalingRow> rows;
  for (std::size_t n : ns) {
    if (n < 2) throw ValidationError("scaling sizes must be >= 2");
    const auto lg = static_cast<unsigned>(std::bit_width(n) - 1);
    const unsigned k = lg > o.k_offset ? lg - o.k_offset : 0;
    ScalingRow row;
    row.n = n;
    row.fallback_formula = find_alpha_fallback_calls(n, p);
    row.worst_case = find_alpha_worst_case_calls(n, p);
    std::vector<double> calls;
    for (std::uint64_t t = 0; t < o.trials; ++t) {
      const std::uint64_t ts = hash64(trial_seed(seed, t), n);
      const Distribution d = gen_dk(n, k, ts);
      row.support = d.support().size();
      FindAlphaResult fa;
      if (o.forced_high) {
        fa = find_good_alpha_with(n, [](double) { return Verdict::High; }, p);
      } else {
        OracleSession s(d, ts);
        fa = find_good_alpha(s, cfg, d.support().front());
      }
      calls.push_back(static_cast<double>(fa.comparator_calls));
    }
    std::sort(calls.begin(), calls.end());
    const std::size_t m = calls.size();
    row.median_calls = m % 2 == 1 ? calls[m / 2] : 0.5 * (calls[m / 2 - 1] + calls[m / 2]);
    rows.push_back(row);
  }
  return rows;
}

void run_bench_scaling(const Options& o, std::uint64_t seed) {
  const auto rows = scaling_rows(o, seed);
  if (o.format == "csv") {
    std::ostringstream out;
    out << "n,support,median_comparator_calls,fallback_formula,worst_case_bound\n";
    for (const auto& r : rows) {
      out << r.n << ',' << r.support << ',' << r.median_calls << ',' << r.fallback_formula << ','
          << r.worst_case << '\n';
    }
    emit(o, out.str());
    return;
  }
  json j = header("bench-scaling", o, seed);
  j["params"] = {{"trials", o.trials}, {"k_offset", o.k_offset}, {"forced_high", o.forced_high}};
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"support", r.support},
                   {"median_comparator_calls", r.median_calls},
                   {"fallback_formula", r.fallback_formula},
                   {"worst_case_bound", r.worst_case}});
  }
  j["rows"] = std::move(arr);
  emit_json(o, j);
}

// Identity residuals on a fixed corpus of small distributions.
json run_verify(const Options& o, std::uint64_t seed) {
  const std::size_t n = o.verify_n;
  if (n < 2 || n > kMaxEnumeration) throw ValidationError("--n must be in 2..12");
  const Profile p = profile(o.profile);
  const Config cfg = make_config(p, o.c, o.eps);
  std::vector<std::pair<std::string, Distribution>> corpus;
  for (const char* fam : {"uniform", "zipf:1", "zipf:2", "geometric:0.3", "geometric:0.7", "point_mass"}) {
    corpus.emplace_back(fam, gen_named(parse_family(fam), n, seed));
  }
  for (unsigned k = 1; (std::size_t{1} << k) <= n; ++k) {
    corpus.emplace_back("dk:" + std::to_string(k), gen_dk(n, k, hash64(seed, k)));
  }
  json j = header("verify", o, seed);
  j["params"] = {{"n", n}, {"eps", o.eps}, {"c", o.c}, {"eta", cfg.target.eta}};
  double worst = 0.0;
  std::uint64_t checks = 0;
  json per = json::array();
  for (const auto& [name, d] : corpus) {
    double dist_worst = 0.0;
    for (Element x = 1; x <= n; ++x) {
      if (!(d.mass(x) > 0.0)) continue;
      const ExactContext ctx = make_exact_context(d, x, cfg.target);
      const auto sgw = exact_s_gamma_w(ctx);
      if (!(sgw.s > 0.0)) continue;
      for (int a = 1; a <= 10; ++a) {
        const double alpha = a / 10.0;
        const double implied = alpha * sgw.s / exact_expected_beta_ratio(ctx, alpha);
        const double res = std::abs(implied - d.mass(x));
        dist_worst = std::max(dist_worst, res);
        ++checks;
      }
    }
    worst = std::max(worst, dist_worst);
    per.push_back({{"name", name}, {"max_residual", dist_worst}});
  }
  j["corpus"] = std::move(per);
  j["checks"] = checks;
  j["max_residual"] = worst;
  j["pass"] = worst < 1e-9;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional-sampling mass estimation and applications"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--profile", o.profile, "Constant profile: desk or paper")->capture_default_str();
    sub->add_option("--seed", o.seed, "RNG seed (falls back to CONDEST_SEED, then 1)");
    sub->add_option("--out", o.out, "Write the report here instead of stdout");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_flag("--timing", o.timing, "Add wall time to the report (breaks byte-identical output)");
    sub->add_flag("--json", [](std::int64_t) {}, "Accepted for compatibility; output is json by default");
  };

  auto* est = app.add_subcommand("estimate", "Estimate mu(x)");
  est->add_option("--dist", o.dist, "Distribution file or gen:<family>:<N>")->required();
  est->add_option("--x", o.x, "Element id (1-based)")->required();
  est->add_option("--eps", o.eps)->capture_default_str();
  est->add_option("--c", o.c)->capture_default_str();
  est->add_option("--trials", o.trials)->capture_default_str();
  common(est);

  auto* hist = app.add_subcommand("histogram", "Learn the histogram of a distribution");
  hist->add_option("--distA,--dist", o.dist_a, "Distribution file or gen:<family>:<N>")->required();
  hist->add_option("--eps", o.eps)->capture_default_str();
  common(hist);

  auto* dtv = app.add_subcommand("dtv", "Estimate total variation distance");
  dtv->add_option("--distA", o.dist_a)->required();
  dtv->add_option("--distB", o.dist_b)->required();
  dtv->add_option("--eps", o.eps)->capture_default_str();
  common(dtv);

  auto* eq = app.add_subcommand("equiv", "Equivalence test");
  eq->add_option("--distA", o.dist_a)->required();
  eq->add_option("--distB", o.dist_b)->required();
  eq->add_option("--eps", o.eps)->capture_default_str();
  eq->add_option("--q", o.q, "Expected per-instance cost for the budget cutoff (default: profile)");
  common(eq);

  auto* bs = app.add_subcommand("bench-scaling", "Find-alpha comparator calls over D_k fixtures");
  bs->add_option("--n", o.ns, "Domain sizes (default 2^10 2^14 2^18 2^22)");
  bs->add_option("--trials", o.trials)->capture_default_str();
  bs->add_option("--k-offset", o.k_offset, "Fixture support is about 2^k_offset")->capture_default_str();
  bs->add_option("--eps", o.eps)->capture_default_str();
  bs->add_option("--c", o.c)->capture_default_str();
  bs->add_flag("--forced-high", o.forced_high, "Use an always-High comparator");
  common(bs);

  auto* ver = app.add_subcommand("verify", "Exact oracle identity check on a small corpus");
  ver->add_option("--n", o.verify_n)->capture_default_str();
  ver->add_option("--eps", o.eps)->capture_default_str();
  ver->add_option("--c", o.c)->capture_default_str();
  common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    const std::uint64_t seed = resolve_seed(o);
    if (o.trials == 0) throw ValidationError("--trials must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    auto timed = [&](json j) {
      if (o.timing) j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return j;
    };
    if (est->parsed()) {
      emit_json(o, timed(run_estimate(o, seed)));
    } else if (hist->parsed()) {
      emit_json(o, timed(run_histogram(o, seed)));
    } else if (dtv->parsed()) {
      emit_json(o, timed(run_dtv(o, seed)));
    } else if (eq->parsed()) {
      emit_json(o, timed(run_equiv(o, seed)));
    } else if (bs->parsed()) {
      run_bench_scaling(o, seed);
    } else if (ver->parsed()) {
      const json j = run_verify(o, seed);
      emit_json(o, timed(j));
      if (!j["pass"].get<bool>()) return kExitRuntime;
    }
  } catch (const ValidationError& e) {
    std::cerr << "condest: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "condest: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
