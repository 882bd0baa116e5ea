// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset. Exit status is non-zero if any selected
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "condest/condest.hpp"

using namespace condest;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Config desk_config(double c = 0.05, double eps = 0.2) { return make_config(desk_profile(), c, eps); }

std::string rate_str(const RateInterval& r) {
  return fmt("%llu/%llu (wilson %.3f..%.3f)", static_cast<unsigned long long>(r.successes),
             static_cast<unsigned long long>(r.trials), r.lo, r.hi);
}

// Small mixed-family corpus, every member with N <= 12.
std::vector<std::pair<std::string, Distribution>> small_corpus() {
  std::vector<std::pair<std::string, Distribution>> out;
  for (std::size_t n : {5u, 8u, 12u}) {
    for (const char* fam : {"uniform", "zipf:1", "zipf:2", "geometric:0.3", "geometric:0.7"}) {
      out.emplace_back(fmt("%s/%zu", fam, n), gen_named(parse_family(fam), n, n));
    }
    out.emplace_back(fmt("dk:1/%zu", n), gen_dk(n, 1, 100 + n));
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n : {6u, 9u, 11u, 12u}) {
    std::vector<double> w(n);
    for (auto& v : w) v = u(rng) < 0.2 ? 0.0 : std::exp(3.0 * u(rng));
    out.emplace_back(fmt("random/%zu", n), make_distribution(w));
  }
  // Near-ties around the 1.2 factor exercise the medium band.
  out.emplace_back("ties", make_distribution({1.0, 1.1, 1.19, 1.2, 1.21, 1.5, 2.0, 0.9, 0.5}));
  return out;
}

Outcome criterion1() {
  const Config cfg = desk_config();
  const auto corpus = small_corpus();
  double worst = 0.0;
  std::uint64_t checks = 0;
  for (const auto& [name, d] : corpus) {
    for (Element x = 1; x <= d.size(); ++x) {
      if (!(d.mass(x) > 0.0)) continue;
      const ExactContext ctx = make_exact_context(d, x, cfg.target);
      const double s = exact_s_gamma_w(ctx).s;
      if (!(s > 0.0)) continue;
      for (int a = 1; a <= 10; ++a) {
        const double alpha = a / 10.0;
        const double implied = alpha * s / exact_expected_beta_ratio(ctx, alpha);
        worst = std::max(worst, std::abs(implied - d.mass(x)));
        ++checks;
      }
    }
  }
  return {corpus.size() >= 20 && worst < 1e-9,
          fmt("%zu distributions, %llu checks, max residual %.2e", corpus.size(),
              static_cast<unsigned long long>(checks), worst)};
}

Outcome criterion2() {
  const Config cfg = desk_config();
  const int trials = 2000;
  bool ok = true;
  std::ostringstream detail;
  const std::array<double, 6> ratios{0.5, 1.0, 1.2, 1.35, 1.6, 2.0};
  std::uint64_t seed = 1;
  for (double r : ratios) {
    const Distribution d = make_distribution({1.0, r});
    const double accept = exact_accept_probability(d, 1, 2, cfg.target);
    const bool want_accept = r < 1.2;
    const double expect = want_accept ? accept : 1.0 - accept;
    OracleSession s(d, seed++);
    int hits = 0;
    for (int i = 0; i < trials; ++i) hits += target_test(s, 1, 2, cfg.target) == want_accept;
    const double freq = hits / double(trials);
    const double sigma = std::sqrt(expect * (1.0 - expect) / trials);
    const bool pass = freq >= expect - 3.0 * sigma - 1e-12;
    ok = ok && pass;
    detail << fmt("r=%.2f %s %.4f (exact %.4f) ", r, want_accept ? "acc" : "rej", freq, expect);
  }
  return {ok, detail.str()};
}

Outcome criterion3() {
  const Config cfg = desk_config();
  const double slack = 1e-9;
  std::uint64_t points = 0;
  std::uint64_t landmarks = 0;
  std::string first_failure;
  auto fail = [&](const std::string& why) {
    if (first_failure.empty()) first_failure = why;
  };
  for (const auto& [name, d] : small_corpus()) {
    for (Element x = 1; x <= d.size(); ++x) {
      if (!(d.mass(x) > 0.0)) continue;
      const ExactContext ctx = make_exact_context(d, x, cfg.target);
      const double gamma = exact_s_gamma_w(ctx).gamma;
      if (!std::isfinite(gamma)) continue;
      double prev = -1.0;
      for (double a = 0.5; a <= 50.0 + 1e-12; a *= 1.1) {
        const double alpha = a * gamma;
        if (alpha > 1.0) break;
        const double b = exact_expected_beta(ctx, alpha);
        ++points;
        if (b + slack < prev) fail(fmt("%s x=%zu not monotone at a=%.3f", name.c_str(), x, a));
        if (b + slack < beta_lower_bound(a) || b - slack > beta_upper_bound(a)) {
          fail(fmt("%s x=%zu a=%.3f E[beta]=%.6f outside [%.6f, %.6f]", name.c_str(), x, a, b,
                   beta_lower_bound(a), beta_upper_bound(a)));
        }
        prev = b;
      }
      if (2.0 * gamma <= 1.0) {
        ++landmarks;
        const double b = exact_expected_beta(ctx, 2.0 * gamma);
        if (!(b < 0.9 + slack)) fail(fmt("%s x=%zu E[beta at 2 gamma]=%.6f", name.c_str(), x, b));
      }
      if (41.0 * gamma <= 1.0) {
        ++landmarks;
        const double b = exact_expected_beta(ctx, 41.0 * gamma);
        if (!(b > 0.92 - slack)) fail(fmt("%s x=%zu E[beta at 41 gamma]=%.6f", name.c_str(), x, b));
      }
    }
  }
  std::string detail = fmt("%llu grid points, %llu landmark checks", static_cast<unsigned long long>(points),
                           static_cast<unsigned long long>(landmarks));
  if (!first_failure.empty()) detail += "; first failure: " + first_failure;
  return {first_failure.empty() && points > 0, detail};
}

Outcome criterion4() {
  const double a = 0.05;
  const double delta = 0.2;
  const int trials = 500;
  bool ok = true;
  std::ostringstream detail;
  for (double p : {a / 20.0, a / 2.0, 2.0 * a}) {
    const auto r = success_rate(
        [&](std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          std::bernoulli_distribution coin(p);
          const Estimate e = saturation_aware_est(a, [&] { return coin(rng); }, delta);
          const bool close = !e.is_too_low() && std::abs(e.value() - p) <= delta * p;
          if (p < a / 12.0) return e.is_too_low();
          if (p < a) return e.is_too_low() || close;
          return close;
        },
        trials, static_cast<std::uint64_t>(p * 1e6));
    ok = ok && r.rate >= 0.6 && r.lo > 0.55;
    detail << fmt("p=%.4f %s; ", p, rate_str(r).c_str());
  }
  return {ok, detail.str()};
}

Outcome criterion5() {
  bool ok = true;
  std::ostringstream detail;
  auto truth = [](std::size_t goal) {
    return [goal](std::size_t i) {
      if (i < goal) return Verdict::Low;
      if (i > goal) return Verdict::High;
      return Verdict::Good;
    };
  };
  for (std::size_t n : {8u, 64u, 1024u}) {
    const auto r = success_rate(
        [&](std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          const std::size_t goal = std::uniform_int_distribution<std::size_t>(1, n)(rng);
          return strict_binary_search(n, truth(goal)) == goal;
        },
        100, 1000 * n);
    ok = ok && r.rate == 1.0;
    detail << fmt("perfect n=%zu %llu/100; ", n, static_cast<unsigned long long>(r.successes));
  }
  for (std::size_t n : {64u, 1024u}) {
    const auto r = success_rate(
        [&](std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          const std::size_t goal = std::uniform_int_distribution<std::size_t>(1, n)(rng);
          const auto clean = truth(goal);
          std::bernoulli_distribution corrupt(0.01);
          std::uniform_int_distribution<int> shift(1, 2);
          auto noisy = [&](std::size_t i) {
            const Verdict v = clean(i);
            if (!corrupt(rng)) return v;
            return static_cast<Verdict>((static_cast<int>(v) + shift(rng)) % 3);
          };
          return strict_binary_search(n, noisy) == goal;
        },
        1000, 77 * n);
    ok = ok && r.hi >= 2.0 / 3.0;
    detail << fmt("1%% noise n=%zu %s; ", n, rate_str(r).c_str());
  }
  return {ok, detail.str()};
}

Outcome criterion6() {
  const Config cfg = desk_config(0.05, 0.2);
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t n : {64u, 256u}) {
    const Distribution d = gen_named(parse_family("uniform"), n, 0);
    const auto r = success_rate(
        [&](std::uint64_t seed) {
          OracleSession s(d, seed);
          const Element x = 1 + seed % n;
          const auto rep = estimate_single(s, cfg, x);
          return !rep.estimate.is_too_low() &&
                 std::abs(rep.estimate.value() - d.mass(x)) <= cfg.eps * d.mass(x);
        },
        100, 5000 + n);
    ok = ok && r.rate >= 0.55;
    detail << fmt("N=%zu within 1+-eps %s; ", n, rate_str(r).c_str());

    std::vector<double> w(n, 0.0);
    std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n / 2), 1.0);
    const Distribution half = make_distribution(w);
    const auto z = success_rate(
        [&](std::uint64_t seed) {
          OracleSession s(half, seed);
          const Element x = n / 2 + 1 + seed % (n / 2);
          return estimate_single(s, cfg, x).estimate.is_too_low();
        },
        100, 9000 + n);
    ok = ok && z.rate == 1.0;
    detail << fmt("N=%zu zero-mass TooLow %llu/100; ", n, static_cast<unsigned long long>(z.successes));
  }
  return {ok, detail.str()};
}

Outcome criterion7() {
  const Profile p = desk_profile();
  const std::vector<unsigned> exps{10, 14, 18, 22};
  bool exact = true;
  std::vector<double> medians;
  std::ostringstream detail;
  for (unsigned e : exps) {
    const std::size_t n = std::size_t{1} << e;
    // An always-High comparator makes the count a function of N alone.
    std::vector<double> calls;
    for (int t = 0; t < 3; ++t) {
      const auto fa = find_good_alpha_with(n, [](double) { return Verdict::High; }, p);
      calls.push_back(static_cast<double>(fa.comparator_calls));
    }
    std::sort(calls.begin(), calls.end());
    const double med = calls[1];
    const auto formula = find_alpha_fallback_calls(n, p);
    exact = exact && med == static_cast<double>(formula);
    medians.push_back(med);
    detail << fmt("2^%u: %.0f (formula %llu); ", e, med, static_cast<unsigned long long>(formula));
  }
  const double ratio = medians.back() / medians.front();
  detail << fmt("ratio 2^22/2^10 = %.3f (limit 1.5)", ratio);
  return {exact && ratio <= 1.5, detail.str()};
}

Outcome criterion8() {
  const Profile p = desk_profile();
  const double eps = 0.3;
  const std::size_t n = 32;
  const Distribution uni = gen_named(parse_family("uniform"), n, 0);
  bool ok = true;
  std::ostringstream detail;

  const auto hist = success_rate(
      [&](std::uint64_t seed) {
        OracleSession s(uni, seed);
        return min_perm_tv(learn_histogram(s, p, eps).tau, uni) <= 2.0 * eps;
      },
      30, 100);
  ok = ok && hist.rate >= 0.6;
  detail << "histogram " << rate_str(hist) << "; ";

  std::vector<double> lo(n, 0.0);
  std::vector<double> hi(n, 0.0);
  std::fill(lo.begin(), lo.begin() + n / 2, 1.0);
  std::fill(hi.begin() + n / 2, hi.end(), 1.0);
  const Distribution left = make_distribution(lo);
  const Distribution right = make_distribution(hi);
  const auto same = success_rate(
      [&](std::uint64_t seed) {
        OracleSession a(uni, seed);
        OracleSession b(uni, seed + 7777);
        return estimate_dtv(a, b, p, eps).estimate <= eps;
      },
      30, 200);
  const auto apart = success_rate(
      [&](std::uint64_t seed) {
        OracleSession a(left, seed);
        OracleSession b(right, seed + 7777);
        return estimate_dtv(a, b, p, eps).estimate >= 1.0 - eps;
      },
      30, 300);
  ok = ok && same.rate >= 0.6 && apart.rate >= 0.6;
  detail << "dtv identical " << rate_str(same) << ", disjoint " << rate_str(apart) << "; ";

  // Q: mean per-instance sample cost with mu = tau, from runs without a cutoff.
  std::uint64_t cal_samples = 0;
  int cal_instances = 0;
  for (std::uint64_t seed : {900u, 901u}) {
    OracleSession a(uni, seed);
    OracleSession b(uni, seed + 50);
    const auto r = equivalence_test(a, b, p, eps, 0.0);
    cal_samples += r.samples;
    cal_instances += r.instances_run;
  }
  const double q = static_cast<double>(cal_samples) / cal_instances;
  const double cap = p.equiv_budget_factor * q + 1.0;
  bool within = true;
  const Distribution point = gen_named(parse_family("point_mass"), n, 0);
  auto equiv = [&](const Distribution& other, bool want_accept, std::uint64_t base) {
    return success_rate(
        [&](std::uint64_t seed) {
          OracleSession a(uni, seed);
          OracleSession b(other, seed + 7777);
          const auto r = equivalence_test(a, b, p, eps, q);
          within = within && static_cast<double>(r.samples) <= cap;
          return r.accept == want_accept;
        },
        30, base);
  };
  const auto acc = equiv(uni, true, 400);
  const auto rej = equiv(point, false, 500);
  ok = ok && acc.rate >= 0.6 && rej.rate >= 0.6 && within;
  detail << "equiv accept " << rate_str(acc) << ", reject " << rate_str(rej)
         << fmt(", Q=%.3g budget %s", q, within ? "respected" : "EXCEEDED");
  return {ok, detail.str()};
}

#ifdef CONDEST_CLI
std::string capture(const std::string& cmd) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return "<popen failed>";
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
  return out;
}
#endif

Outcome criterion9() {
#ifndef CONDEST_CLI
  return {false, "CLI not built"};
#else
  const std::string cli = CONDEST_CLI;
  const std::vector<std::string> commands{
      "estimate --dist gen:uniform:16 --x 3 --trials 2",
      "estimate --dist gen:zipf:1:64 --x 40 --trials 1",
      "histogram --dist gen:zipf:1:16 --eps 0.3",
      "dtv --distA gen:uniform:16 --distB gen:zipf:1:16 --eps 0.3",
      "equiv --distA gen:uniform:16 --distB gen:uniform:16 --eps 0.3 --q 1e8",
      "bench-scaling --n 1024 --n 4096 --trials 1",
      "bench-scaling --forced-high --format csv",
      "verify --n 6",
  };
  int same = 0;
  std::string mismatch;
  for (const auto& c : commands) {
    const std::string cmd = "\"" + cli + "\" " + c + " --seed 11 2>&1";
    const std::string first = capture(cmd);
    const std::string second = capture(cmd);
    if (first == second && !first.empty()) {
      ++same;
    } else if (mismatch.empty()) {
      mismatch = c;
    }
  }
  std::string detail = fmt("%d/%zu commands byte-identical", same, commands.size());
  if (!mismatch.empty()) detail += "; first mismatch: " + mismatch;
  return {same == static_cast<int>(commands.size()), detail};
#endif
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle identity", criterion1},     {"target-test error rates", criterion2},
      {"E[beta] landscape", criterion3},   {"saturation-aware estimator", criterion4},
      {"strict binary search", criterion5}, {"end-to-end estimate_single", criterion6},
      {"find-alpha scaling", criterion7},  {"applications", criterion8},
      {"CLI determinism", criterion9},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && pick.count(id) == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
