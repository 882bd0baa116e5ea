#include "condest/search.hpp"

#include <bit>
#include <cmath>

#include "condest/error.hpp"
#include "condest/estimators.hpp"

namespace condest {

namespace {

std::size_t padded(std::size_t n) { return std::bit_ceil(n); }
int levels(std::size_t n) { return std::countr_zero(padded(n)); }

int ceil_log2(std::size_t n) { return n <= 1 ? 0 : levels(n); }

std::size_t n_prime(std::size_t n) { return 1 + static_cast<std::size_t>(ceil_log2(n)); }

// Real (non-padded) points among L, M, R at the root.
int root_calls(std::size_t n) {
  const std::size_t np = padded(n);
  const std::size_t m = np / 2;
  return 1 + (m <= n ? 1 : 0) + (np <= n ? 1 : 0);
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Low: return "low";
    case Verdict::Good: return "good";
    case Verdict::High: return "high";
  }
  return "?";
}

Verdict uncertain_comparator(OracleSession& s, const Config& cfg, Element x, double alpha) {
  const int k = cfg.k.comparator_medians;
  const double lo = median_of(k, [&] { return est_expected_beta(s, cfg, x, alpha); });
  const double hi = median_of(k, [&] { return est_expected_beta(s, cfg, x, std::min(1.0, 2.0 * alpha)); });
  if (hi < 0.905) return Verdict::Low;
  if (lo > 0.915) return Verdict::High;
  return Verdict::Good;
}

std::size_t strict_binary_search(std::size_t n, const std::function<Verdict(std::size_t)>& cmp,
                                 int walk_factor, std::vector<WalkStep>* trace) {
  if (n == 0) throw ValidationError("search range is empty");
  if (n == 1) return 1;
  const std::size_t np = padded(n);
  auto ask = [&](std::size_t i) { return i > n ? Verdict::High : cmp(i); };

  std::vector<WalkStep> stack;
  stack.reserve(static_cast<std::size_t>(levels(n)));
  std::size_t l = 1;
  std::size_t r = np;
  const long steps = static_cast<long>(walk_factor) * levels(n);
  auto pop = [&] {
    // The stack never empties below a non-root node; the root is its own parent.
    if (stack.empty()) {
      l = 1;
      r = np;
      return;
    }
    l = stack.back().l;
    r = stack.back().r;
    stack.pop_back();
  };
  for (long i = 0; i < steps; ++i) {
    if (l == r) {
      if (ask(l) != Verdict::Good) pop();
    } else {
      const std::size_t m = (l + r - 1) / 2;
      const Verdict al = ask(l);
      const Verdict am = ask(m);
      const Verdict ar = ask(r);
      const bool consistent =
          al <= am && am <= ar && al <= Verdict::Good && Verdict::Good <= ar;
      if (consistent) {
        stack.push_back({l, r});
        if (am == Verdict::Low) {
          l = m + 1;
        } else {
          r = m;
        }
      } else if (!(l == 1 && r == np)) {
        pop();
      }
    }
    if (trace != nullptr) trace->push_back({l, r});
  }
  return std::min(l, n);
}

std::vector<std::size_t> residue_sizes(std::size_t n) {
  const auto np = static_cast<long>(n_prime(n));
  std::vector<std::size_t> sizes(6, 0);
  for (long r = 0; r < 6; ++r) {
    if (np - r >= 0) sizes[static_cast<std::size_t>(r)] = static_cast<std::size_t>((np - r) / 6 + 1);
  }
  return sizes;
}

FindAlphaResult find_good_alpha_with(std::size_t n, const std::function<Verdict(double)>& base,
                                     const Profile& profile) {
  if (n == 0) throw ValidationError("domain size must be positive");
  FindAlphaResult res;
  const auto sizes = residue_sizes(n);
  for (int r = 0; r < 6; ++r) {
    const std::size_t nr = sizes[static_cast<std::size_t>(r)];
    if (nr == 0) continue;
    // Positions run from the smallest alpha (p = 1) to the largest (p = nr),
    // so verdicts are non-decreasing in p.
    auto exponent_at = [&](std::size_t p) { return 6 * static_cast<int>(nr - p) + r; };
    auto oracle = [&](std::size_t p) {
      ++res.comparator_calls;
      const double alpha = std::ldexp(1.0, -exponent_at(p));
      return median_of(profile.oracle_medians, [&] { return base(alpha); });
    };
    const std::size_t p = median_of(profile.search_repeats, [&] {
      return strict_binary_search(nr, oracle, profile.walk_factor);
    });
    if (oracle(p) == Verdict::Good) {
      res.exponent = exponent_at(p);
      res.alpha = std::ldexp(1.0, -res.exponent);
      return res;
    }
  }
  res.fallback = true;
  res.exponent = static_cast<int>(n_prime(n));
  res.alpha = std::ldexp(1.0, -res.exponent);
  return res;
}

FindAlphaResult find_good_alpha(OracleSession& s, const Config& cfg, Element x) {
  return find_good_alpha_with(
      s.dist().size(), [&](double alpha) { return uncertain_comparator(s, cfg, x, alpha); },
      cfg.k);
}

std::uint64_t find_alpha_fallback_calls(std::size_t n, const Profile& profile) {
  std::uint64_t total = 0;
  for (std::size_t nr : residue_sizes(n)) {
    if (nr == 0) continue;
    const std::uint64_t steps = static_cast<std::uint64_t>(profile.walk_factor) *
                                static_cast<std::uint64_t>(nr > 1 ? levels(nr) : 0);
    const std::uint64_t per_step = nr > 1 ? static_cast<std::uint64_t>(root_calls(nr)) : 0;
    total += static_cast<std::uint64_t>(profile.search_repeats) * steps * per_step + 1;
  }
  return total;
}

std::uint64_t find_alpha_worst_case_calls(std::size_t n, const Profile& profile) {
  std::uint64_t total = 0;
  for (std::size_t nr : residue_sizes(n)) {
    if (nr == 0) continue;
    const std::uint64_t steps = static_cast<std::uint64_t>(profile.walk_factor) *
                                static_cast<std::uint64_t>(nr > 1 ? levels(nr) : 0);
    total += static_cast<std::uint64_t>(profile.search_repeats) * steps * 3 + 1;
  }
  return total;
}

}  // namespace condest
