#include "condest/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "condest/error.hpp"

namespace condest {

namespace {

constexpr int kRejectionTries = 32;

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
// Draws served by rejection before a filter is materialized.
constexpr int kRejectionUses = 16;

std::uint64_t filter_threshold(double alpha) {
  if (alpha >= 1.0) return ~std::uint64_t{0};
  if (alpha <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ldexp(alpha, 64));
}

std::vector<Element> unique_ids(std::vector<Element> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool listed(const FilterUnion& f, Element y) {
  return y == f.anchor || std::find(f.extra.begin(), f.extra.end(), y) != f.extra.end();
}

// Hash-regime membership; callers pass the precomputed threshold.
bool member(const FilterUnion& f, std::uint64_t threshold, Element y) {
  if (f.alpha >= 1.0 || listed(f, y)) return true;
  return hash64(f.seed, y) < threshold;
}

}  // namespace

std::uint64_t hash64(std::uint64_t seed, std::uint64_t y) { return mix(seed ^ mix(y)); }

std::vector<Element> filter_support_members(const FilterUnion& f, const Distribution& d) {
  const auto& support = d.support();
  std::vector<Element> out;
  if (f.alpha <= 0.0) return out;
  if (f.alpha >= 1.0) return support;
  if (f.alpha >= FilterUnion::kSkipAlpha) {
    const std::uint64_t thr = filter_threshold(f.alpha);
    for (Element y : support) {
      if (hash64(f.seed, y) < thr) out.push_back(y);
    }
    return out;
  }
  // Gaps between members are geometric: P(gap = k) = (1 - alpha)^k alpha.
  const double log_q = std::log1p(-f.alpha);
  std::size_t pos = 0;
  for (std::uint64_t j = 0;; ++j) {
    const double u = static_cast<double>((mix(f.seed ^ mix(0xa0761d6478bd642fULL + j)) >> 11) + 1) * 0x1.0p-53;
    const double gap = std::floor(std::log(u) / log_q);
    if (!(gap < static_cast<double>(support.size() - pos))) break;
    pos += static_cast<std::size_t>(gap);
    out.push_back(support[pos]);
    ++pos;
  }
  return out;
}

bool filter_contains(const FilterUnion& f, const Distribution& d, Element y) {
  if (listed(f, y)) return true;
  if (f.alpha >= 1.0) return true;
  if (f.alpha <= 0.0) return false;
  if (f.alpha >= FilterUnion::kSkipAlpha || !(d.mass(y) > 0.0)) {
    return hash64(f.seed, y) < filter_threshold(f.alpha);
  }
  const auto members = filter_support_members(f, d);
  return std::binary_search(members.begin(), members.end(), y);
}

bool contains(const ConditionSet& c, const Distribution& d, Element y) {
  if (auto* e = std::get_if<Explicit>(&c)) {
    return std::find(e->ids.begin(), e->ids.end(), y) != e->ids.end();
  }
  if (auto* p = std::get_if<Pair>(&c)) return y == p->x || y == p->y;
  return filter_contains(std::get<FilterUnion>(c), d, y);
}

OracleSession::OracleSession(const Distribution& d, std::uint64_t seed, ZeroPolicy policy)
    : dist_(&d), rng_(seed), policy_(policy) {}

OracleSession::Phase::Phase(Phase&& other) noexcept : session_(other.session_) {
  other.session_ = nullptr;
}

OracleSession::Phase::~Phase() {
  if (session_ != nullptr) {
    session_->in_phase_ = false;
    session_->label_ = kUnphased;
    session_->slot_owner_ = nullptr;
  }
}

OracleSession::Phase OracleSession::phase(const std::string& label) {
  if (in_phase_) {
    throw std::logic_error("phase '" + label + "' opened inside phase '" + label_ + "'");
  }
  in_phase_ = true;
  label_ = label;
  slot_owner_ = nullptr;
  counters_.try_emplace(label, 0);
  return Phase(this);
}

void OracleSession::charge(std::uint64_t k) {
  if (budget_) {
    if (budget_->used + k > budget_->limit) {
      throw BudgetExhausted("sample budget of " + std::to_string(budget_->limit) + " exhausted");
    }
    budget_->used += k;
  }
  // The cached slot is tied to this object so copies re-resolve it.
  if (slot_owner_ != this) {
    slot_ = &counters_[label_];
    slot_owner_ = this;
  }
  *slot_ += k;
  total_ += k;
}

Element OracleSession::sample() {
  charge(1);
  return dist_->sample(rng_);
}

Element OracleSession::draw_from(const std::vector<Element>& ids,
                                 const std::vector<double>& cumulative) {
  double u = std::uniform_real_distribution<double>(0.0, cumulative.back())(rng_);
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return ids[static_cast<std::size_t>(it - cumulative.begin())];
}

std::optional<Element> OracleSession::on_zero_mass(const std::vector<Element>& members) {
  ++zero_requests_;
  if (policy_ == ZeroPolicy::ErrorSymbol || members.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  return members[pick(rng_)];
}

std::optional<Element> OracleSession::sample_conditional(const ConditionSet& c) {
  if (auto* f = std::get_if<FilterUnion>(&c)) return sample_filter(*f);

  std::vector<Element> ids;
  if (auto* e = std::get_if<Explicit>(&c)) {
    ids = unique_ids(e->ids);
  } else {
    const auto& p = std::get<Pair>(c);
    ids = unique_ids({p.x, p.y});
  }
  if (ids.empty()) throw ValidationError("conditioning set is empty");
  for (Element y : ids) (void)dist_->mass(y);
  charge(1);

  std::vector<double> cumulative;
  cumulative.reserve(ids.size());
  double run = 0.0;
  for (Element y : ids) {
    run += dist_->masses()[y - 1];
    cumulative.push_back(run);
  }
  if (run <= 0.0) return on_zero_mass(ids);
  return draw_from(ids, cumulative);
}

bool OracleSession::same_filter(const FilterTable& t, const FilterUnion& f) {
  return t.seed == f.seed && t.alpha == f.alpha && t.anchor == f.anchor && t.extra == f.extra;
}

void OracleSession::build_table(const FilterUnion& f) {
  table_ = FilterTable{f.seed, f.alpha, f.anchor, f.extra, {}, {}, {}};
  std::vector<Element> ids = filter_support_members(f, *dist_);
  const auto mid = static_cast<std::ptrdiff_t>(ids.size());
  ids.push_back(f.anchor);
  ids.insert(ids.end(), f.extra.begin(), f.extra.end());
  std::inplace_merge(ids.begin(), ids.begin() + mid, ids.end());
  std::sort(ids.begin() + mid, ids.end());
  std::inplace_merge(ids.begin(), ids.begin() + mid, ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  double run = 0.0;
  for (Element y : ids) {
    const double m = dist_->mass(y);
    if (m > 0.0) {
      run += m;
      table_.members.push_back(y);
      table_.cumulative.push_back(run);
    }
  }
  if (run <= 0.0 && policy_ == ZeroPolicy::UniformFallback) {
    for (Element y = 1; y <= dist_->size(); ++y) {
      if (filter_contains(f, *dist_, y)) table_.all_members.push_back(y);
    }
  }
  table_valid_ = true;
}

// Large filters start with rejection sampling from mu; a filter drawn from
// many times, or whose rejection loop fails, is materialized. Small filters
// are materialized right away. Every path draws exactly from mu conditioned
// on the set.
std::optional<Element> OracleSession::sample_filter(const FilterUnion& f) {
  if (f.anchor < 1 || f.anchor > dist_->size()) throw ValidationError("filter anchor out of range");
  charge(1);
  if (!(table_valid_ && same_filter(table_, f))) {
    if (f.alpha >= FilterUnion::kSkipAlpha) {
      if (!(last_seen_valid_ && same_filter(last_seen_, f))) {
        last_seen_.seed = f.seed;
        last_seen_.alpha = f.alpha;
        last_seen_.anchor = f.anchor;
        last_seen_.extra = f.extra;
        last_seen_valid_ = true;
        last_uses_ = 0;
        last_failed_ = false;
      }
      if (!last_failed_ && ++last_uses_ <= kRejectionUses) {
        const std::uint64_t thr = filter_threshold(f.alpha);
        for (int i = 0; i < kRejectionTries; ++i) {
          const Element y = dist_->sample(rng_);
          if (member(f, thr, y)) return y;
        }
        last_failed_ = true;
      }
    }
    build_table(f);
  }
  if (table_.members.empty()) return on_zero_mass(table_.all_members);
  return draw_from(table_.members, table_.cumulative);
}

std::optional<std::uint64_t> OracleSession::count_pair(Element x, Element y, std::uint64_t ell) {
  const double mx = dist_->mass(x);
  const double my = dist_->mass(y);
  if (ell == 0) return 0;
  if (x == y) {
    if (mx <= 0.0 && policy_ == ZeroPolicy::ErrorSymbol) {
      charge(1);
      ++zero_requests_;
      return std::nullopt;
    }
    charge(ell);
    return ell;
  }
  double p;
  if (mx + my <= 0.0) {
    if (policy_ == ZeroPolicy::ErrorSymbol) {
      charge(1);
      ++zero_requests_;
      return std::nullopt;
    }
    zero_requests_ += ell;
    p = 0.5;
  } else {
    p = my / (mx + my);
  }
  if (!batch_pairs_) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < ell; ++i) {
      auto z = sample_conditional(Pair{x, y});
      if (!z) return std::nullopt;
      hits += *z == y;
    }
    return hits;
  }
  charge(ell);
  if (p <= 0.0) return 0;
  if (p >= 1.0) return ell;
  return std::binomial_distribution<std::uint64_t>(ell, p)(rng_);
}

double OracleSession::conditional_mass(const ConditionSet& c) const {
  if (auto* f = std::get_if<FilterUnion>(&c)) {
    double s = 0.0;
    for (Element y : dist_->support()) {
      if (filter_contains(*f, *dist_, y)) s += dist_->masses()[y - 1];
    }
    return s;
  }
  std::vector<Element> ids;
  if (auto* e = std::get_if<Explicit>(&c)) {
    ids = unique_ids(e->ids);
  } else {
    const auto& p = std::get<Pair>(c);
    ids = unique_ids({p.x, p.y});
  }
  double s = 0.0;
  for (Element y : ids) s += dist_->mass(y);
  return s;
}

}  // namespace condest
