#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "condest/dist.hpp"

namespace condest {

struct Explicit {
  std::vector<Element> ids;
};

struct Pair {
  Element x = 0;
  Element y = 0;
};

// A_alpha u {anchor} u extra, where every element joins A_alpha independently
// with probability alpha. For alpha >= kSkipAlpha membership is
// hash64(seed, y) < alpha 2^64. Below that, support members are read off a
// seeded geometric skip sequence over the support order (zero-mass elements
// still use the hash), so tiny filters materialize in O(alpha |support|).
struct FilterUnion {
  static constexpr double kSkipAlpha = 1.0 / 32.0;

  std::uint64_t seed = 0;
  double alpha = 0.0;
  Element anchor = 0;
  std::vector<Element> extra;
};

using ConditionSet = std::variant<Explicit, Pair, FilterUnion>;

std::uint64_t hash64(std::uint64_t seed, std::uint64_t y);
// Support elements of d in A_alpha (anchor and extra not included), ascending.
std::vector<Element> filter_support_members(const FilterUnion& f, const Distribution& d);
bool filter_contains(const FilterUnion& f, const Distribution& d, Element y);
bool contains(const ConditionSet& c, const Distribution& d, Element y);

enum class ZeroPolicy { ErrorSymbol, UniformFallback };

// Shared cap on the number of samples across sessions. Drawing past the
// limit throws BudgetExhausted before the draw happens.
struct SampleBudget {
  std::uint64_t limit = 0;
  std::uint64_t used = 0;
};

// Seeded sampling session over a distribution. Counts every sample under the
// active phase label. The distribution must outlive the session.
class OracleSession {
 public:
  static constexpr const char* kUnphased = "unphased";

  OracleSession(const Distribution& d, std::uint64_t seed,
                ZeroPolicy policy = ZeroPolicy::ErrorSymbol);

  const Distribution& dist() const { return *dist_; }
  ZeroPolicy zero_policy() const { return policy_; }

  Element sample();
  // nullopt is the error symbol (zero-mass set under ErrorSymbol policy).
  std::optional<Element> sample_conditional(const ConditionSet& c);
  // Number of draws equal to y among ell draws conditioned on {x, y}.
  // Charges ell samples. nullopt if the pair has zero mass under ErrorSymbol.
  std::optional<std::uint64_t> count_pair(Element x, Element y, std::uint64_t ell);
  // Exact mu(c); simulation internals only.
  double conditional_mass(const ConditionSet& c) const;

  class Phase {
   public:
    Phase(Phase&& other) noexcept;
    Phase(const Phase&) = delete;
    Phase& operator=(const Phase&) = delete;
    Phase& operator=(Phase&&) = delete;
    ~Phase();

   private:
    friend class OracleSession;
    explicit Phase(OracleSession* s) : session_(s) {}
    OracleSession* session_;
  };
  // Labels subsequent samples until the returned guard is destroyed.
  // Throws std::logic_error if a phase is already active.
  [[nodiscard]] Phase phase(const std::string& label);
  const std::string& active_phase() const { return label_; }

  const std::map<std::string, std::uint64_t>& counters() const { return counters_; }
  std::uint64_t total() const { return total_; }
  // Conditional requests on zero-mass sets seen so far.
  std::uint64_t zero_mass_requests() const { return zero_requests_; }

  std::mt19937_64& rng() { return rng_; }
  // Draws a seed for a fresh filter or child stream.
  std::uint64_t fresh_seed() { return rng_(); }

  // Pair counts come from one binomial draw by default; disabling batching
  // draws the ell conditional samples one by one.
  void set_pair_batching(bool on) { batch_pairs_ = on; }
  void attach_budget(std::shared_ptr<SampleBudget> budget) { budget_ = std::move(budget); }

 private:
  struct FilterTable {
    std::uint64_t seed = 0;
    double alpha = 0.0;
    Element anchor = 0;
    std::vector<Element> extra;
    std::vector<Element> members;
    std::vector<double> cumulative;
    std::vector<Element> all_members;  // only built for the uniform fallback
  };

  void charge(std::uint64_t k);
  std::optional<Element> on_zero_mass(const std::vector<Element>& members);
  std::optional<Element> sample_filter(const FilterUnion& f);
  void build_table(const FilterUnion& f);
  Element draw_from(const std::vector<Element>& ids, const std::vector<double>& cumulative);
  static bool same_filter(const FilterTable& t, const FilterUnion& f);

  const Distribution* dist_;
  std::mt19937_64 rng_;
  ZeroPolicy policy_;
  std::string label_ = kUnphased;
  bool in_phase_ = false;
  std::map<std::string, std::uint64_t> counters_;
  std::uint64_t* slot_ = nullptr;
  const OracleSession* slot_owner_ = nullptr;
  std::uint64_t total_ = 0;
  std::uint64_t zero_requests_ = 0;
  bool batch_pairs_ = true;
  std::shared_ptr<SampleBudget> budget_;

  FilterTable table_;
  bool table_valid_ = false;
  FilterTable last_seen_;
  bool last_seen_valid_ = false;
  int last_uses_ = 0;
  bool last_failed_ = false;
};

}  // namespace condest
