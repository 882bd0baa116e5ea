#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "condest/oracle.hpp"
#include "condest/profile.hpp"

namespace condest {

// Lazily drawn target set for an anchor. Membership of each element is fixed
// by the first query and recorded in hist.
struct VxObject {
  Element anchor = 0;
  std::uint64_t budget = 0;
  std::vector<std::pair<Element, bool>> hist;
  std::unordered_map<Element, std::size_t> index;
  std::uint64_t queries = 0;

  bool over_budget() const { return queries > budget; }
};

VxObject initialize_new_vx(Element x, std::uint64_t q);

// y == anchor is never a member. A cached y costs nothing; a new y runs the
// canonical target test once and records the answer.
bool vx_query(OracleSession& s, const TargetParams& p, VxObject& obj, Element y);

}  // namespace condest
