#include "condest/vx.hpp"

#include "condest/target.hpp"

namespace condest {

VxObject initialize_new_vx(Element x, std::uint64_t q) {
  VxObject obj;
  obj.anchor = x;
  obj.budget = q;
  return obj;
}

bool vx_query(OracleSession& s, const TargetParams& p, VxObject& obj, Element y) {
  ++obj.queries;
  if (y == obj.anchor) return false;
  if (auto it = obj.index.find(y); it != obj.index.end()) return obj.hist[it->second].second;
  const bool ans = target_test(s, obj.anchor, y, p);
  obj.index.emplace(y, obj.hist.size());
  obj.hist.emplace_back(y, ans);
  return ans;
}

}  // namespace condest
