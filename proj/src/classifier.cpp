#include "mcsynth/classifier.hpp"

namespace mcsynth {

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Regular: return "Regular";
    case TopologyKind::SemiHybrid: return "SemiHybrid";
    case TopologyKind::Hybrid: return "Hybrid";
    case TopologyKind::Bypass2: return "Bypass2";
    case TopologyKind::Bypass3: return "Bypass3";
  }
  return "?";
}

std::optional<TopologyKind> kind_from_string(std::string_view text) {
  for (auto k : {TopologyKind::Regular, TopologyKind::SemiHybrid, TopologyKind::Hybrid,
                 TopologyKind::Bypass2, TopologyKind::Bypass3}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

TopologyKind classify(const TopologySpec& spec) {
  require_valid(spec);
  bool any_split = false;
  for (const auto& g : spec.groups) any_split = any_split || g.role != CacheRole::Unified;
  if (!any_split) return TopologyKind::Regular;
  if (!spec.has(2, CacheRole::Data)) return TopologyKind::SemiHybrid;
  if (!spec.bypass) return TopologyKind::Hybrid;
  if (!spec.has(2, CacheRole::Instruction)) return TopologyKind::Bypass2;
  return TopologyKind::Bypass3;
}

}  // namespace mcsynth
