#pragma once

#include <optional>
#include <string_view>

#include "mcsynth/topology.hpp"

namespace mcsynth {

/// Generation method selected by the decision tree.
enum class TopologyKind { Regular, SemiHybrid, Hybrid, Bypass2, Bypass3 };

std::string_view to_string(TopologyKind kind);
std::optional<TopologyKind> kind_from_string(std::string_view text);

constexpr bool is_bypass(TopologyKind kind) {
  return kind == TopologyKind::Bypass2 || kind == TopologyKind::Bypass3;
}

/// Walks the four-rule decision tree:
///   no split caches            -> Regular
///   split, no DL2              -> SemiHybrid
///   DL2, no BP                 -> Hybrid
///   BP, no IL2                 -> Bypass2, else Bypass3
/// Throws Error(InvalidSpec) for an invalid spec.
TopologyKind classify(const TopologySpec& spec);

}  // namespace mcsynth
