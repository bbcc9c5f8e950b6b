#pragma once

#include <span>
#include <vector>

#include "mcsynth/graph.hpp"

namespace mcsynth {

/// Fair split of `nc` lower components over `mc` upper ones:
/// base = nc / mc, remainder = nc % mc, total = base * mc + remainder.
struct ConnectionQuota {
  int base = 0;
  int remainder = 0;
  int total = 0;

  friend bool operator==(const ConnectionQuota&, const ConnectionQuota&) = default;
};

/// Throws Error(QuotaDomain) unless nc >= mc >= 1.
ConnectionQuota connection_quota(int nc, int mc);

/// Connects each child, in order, to an empty parent if one exists, else to
/// the least-connected parent (lowest index wins ties).
std::vector<Connection> assign_level(std::span<const ComponentId> children,
                                     std::span<const ComponentId> parents, Stream stream);

/// Cores, caches and memory with all hierarchy links. For bypass specs the
/// bypassing caches are linked straight to their attachment component;
/// build_bypass_network replaces those links with switches.
ArchGraph build_core_graph(const TopologySpec& spec);

/// Inserts the switch network in front of every attachment component.
/// Throws Error(NotBypass) for non-bypass graphs.
ArchGraph build_bypass_network(ArchGraph graph);

/// classify + build_core_graph + build_bypass_network + validate_graph.
/// Throws Error(InvalidSpec) or Error(GenerationInvariantBroken).
ArchGraph generate(const TopologySpec& spec);

}  // namespace mcsynth
