#pragma once

#include <string>
#include <vector>

#include "mcsynth/graph.hpp"

namespace mcsynth {

struct Violation {
  std::string code;     // cardinality, edge, stream, out-degree, fan-in, switch, layering, cycle, reachability
  std::string subject;  // component name or "LOWER->UPPER" family pair
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  void add(std::string code, std::string subject, std::string message);
  void merge(const ValidationReport& other);
  std::string summary() const;
};

/// Component counts per family, a single memory, and switch count.
ValidationReport validate_cardinality(const ArchGraph& graph, const TopologySpec& spec);

/// Per-level connection quotas, stream tags, single-parent rules and the
/// switch-network shape. Runs validate_cardinality first and stops there if
/// it fails.
ValidationReport validate_connectivity(const ArchGraph& graph, const TopologySpec& spec);

/// Cardinality, connectivity, acyclicity and memory reachability.
ValidationReport validate_graph(const ArchGraph& graph, const TopologySpec& spec);

/// Switches needed for one family of `n` caches (0 for n < 2).
int family_switch_count(int n);

}  // namespace mcsynth
