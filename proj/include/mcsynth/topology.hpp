#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcsynth/error.hpp"

namespace mcsynth {

/// Order matters: groups within a level sort Data < Instruction < Unified.
enum class CacheRole { Data, Instruction, Unified };

std::string_view role_prefix(CacheRole role);  // "DL", "IL", "L"

struct CacheGroup {
  int level = 1;
  CacheRole role = CacheRole::Unified;
  int count = 1;

  friend bool operator==(const CacheGroup&, const CacheGroup&) = default;
};

/// Structured form of a topology name such as "5C_5DL1_2IL1_2DL2_BP".
struct TopologySpec {
  int cores = 0;
  std::vector<CacheGroup> groups;
  bool bypass = false;

  /// Count of the (level, role) group, 0 when absent.
  int count(int level, CacheRole role) const;
  bool has(int level, CacheRole role) const { return count(level, role) > 0; }
  bool split_at(int level) const {
    return has(level, CacheRole::Data) || has(level, CacheRole::Instruction);
  }
  int depth() const;

  friend bool operator==(const TopologySpec&, const TopologySpec&) = default;
};

/// Returns a description of the first broken invariant, or nullopt when the
/// spec is valid.
std::optional<std::string> find_rule_violation(const TopologySpec& spec);

/// Throws Error(InvalidSpec) when the spec breaks an invariant.
void require_valid(const TopologySpec& spec);

/// Throws Error(MalformedName) for syntax problems and Error(RuleViolation)
/// for well-formed names that break a topology rule.
TopologySpec parse_topology(std::string_view name);

/// Inverse of parse_topology. Throws Error(InvalidSpec).
std::string canonical_name(const TopologySpec& spec);

struct TopologyListEntry {
  std::size_t line = 0;
  std::string text;
  std::variant<TopologySpec, Error> result;

  bool ok() const { return std::holds_alternative<TopologySpec>(result); }
  const TopologySpec& spec() const { return std::get<TopologySpec>(result); }
  const Error& error() const { return std::get<Error>(result); }
};

/// One entry per non-blank, non-'#' line. Per-line failures are recorded in
/// the entry, never thrown.
std::vector<TopologyListEntry> load_topology_list(std::string_view text);

}  // namespace mcsynth
