#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcsynth/classifier.hpp"
#include "mcsynth/topology.hpp"

namespace mcsynth {

struct ComponentId {
  std::uint32_t value = 0;
  friend auto operator<=>(const ComponentId&, const ComponentId&) = default;
};

enum class ComponentKind { Core, Cache, MainMemory, Switch };

struct Component {
  ComponentId id;
  ComponentKind kind = ComponentKind::Core;
  int level = 0;                         // caches only
  CacheRole role = CacheRole::Unified;   // caches only
  int index = 0;                         // 1-based within its family; 0 for memory

  friend bool operator==(const Component&, const Component&) = default;
};

enum class Stream { Data, Instruction, Both, Network };

std::string_view to_string(Stream stream);
std::optional<Stream> stream_from_string(std::string_view text);

/// Stream carried by a cache-to-upper link, fixed by the lower cache's role.
Stream stream_for(CacheRole role);

struct Connection {
  ComponentId lower;
  ComponentId upper;
  Stream stream = Stream::Both;

  friend bool operator==(const Connection&, const Connection&) = default;
};

/// Component/connection graph. Component ids equal their position in
/// `components`.
struct ArchGraph {
  TopologySpec spec;
  TopologyKind kind = TopologyKind::Regular;
  std::vector<Component> components;
  std::vector<Connection> connections;

  const Component& at(ComponentId id) const { return components.at(id.value); }
  bool contains(ComponentId id) const { return id.value < components.size(); }

  ComponentId add(ComponentKind kind, int level = 0, CacheRole role = CacheRole::Unified, int index = 0);

  /// Ids of the caches of one (level, role) family in index order.
  std::vector<ComponentId> caches(int level, CacheRole role) const;
  std::vector<ComponentId> of_kind(ComponentKind kind) const;
  std::optional<ComponentId> memory() const;

  /// Stable display name: C3, DL1#2, L3#1, MEM, SW4.
  std::string name(ComponentId id) const;
  std::optional<ComponentId> find(std::string_view name) const;

  friend bool operator==(const ArchGraph&, const ArchGraph&) = default;
};

std::string component_name(const Component& c);

/// Deterministic edge list: `# topology: NAME` header, then one
/// `lower -> upper [Stream]` line per connection in connection order.
std::string dump_edges(const ArchGraph& graph);

/// Parses a dump_edges text. Components are rebuilt from the names used in
/// the edges, in canonical id order. The spec comes from the header line.
ArchGraph parse_edges(std::string_view text);

}  // namespace mcsynth
