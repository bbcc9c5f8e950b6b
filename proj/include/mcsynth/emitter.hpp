#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mcsynth/graph.hpp"

namespace mcsynth {

struct CacheGeometry {
  int sets = 0;
  int assoc = 0;
  int block_size = 0;
  int latency = 0;
  std::string policy = "LRU";
};

struct NetworkParams {
  int input_buffer = 1024;
  int output_buffer = 1024;
  int bandwidth = 64;
};

/// Cache geometry per level plus memory and network parameters. The shipped
/// defaults are L1 32 KiB/4-way, L2 256 KiB/8-way, L3 2 MiB/16-way, 64 B
/// blocks, LRU, memory latency 200.
struct CacheProfile {
  std::map<int, CacheGeometry> levels;
  int memory_latency = 200;
  int memory_block_size = 64;
  NetworkParams network;

  static CacheProfile defaults();
  /// Throws Error(ProfileInvalid).
  void validate() const;
};

/// Reads `[L1]`, `[L2]`, `[L3]`, `[Memory]`, `[Network]` sections over the
/// defaults. Throws Error(ProfileInvalid).
CacheProfile parse_profile(std::string_view text);

struct ConfigBundle {
  std::string mem_config;
  std::string net_config;
  std::map<std::string, int> loc_breakdown;
};

/// Memory-hierarchy INI (geometries, entries, modules). Throws
/// Error(UnvalidatedGraph) if the graph fails validation and
/// Error(ProfileInvalid) for a bad profile.
std::string emit_mem_config(const ArchGraph& graph, const CacheProfile& profile);

/// Interconnect INI: one network per upper module; switched networks carry
/// end nodes, switch elements and links.
std::string emit_net_config(const ArchGraph& graph, const CacheProfile& profile);

ConfigBundle emit_bundle(const ArchGraph& graph, const CacheProfile& profile);

/// Non-blank lines per class: core-entry, L1, L2/L3, memory, geometry,
/// connection, switch. Derived from the bundle texts.
std::map<std::string, int> loc_report(const ConfigBundle& bundle);

/// Non-blank lines attributed to each emitted element (an entry, a module, a
/// geometry, a network/node/link section, or a whole switch element).
struct LocItem {
  std::string klass;
  std::string subject;
  int lines = 0;
};
std::vector<LocItem> loc_items(const ConfigBundle& bundle);

int count_nonblank_lines(std::string_view text);

/// Rebuilds a graph from emitted configuration text so that hand-edited
/// files can be validated. Throws Error(IoFailure) on structural problems.
ArchGraph import_config(std::string_view mem_config, std::string_view net_config, const TopologySpec& spec);

std::string module_name(const Component& c);

}  // namespace mcsynth
