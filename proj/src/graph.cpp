#include "mcsynth/graph.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <tuple>

#include "mcsynth/error.hpp"
#include "mcsynth/ini.hpp"

namespace mcsynth {

std::string_view to_string(Stream stream) {
  switch (stream) {
    case Stream::Data: return "Data";
    case Stream::Instruction: return "Instruction";
    case Stream::Both: return "Both";
    case Stream::Network: return "Network";
  }
  return "?";
}

std::optional<Stream> stream_from_string(std::string_view text) {
  for (auto s : {Stream::Data, Stream::Instruction, Stream::Both, Stream::Network}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

Stream stream_for(CacheRole role) {
  switch (role) {
    case CacheRole::Data: return Stream::Data;
    case CacheRole::Instruction: return Stream::Instruction;
    case CacheRole::Unified: return Stream::Both;
  }
  return Stream::Both;
}

ComponentId ArchGraph::add(ComponentKind kind, int level, CacheRole role, int index) {
  ComponentId id{static_cast<std::uint32_t>(components.size())};
  components.push_back(Component{id, kind, level, role, index});
  return id;
}

std::vector<ComponentId> ArchGraph::caches(int level, CacheRole role) const {
  std::vector<const Component*> found;
  for (const auto& c : components) {
    if (c.kind == ComponentKind::Cache && c.level == level && c.role == role) found.push_back(&c);
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Component* a, const Component* b) { return a->index < b->index; });
  std::vector<ComponentId> out;
  for (const auto* c : found) out.push_back(c->id);
  return out;
}

std::vector<ComponentId> ArchGraph::of_kind(ComponentKind kind) const {
  std::vector<ComponentId> out;
  for (const auto& c : components) {
    if (c.kind == kind) out.push_back(c.id);
  }
  return out;
}

std::optional<ComponentId> ArchGraph::memory() const {
  for (const auto& c : components) {
    if (c.kind == ComponentKind::MainMemory) return c.id;
  }
  return std::nullopt;
}

std::string component_name(const Component& c) {
  switch (c.kind) {
    case ComponentKind::Core: return "C" + std::to_string(c.index);
    case ComponentKind::Cache:
      return std::string(role_prefix(c.role)) + std::to_string(c.level) + "#" + std::to_string(c.index);
    case ComponentKind::MainMemory: return "MEM";
    case ComponentKind::Switch: return "SW" + std::to_string(c.index);
  }
  return "?";
}

std::string ArchGraph::name(ComponentId id) const {
  if (!contains(id)) return "#" + std::to_string(id.value);
  return component_name(at(id));
}

std::optional<ComponentId> ArchGraph::find(std::string_view name) const {
  for (const auto& c : components) {
    if (component_name(c) == name) return c.id;
  }
  return std::nullopt;
}

std::string dump_edges(const ArchGraph& graph) {
  std::ostringstream out;
  std::string topo;
  try {
    topo = canonical_name(graph.spec);
  } catch (const Error&) {
    topo = "?";
  }
  out << "# topology: " << topo << "\n";
  out << "# kind: " << to_string(graph.kind) << "\n";
  for (const auto& e : graph.connections) {
    out << graph.name(e.lower) << " -> " << graph.name(e.upper) << " [" << to_string(e.stream) << "]\n";
  }
  return out.str();
}

namespace {

std::optional<int> number(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1) return std::nullopt;
  return v;
}

/// Decodes a component name into (sort key, component template).
std::optional<Component> decode_name(std::string_view n) {
  Component c;
  if (n == "MEM") {
    c.kind = ComponentKind::MainMemory;
    return c;
  }
  if (n.size() > 2 && n.substr(0, 2) == "SW") {
    auto idx = number(n.substr(2));
    if (!idx) return std::nullopt;
    c.kind = ComponentKind::Switch;
    c.index = *idx;
    return c;
  }
  if (n.size() > 1 && n[0] == 'C') {
    auto idx = number(n.substr(1));
    if (!idx) return std::nullopt;
    c.kind = ComponentKind::Core;
    c.index = *idx;
    return c;
  }
  const auto hash = n.find('#');
  if (hash == std::string_view::npos) return std::nullopt;
  auto head = n.substr(0, hash);
  auto idx = number(n.substr(hash + 1));
  if (!idx || head.empty()) return std::nullopt;
  c.kind = ComponentKind::Cache;
  c.index = *idx;
  const char lv = head.back();
  if (lv < '1' || lv > '3') return std::nullopt;
  c.level = lv - '0';
  auto prefix = head.substr(0, head.size() - 1);
  if (prefix == "DL") c.role = CacheRole::Data;
  else if (prefix == "IL") c.role = CacheRole::Instruction;
  else if (prefix == "L") c.role = CacheRole::Unified;
  else return std::nullopt;
  return c;
}

auto canonical_key(const Component& c) {
  return std::make_tuple(static_cast<int>(c.kind), c.level, static_cast<int>(c.role), c.index);
}

}  // namespace

ArchGraph parse_edges(std::string_view text) {
  ArchGraph g;
  std::optional<TopologySpec> spec;
  struct RawEdge {
    std::string lower, upper;
    Stream stream;
  };
  std::vector<RawEdge> raw;
  std::map<std::string, Component> named;

  const auto lines = ini::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = ini::trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view tag = "# topology:";
      if (line.substr(0, tag.size()) == tag) spec = parse_topology(ini::trim(line.substr(tag.size())));
      continue;
    }
    const auto where = "edge list line " + std::to_string(i + 1);
    auto arrow = line.find("->");
    auto open = line.rfind('[');
    if (arrow == std::string_view::npos || open == std::string_view::npos || line.back() != ']' || open < arrow) {
      throw Error(ErrorCode::IoFailure, where + ": expected 'lower -> upper [Stream]'");
    }
    auto lower = std::string(ini::trim(line.substr(0, arrow)));
    auto upper = std::string(ini::trim(line.substr(arrow + 2, open - arrow - 2)));
    auto stream = stream_from_string(line.substr(open + 1, line.size() - open - 2));
    if (!stream) throw Error(ErrorCode::IoFailure, where + ": unknown stream");
    for (const auto& n : {lower, upper}) {
      auto c = decode_name(n);
      if (!c) throw Error(ErrorCode::IoFailure, where + ": unknown component name '" + n + "'");
      named.emplace(n, *c);
    }
    raw.push_back({lower, upper, *stream});
  }
  if (!spec) throw Error(ErrorCode::IoFailure, "edge list has no '# topology:' header");
  g.spec = *spec;
  g.kind = classify(*spec);

  std::vector<std::pair<std::string, Component>> ordered(named.begin(), named.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return canonical_key(a.second) < canonical_key(b.second); });
  std::map<std::string, ComponentId> ids;
  for (const auto& [n, c] : ordered) ids[n] = g.add(c.kind, c.level, c.role, c.index);
  for (const auto& e : raw) g.connections.push_back({ids.at(e.lower), ids.at(e.upper), e.stream});
  return g;
}

}  // namespace mcsynth
