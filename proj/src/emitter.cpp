#include "mcsynth/emitter.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "mcsynth/error.hpp"
#include "mcsynth/ini.hpp"
#include "mcsynth/validator.hpp"

namespace mcsynth {

CacheProfile CacheProfile::defaults() {
  CacheProfile p;
  p.levels[1] = {128, 4, 64, 2, "LRU"};    // 32 KiB
  p.levels[2] = {512, 8, 64, 10, "LRU"};   // 256 KiB
  p.levels[3] = {2048, 16, 64, 30, "LRU"}; // 2 MiB
  return p;
}

void CacheProfile::validate() const {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::ProfileInvalid, "cache profile: " + why); };
  auto pow2 = [](int v) { return v > 0 && (v & (v - 1)) == 0; };
  for (int level = 1; level <= 3; ++level) {
    auto it = levels.find(level);
    if (it == levels.end()) bad("missing level " + std::to_string(level));
    const auto& g = it->second;
    const auto where = "L" + std::to_string(level) + " ";
    if (g.sets <= 0 || g.assoc <= 0 || g.latency <= 0) bad(where + "sets, assoc and latency must be positive");
    if (!pow2(g.block_size)) bad(where + "block size must be a power of two");
    if (g.policy != "LRU" && g.policy != "FIFO" && g.policy != "Random") bad(where + "unknown policy " + g.policy);
  }
  if (memory_latency <= 0) bad("memory latency must be positive");
  if (!pow2(memory_block_size)) bad("memory block size must be a power of two");
  if (network.input_buffer <= 0 || network.output_buffer <= 0 || network.bandwidth <= 0) {
    bad("network parameters must be positive");
  }
}

namespace {

int to_int(const ini::Entry& e) {
  int v = 0;
  auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || p != e.value.data() + e.value.size()) {
    throw Error(ErrorCode::ProfileInvalid,
                "line " + std::to_string(e.line) + ": '" + e.key + "' needs an integer, got '" + e.value + "'");
  }
  return v;
}

}  // namespace

CacheProfile parse_profile(std::string_view text) {
  auto p = CacheProfile::defaults();
  const auto doc = ini::parse(text);
  for (const auto& s : doc.sections) {
    auto unknown = [&](const ini::Entry& e) {
      throw Error(ErrorCode::ProfileInvalid, "line " + std::to_string(e.line) + ": unknown key '" + e.key +
                                                 "' in [" + s.name + "]");
    };
    if (s.name == "L1" || s.name == "L2" || s.name == "L3") {
      auto& g = p.levels[s.name[1] - '0'];
      for (const auto& e : s.entries) {
        if (e.key == "Sets") g.sets = to_int(e);
        else if (e.key == "Assoc") g.assoc = to_int(e);
        else if (e.key == "BlockSize") g.block_size = to_int(e);
        else if (e.key == "Latency") g.latency = to_int(e);
        else if (e.key == "Policy") g.policy = e.value;
        else unknown(e);
      }
    } else if (s.name == "Memory") {
      for (const auto& e : s.entries) {
        if (e.key == "Latency") p.memory_latency = to_int(e);
        else if (e.key == "BlockSize") p.memory_block_size = to_int(e);
        else unknown(e);
      }
    } else if (s.name == "Network") {
      for (const auto& e : s.entries) {
        if (e.key == "InputBufferSize") p.network.input_buffer = to_int(e);
        else if (e.key == "OutputBufferSize") p.network.output_buffer = to_int(e);
        else if (e.key == "Bandwidth") p.network.bandwidth = to_int(e);
        else unknown(e);
      }
    } else {
      throw Error(ErrorCode::ProfileInvalid, "unknown profile section [" + s.name + "]");
    }
  }
  p.validate();
  return p;
}

std::string module_name(const Component& c) {
  switch (c.kind) {
    case ComponentKind::Cache: {
      std::string prefix(role_prefix(c.role));
      std::transform(prefix.begin(), prefix.end(), prefix.begin(), [](unsigned char ch) { return std::tolower(ch); });
      return "mod-" + prefix + std::to_string(c.level) + "-" + std::to_string(c.index);
    }
    case ComponentKind::MainMemory: return "mod-mm";
    case ComponentKind::Core: return "core-" + std::to_string(c.index);
    case ComponentKind::Switch: return "sw-" + std::to_string(c.index);
  }
  return "?";
}

namespace {

std::string suffix_of(const std::string& module) { return module.substr(4); }  // strip "mod-"
std::string network_of(const Component& c) { return "net-" + suffix_of(module_name(c)); }
std::string node_of(const Component& c) {
  return c.kind == ComponentKind::Switch ? module_name(c) : "n-" + suffix_of(module_name(c));
}

std::string geometry_name(int level, CacheRole role) {
  std::string prefix(role_prefix(role));
  std::transform(prefix.begin(), prefix.end(), prefix.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return "geo-" + prefix + std::to_string(level);
}

/// Wiring facts the emitters need, read off a validated graph.
struct Wiring {
  const ArchGraph& g;
  std::vector<std::optional<ComponentId>> parent;     // direct upper
  std::vector<std::optional<ComponentId>> effective;  // first non-switch upper
  std::vector<std::vector<ComponentId>> children;     // effective children (non-switch)
  std::vector<char> switched;                         // component is an attachment

  explicit Wiring(const ArchGraph& graph)
      : g(graph),
        parent(graph.components.size()),
        effective(graph.components.size()),
        children(graph.components.size()),
        switched(graph.components.size(), 0) {
    for (const auto& e : g.connections) {
      if (g.at(e.lower).kind != ComponentKind::Core) parent[e.lower.value] = e.upper;
    }
    for (const auto& c : g.components) {
      if (c.kind == ComponentKind::Core || c.kind == ComponentKind::Switch || !parent[c.id.value]) continue;
      auto up = *parent[c.id.value];
      while (g.at(up).kind == ComponentKind::Switch) {
        if (!parent[up.value]) break;
        up = *parent[up.value];
      }
      effective[c.id.value] = up;
      children[up.value].push_back(c.id);
      if (g.at(*parent[c.id.value]).kind == ComponentKind::Switch) switched[up.value] = 1;
    }
  }

  bool via_switch(ComponentId id) const {
    return parent[id.value] && g.at(*parent[id.value]).kind == ComponentKind::Switch;
  }
};

void require_validated(const ArchGraph& graph) {
  const auto report = validate_graph(graph, graph.spec);
  if (!report.ok) throw Error(ErrorCode::UnvalidatedGraph, "graph failed validation: " + report.summary());
}

class Writer {
 public:
  void section(const std::string& header) {
    if (!first_) out_ << "\n";
    first_ = false;
    out_ << "[" << header << "]\n";
  }
  template <typename T>
  void kv(const std::string& key, const T& value) {
    out_ << key << " = " << value << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

}  // namespace

std::string emit_mem_config(const ArchGraph& graph, const CacheProfile& profile) {
  require_validated(graph);
  profile.validate();
  const Wiring w(graph);
  Writer out;

  for (const auto& grp : graph.spec.groups) {
    const auto& geo = profile.levels.at(grp.level);
    out.section("CacheGeometry " + geometry_name(grp.level, grp.role));
    out.kv("Sets", geo.sets);
    out.kv("Assoc", geo.assoc);
    out.kv("BlockSize", geo.block_size);
    out.kv("Latency", geo.latency);
    out.kv("Policy", geo.policy);
  }

  // Entry modules per core; a unified L1 serves both streams.
  std::vector<std::string> data_mod(graph.components.size()), inst_mod(graph.components.size());
  for (const auto& e : graph.connections) {
    const auto& lo = graph.at(e.lower);
    if (lo.kind != ComponentKind::Core) continue;
    const auto name = module_name(graph.at(e.upper));
    if (e.stream != Stream::Instruction) data_mod[lo.id.value] = name;
    if (e.stream != Stream::Data) inst_mod[lo.id.value] = name;
  }

  for (const auto& c : graph.components) {
    switch (c.kind) {
      case ComponentKind::Core:
        out.section("Entry " + module_name(c));
        out.kv("Arch", "x86");
        out.kv("Core", c.index - 1);
        out.kv("Thread", 0);
        out.kv("DataModule", data_mod[c.id.value]);
        out.kv("InstModule", inst_mod[c.id.value]);
        break;
      case ComponentKind::Cache: {
        out.section("Module " + module_name(c));
        out.kv("Type", "Cache");
        out.kv("Geometry", geometry_name(c.level, c.role));
        if (!w.children[c.id.value].empty()) {
          out.kv("HighNetwork", network_of(c));
          if (w.switched[c.id.value]) out.kv("HighNetworkNode", node_of(c));
        }
        const auto& up = graph.at(*w.effective[c.id.value]);
        out.kv("LowNetwork", network_of(up));
        if (w.via_switch(c.id)) out.kv("LowNetworkNode", node_of(c));
        out.kv("LowModules", module_name(up));
        break;
      }
      case ComponentKind::MainMemory:
        out.section("Module " + module_name(c));
        out.kv("Type", "MainMemory");
        out.kv("BlockSize", profile.memory_block_size);
        out.kv("Latency", profile.memory_latency);
        out.kv("HighNetwork", network_of(c));
        if (w.switched[c.id.value]) out.kv("HighNetworkNode", node_of(c));
        break;
      case ComponentKind::Switch:
        break;
    }
  }
  return out.str();
}

std::string emit_net_config(const ArchGraph& graph, const CacheProfile& profile) {
  require_validated(graph);
  profile.validate();
  const Wiring w(graph);
  const auto& np = profile.network;
  Writer out;

  for (const auto& c : graph.components) {
    if (c.kind == ComponentKind::Core || c.kind == ComponentKind::Switch) continue;
    if (w.children[c.id.value].empty()) continue;
    const auto net = network_of(c);
    out.section("Network." + net);
    out.kv("DefaultInputBufferSize", np.input_buffer);
    out.kv("DefaultOutputBufferSize", np.output_buffer);
    out.kv("DefaultBandwidth", np.bandwidth);
    if (!w.switched[c.id.value]) continue;

    auto end_node = [&](const Component& n) {
      out.section("Network." + net + ".Node." + node_of(n));
      out.kv("Type", "EndNode");
      out.kv("InputBufferSize", np.input_buffer);
      out.kv("OutputBufferSize", np.output_buffer);
    };
    end_node(c);
    for (auto child : w.children[c.id.value]) end_node(graph.at(child));

    // Switches of this network: every switch whose chain ends at `c`.
    for (const auto& s : graph.components) {
      if (s.kind != ComponentKind::Switch) continue;
      auto up = s.id;
      while (graph.at(up).kind == ComponentKind::Switch && w.parent[up.value]) up = *w.parent[up.value];
      if (up != c.id) continue;
      const auto& parent = graph.at(*w.parent[s.id.value]);
      const auto self = node_of(s);
      const auto dest = node_of(parent);
      out.section("Network." + net + ".Node." + self);
      out.kv("Type", "Switch");
      out.kv("InputBufferSize", np.input_buffer);
      out.kv("OutputBufferSize", np.output_buffer);
      out.section("Network." + net + ".Link." + self + "-up");
      out.kv("Source", self);
      out.kv("Dest", dest);
      out.kv("Type", "Unidirectional");
      out.kv("Bandwidth", np.bandwidth);
      out.section("Network." + net + ".Link." + self + "-down");
      out.kv("Source", dest);
      out.kv("Dest", self);
      out.kv("Type", "Unidirectional");
      out.kv("Bandwidth", np.bandwidth);
    }
    for (auto child : w.children[c.id.value]) {
      const auto& leaf = graph.at(child);
      const auto& sw = graph.at(*w.parent[child.value]);
      out.section("Network." + net + ".Link." + node_of(leaf) + "-" + node_of(sw));
      out.kv("Source", node_of(leaf));
      out.kv("Dest", node_of(sw));
      out.kv("Type", "Bidirectional");
    }
  }
  return out.str();
}

ConfigBundle emit_bundle(const ArchGraph& graph, const CacheProfile& profile) {
  ConfigBundle b;
  b.mem_config = emit_mem_config(graph, profile);
  b.net_config = emit_net_config(graph, profile);
  b.loc_breakdown = loc_report(b);
  return b;
}

int count_nonblank_lines(std::string_view text) {
  int n = 0;
  for (const auto& line : ini::split_lines(text)) {
    if (!ini::trim(line).empty()) ++n;
  }
  return n;
}

namespace {

/// Class and item key of a section header. Switch node and link sections
/// share the switch's item key.
std::pair<std::string, std::string> classify_header(std::string_view header) {
  auto starts = [&](std::string_view p) { return header.substr(0, p.size()) == p; };
  if (starts("CacheGeometry ")) return {"geometry", std::string(header)};
  if (starts("Entry ")) return {"core-entry", std::string(header)};
  if (starts("Module ")) {
    auto mod = header.substr(7);
    if (mod == "mod-mm") return {"memory", std::string(header)};
    // mod-<role><level>-<index>
    auto dash = mod.rfind('-');
    const char level = dash == std::string_view::npos || dash == 0 ? '?' : mod[dash - 1];
    return {level == '1' ? "L1" : "L2/L3", std::string(header)};
  }
  if (starts("Network.")) {
    auto rest = header.substr(8);
    auto dot = rest.find('.');
    if (dot == std::string_view::npos) return {"connection", std::string(header)};
    auto inner = rest.substr(dot + 1);
    std::string_view name;
    if (inner.substr(0, 5) == "Node.") name = inner.substr(5);
    else if (inner.substr(0, 5) == "Link.") name = inner.substr(5);
    if (name.substr(0, 3) == "sw-") {
      // Node "sw-K", links "sw-K-up" / "sw-K-down"
      auto end = name.find('-', 3);
      return {"switch", std::string(rest.substr(0, dot)) + "." + std::string(name.substr(0, end))};
    }
    return {"connection", std::string(header)};
  }
  return {"other", std::string(header)};
}

void scan(std::string_view text, std::vector<LocItem>& items) {
  std::size_t current = 0;
  bool open = false;
  for (const auto& raw : ini::split_lines(text)) {
    const auto line = ini::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      auto [klass, subject] = classify_header(line.substr(1, line.size() - 2));
      auto it = std::find_if(items.begin(), items.end(),
                             [&](const LocItem& i) { return i.klass == klass && i.subject == subject; });
      if (it == items.end()) {
        items.push_back({klass, subject, 0});
        current = items.size() - 1;
      } else {
        current = static_cast<std::size_t>(it - items.begin());
      }
      open = true;
    } else if (!open) {
      items.push_back({"other", "preamble", 0});
      current = items.size() - 1;
      open = true;
    }
    ++items[current].lines;
  }
}

}  // namespace

std::vector<LocItem> loc_items(const ConfigBundle& bundle) {
  std::vector<LocItem> items;
  scan(bundle.mem_config, items);
  scan(bundle.net_config, items);
  return items;
}

std::map<std::string, int> loc_report(const ConfigBundle& bundle) {
  std::map<std::string, int> out;
  for (const auto& k : {"core-entry", "L1", "L2/L3", "memory", "geometry", "connection", "switch"}) out[k] = 0;
  for (const auto& item : loc_items(bundle)) out[item.klass] += item.lines;
  return out;
}

namespace {

[[noreturn]] void import_error(const std::string& what) {
  throw Error(ErrorCode::IoFailure, "configuration import: " + what);
}

std::optional<int> positive(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1) return std::nullopt;
  return v;
}

/// "dl2-3" -> cache template; "mm" -> memory.
std::optional<Component> decode_suffix(std::string_view s) {
  Component c;
  if (s == "mm") {
    c.kind = ComponentKind::MainMemory;
    return c;
  }
  auto dash = s.rfind('-');
  if (dash == std::string_view::npos || dash < 2) return std::nullopt;
  auto idx = positive(s.substr(dash + 1));
  const char lv = s[dash - 1];
  auto prefix = s.substr(0, dash - 1);
  if (!idx || lv < '1' || lv > '3') return std::nullopt;
  c.kind = ComponentKind::Cache;
  c.level = lv - '0';
  c.index = *idx;
  if (prefix == "dl") c.role = CacheRole::Data;
  else if (prefix == "il") c.role = CacheRole::Instruction;
  else if (prefix == "l") c.role = CacheRole::Unified;
  else return std::nullopt;
  return c;
}

}  // namespace

ArchGraph import_config(std::string_view mem_config, std::string_view net_config, const TopologySpec& spec) {
  const auto mem = ini::parse(mem_config);
  const auto net = ini::parse(net_config);

  struct Pending {
    Component c;
    std::string key;  // module or node name used in the files
  };
  std::vector<Pending> found;
  auto add_unique = [&](const Component& c, const std::string& key) {
    for (const auto& p : found) {
      if (p.key == key) import_error("duplicate declaration of '" + key + "'");
    }
    found.push_back({c, key});
  };

  for (const auto& s : mem.sections) {
    const std::string_view name = s.name;
    if (name.substr(0, 6) == "Entry ") {
      auto key = std::string(name.substr(6));
      auto idx = key.substr(0, 5) == "core-" ? positive(std::string_view(key).substr(5)) : std::nullopt;
      if (!idx) import_error("bad entry name '" + key + "'");
      Component c;
      c.kind = ComponentKind::Core;
      c.index = *idx;
      add_unique(c, key);
    } else if (name.substr(0, 7) == "Module ") {
      auto key = std::string(name.substr(7));
      auto c = key.substr(0, 4) == "mod-" ? decode_suffix(std::string_view(key).substr(4)) : std::nullopt;
      if (!c) import_error("bad module name '" + key + "'");
      add_unique(*c, key);
    }
  }
  std::map<std::string, std::string> node_to_module;
  for (const auto& s : net.sections) {
    auto pos = s.name.find(".Node.");
    if (pos == std::string::npos) continue;
    auto node = s.name.substr(pos + 6);
    auto type = s.get("Type").value_or("");
    if (type == "Switch") {
      auto idx = node.substr(0, 3) == "sw-" ? positive(std::string_view(node).substr(3)) : std::nullopt;
      if (!idx) import_error("bad switch name '" + node + "'");
      Component c;
      c.kind = ComponentKind::Switch;
      c.index = *idx;
      add_unique(c, node);
    } else if (node.substr(0, 2) == "n-") {
      node_to_module[node] = "mod-" + node.substr(2);
    }
  }

  std::sort(found.begin(), found.end(), [](const Pending& a, const Pending& b) {
    return std::make_tuple(static_cast<int>(a.c.kind), a.c.level, static_cast<int>(a.c.role), a.c.index) <
           std::make_tuple(static_cast<int>(b.c.kind), b.c.level, static_cast<int>(b.c.role), b.c.index);
  });
  ArchGraph g;
  g.spec = spec;
  g.kind = classify(spec);
  std::map<std::string, ComponentId> ids;
  for (const auto& p : found) ids[p.key] = g.add(p.c.kind, p.c.level, p.c.role, p.c.index);
  auto lookup = [&](const std::string& key, const std::string& where) {
    auto it = ids.find(key);
    if (it == ids.end()) import_error(where + " references undeclared '" + key + "'");
    return it->second;
  };
  auto lookup_node = [&](const std::string& node, const std::string& where) {
    auto it = node_to_module.find(node);
    return lookup(it == node_to_module.end() ? node : it->second, where);
  };

  // Leaf links: source end node -> switch.
  std::map<std::string, std::string> leaf_link;
  for (const auto& s : net.sections) {
    if (s.name.find(".Link.") == std::string::npos) continue;
    auto src = s.get("Source").value_or("");
    auto dst = s.get("Dest").value_or("");
    if (src.substr(0, 3) == "sw-") {
      if (s.name.size() >= 3 && s.name.substr(s.name.size() - 3) == "-up") {
        g.connections.push_back({lookup(src, s.name), lookup_node(dst, s.name), Stream::Network});
      }
    } else if (s.name.size() < 5 || s.name.substr(s.name.size() - 5) != "-down") {
      if (leaf_link.contains(src)) import_error("end node '" + src + "' has more than one link");
      leaf_link[src] = dst;
    }
  }

  for (const auto& s : mem.sections) {
    const std::string_view name = s.name;
    if (name.substr(0, 6) == "Entry ") {
      auto key = std::string(name.substr(6));
      auto data = s.get("DataModule"), inst = s.get("InstModule");
      if (!data || !inst) import_error(key + " needs DataModule and InstModule");
      if (*data == *inst) {
        g.connections.push_back({ids.at(key), lookup(*data, key), Stream::Both});
      } else {
        g.connections.push_back({ids.at(key), lookup(*data, key), Stream::Data});
        g.connections.push_back({ids.at(key), lookup(*inst, key), Stream::Instruction});
      }
    } else if (name.substr(0, 7) == "Module ") {
      auto key = std::string(name.substr(7));
      const auto self = ids.at(key);
      if (g.at(self).kind != ComponentKind::Cache) continue;
      auto low = s.get("LowModules");
      if (!low) import_error(key + " has no LowModules");
      if (auto node = s.get("LowNetworkNode")) {
        auto it = leaf_link.find(*node);
        if (it == leaf_link.end()) import_error(key + " end node '" + *node + "' has no link");
        g.connections.push_back({self, lookup(it->second, key), Stream::Network});
      } else {
        g.connections.push_back({self, lookup(*low, key), stream_for(g.at(self).role)});
      }
    }
  }
  return g;
}

}  // namespace mcsynth
