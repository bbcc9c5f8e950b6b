#include "mcsynth/validator.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "mcsynth/error.hpp"

namespace mcsynth {

void ValidationReport::add(std::string code, std::string subject, std::string message) {
  ok = false;
  violations.push_back({std::move(code), std::move(subject), std::move(message)});
}

void ValidationReport::merge(const ValidationReport& other) {
  for (const auto& v : other.violations) add(v.code, v.subject, v.message);
}

std::string ValidationReport::summary() const {
  if (ok) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].code << " " << violations[i].subject << ": " << violations[i].message;
  }
  return out.str();
}

int family_switch_count(int n) {
  int total = 0;
  while (n > 1) {
    n /= 2;
    total += n;
  }
  return total;
}

namespace {

// A family is every component sharing (kind, level, role). Memory and
// switches are their own families.
struct FamilyKey {
  ComponentKind kind;
  int level;
  CacheRole role;
  friend auto operator<=>(const FamilyKey&, const FamilyKey&) = default;
};

FamilyKey key_of(const Component& c) {
  if (c.kind == ComponentKind::Cache) return {c.kind, c.level, c.role};
  return {c.kind, 0, CacheRole::Unified};
}

FamilyKey cache_key(int level, CacheRole role) { return {ComponentKind::Cache, level, role}; }
const FamilyKey kCores{ComponentKind::Core, 0, CacheRole::Unified};
const FamilyKey kMemory{ComponentKind::MainMemory, 0, CacheRole::Unified};

std::string family_label(const FamilyKey& k) {
  switch (k.kind) {
    case ComponentKind::Core: return "C";
    case ComponentKind::MainMemory: return "MEM";
    case ComponentKind::Switch: return "SW";
    case ComponentKind::Cache: return std::string(role_prefix(k.role)) + std::to_string(k.level);
  }
  return "?";
}

/// One link level the spec requires: every member of `lower` has exactly one
/// effective parent in `upper`, distributed by the quota.
struct LinkLevel {
  FamilyKey lower;
  FamilyKey upper;
  Stream stream;
  bool switched = false;  // reaches `upper` through the switch network
};

/// Expected link levels, derived from the spec and its kind.
std::vector<LinkLevel> expected_levels(const TopologySpec& s, TopologyKind kind) {
  std::vector<LinkLevel> out;
  if (s.has(1, CacheRole::Unified)) {
    out.push_back({kCores, cache_key(1, CacheRole::Unified), Stream::Both});
  } else {
    out.push_back({kCores, cache_key(1, CacheRole::Data), Stream::Data});
    out.push_back({kCores, cache_key(1, CacheRole::Instruction), Stream::Instruction});
  }
  const bool l3 = s.has(3, CacheRole::Unified);
  // Attachment of the switch network, if any.
  std::optional<FamilyKey> attach;
  if (kind == TopologyKind::Bypass2) attach = l3 ? cache_key(3, CacheRole::Unified) : kMemory;
  if (kind == TopologyKind::Bypass3) attach = kMemory;

  for (const auto& g : s.groups) {
    FamilyKey up = kMemory;
    const bool bypassing = g.role == CacheRole::Instruction &&
                           ((kind == TopologyKind::Bypass2 && g.level == 1) ||
                            (kind == TopologyKind::Bypass3 && g.level == 2));
    if (bypassing) {
      up = *attach;
    } else if (g.level < 3) {
      const int next = g.level + 1;
      if (g.role != CacheRole::Unified && s.has(next, g.role)) {
        up = cache_key(next, g.role);
      } else if (s.has(next, CacheRole::Unified)) {
        up = cache_key(next, CacheRole::Unified);
      }
    }
    out.push_back({cache_key(g.level, g.role), up, stream_for(g.role), attach && up == *attach});
  }
  return out;
}

struct Index {
  const ArchGraph& g;
  std::map<FamilyKey, std::vector<ComponentId>> families;
  std::vector<std::vector<std::size_t>> up;    // edge indices leaving each component
  std::vector<std::vector<std::size_t>> down;  // edge indices entering each component

  explicit Index(const ArchGraph& graph) : g(graph), up(graph.components.size()), down(graph.components.size()) {
    for (const auto& c : g.components) families[key_of(c)].push_back(c.id);
    for (auto& [k, ids] : families) {
      std::sort(ids.begin(), ids.end(),
                [&](ComponentId a, ComponentId b) { return g.at(a).index < g.at(b).index; });
    }
    for (std::size_t i = 0; i < g.connections.size(); ++i) {
      const auto& e = g.connections[i];
      if (!g.contains(e.lower) || !g.contains(e.upper)) continue;
      up[e.lower.value].push_back(i);
      down[e.upper.value].push_back(i);
    }
  }

  const std::vector<ComponentId>& family(const FamilyKey& k) const {
    static const std::vector<ComponentId> empty;
    auto it = families.find(k);
    return it == families.end() ? empty : it->second;
  }

  bool is_switch(ComponentId id) const { return g.at(id).kind == ComponentKind::Switch; }

  /// Follows single upward switch links; nullopt if the chain is broken.
  std::optional<ComponentId> resolve(ComponentId from) const {
    std::size_t guard = 0;
    while (is_switch(from)) {
      if (up[from.value].size() != 1 || ++guard > g.components.size()) return std::nullopt;
      from = g.connections[up[from.value].front()].upper;
    }
    return from;
  }
};

int rank_of(const Component& c) {
  switch (c.kind) {
    case ComponentKind::Core: return 0;
    case ComponentKind::Cache: return c.level;
    case ComponentKind::MainMemory: return 4;
    case ComponentKind::Switch: return -1;
  }
  return -1;
}

std::string edge_label(const ArchGraph& g, const Connection& e) {
  return g.name(e.lower) + "->" + g.name(e.upper);
}

/// Switches expected per attachment component, keyed by attachment id.
int expected_switches(const TopologySpec& s, TopologyKind kind) {
  if (!is_bypass(kind)) return 0;
  const int dl2 = s.count(2, CacheRole::Data);
  const int l3 = s.count(3, CacheRole::Unified);
  int total = 0;
  auto add_attachment = [&](int data_n, int inst_n) {
    total += 1 + family_switch_count(data_n) + family_switch_count(inst_n);
  };
  if (kind == TopologyKind::Bypass2 && l3 > 0) {
    const int il1 = s.count(1, CacheRole::Instruction);
    for (int j = 1; j <= l3; ++j) {
      auto share = [&](int n) { return n / l3 + (j <= n % l3 ? 1 : 0); };
      add_attachment(share(dl2), share(il1));
    }
  } else if (kind == TopologyKind::Bypass2) {
    add_attachment(dl2, s.count(1, CacheRole::Instruction));
  } else {
    add_attachment(l3 > 0 ? l3 : dl2, s.count(2, CacheRole::Instruction));
  }
  return total;
}

}  // namespace

ValidationReport validate_cardinality(const ArchGraph& graph, const TopologySpec& spec) {
  ValidationReport r;
  if (auto v = find_rule_violation(spec)) {
    r.add("cardinality", "spec", "invalid topology spec: " + *v);
    return r;
  }
  const Index ix(graph);

  std::map<FamilyKey, int> expected;
  expected[kCores] = spec.cores;
  for (const auto& g : spec.groups) expected[cache_key(g.level, g.role)] = g.count;
  expected[kMemory] = 1;
  const int switches = expected_switches(spec, classify(spec));
  if (switches > 0) expected[{ComponentKind::Switch, 0, CacheRole::Unified}] = switches;

  for (const auto& [k, n] : expected) {
    const auto& have = ix.family(k);
    if (static_cast<int>(have.size()) != n) {
      r.add("cardinality", family_label(k),
            family_label(k) + " count " + std::to_string(have.size()) + " != " + std::to_string(n));
      continue;
    }
    for (int i = 0; i < n; ++i) {
      if (graph.at(have[static_cast<std::size_t>(i)]).index != i + (k == kMemory ? 0 : 1)) {
        r.add("cardinality", family_label(k), family_label(k) + " indices are not dense from 1");
        break;
      }
    }
  }
  for (const auto& [k, ids] : ix.families) {
    if (!expected.contains(k)) {
      r.add("cardinality", family_label(k),
            std::to_string(ids.size()) + " " + family_label(k) + " component(s) not in the topology" +
                (k.kind == ComponentKind::Switch ? " (switches require BP)" : ""));
    }
  }
  return r;
}

ValidationReport validate_connectivity(const ArchGraph& graph, const TopologySpec& spec) {
  auto r = validate_cardinality(graph, spec);
  if (!r.ok) return r;
  const Index ix(graph);
  const auto kind = classify(spec);

  for (const auto& e : graph.connections) {
    if (!graph.contains(e.lower) || !graph.contains(e.upper)) {
      r.add("edge", edge_label(graph, e), "connection references an unknown component");
      continue;
    }
    if (e.lower == e.upper) r.add("edge", edge_label(graph, e), "self connection");
    const auto& lo = graph.at(e.lower);
    const auto& hi = graph.at(e.upper);
    const bool net = lo.kind == ComponentKind::Switch || hi.kind == ComponentKind::Switch;
    if (net != (e.stream == Stream::Network)) {
      r.add("stream", edge_label(graph, e), net ? "switch links must carry the Network stream"
                                                : "Network stream on a link without a switch");
    } else if (!net) {
      std::optional<Stream> want;
      if (lo.kind == ComponentKind::Cache) want = stream_for(lo.role);
      if (lo.kind == ComponentKind::Core && hi.kind == ComponentKind::Cache) want = stream_for(hi.role);
      if (want && e.stream != *want) {
        r.add("stream", edge_label(graph, e),
              "stream " + std::string(to_string(e.stream)) + ", expected " + std::string(to_string(*want)));
      }
    }
    const int rl = rank_of(lo), rh = rank_of(hi);
    if (rl >= 0 && rh >= 0 && rl >= rh) {
      r.add("layering", edge_label(graph, e), "link does not go up the hierarchy");
    }
    if (lo.kind == ComponentKind::MainMemory) r.add("layering", edge_label(graph, e), "memory has no upper component");
  }

  // Upward degree per component.
  for (const auto& c : graph.components) {
    const auto& ups = ix.up[c.id.value];
    const auto n = graph.name(c.id);
    switch (c.kind) {
      case ComponentKind::Core: {
        const std::size_t want = spec.has(1, CacheRole::Unified) ? 1 : 2;
        if (ups.size() != want) {
          r.add("out-degree", n, "core has " + std::to_string(ups.size()) + " parents, expected " + std::to_string(want));
        }
        break;
      }
      case ComponentKind::Cache:
      case ComponentKind::Switch:
        if (ups.size() != 1) r.add("out-degree", n, "has " + std::to_string(ups.size()) + " upward connections, expected 1");
        break;
      case ComponentKind::MainMemory:
        if (!ups.empty()) r.add("out-degree", n, "memory has upward connections");
        break;
    }
  }

  // Quotas per link level.
  for (const auto& lvl : expected_levels(spec, kind)) {
    const auto& lower = ix.family(lvl.lower);
    const auto& upper = ix.family(lvl.upper);
    const auto subject = family_label(lvl.lower) + "->" + family_label(lvl.upper);
    std::map<ComponentId, int> fan_in;
    for (auto u : upper) fan_in[u] = 0;
    int realized = 0;
    for (auto child : lower) {
      int hits = 0;
      for (auto ei : ix.up[child.value]) {
        const auto& e = graph.connections[ei];
        const auto& target = graph.at(e.upper);
        if (lvl.lower == kCores) {
          // Cores have one link per stream; pick the one for this level.
          if (key_of(target) != lvl.upper) continue;
        }
        const bool via_switch = target.kind == ComponentKind::Switch;
        if (via_switch != lvl.switched) {
          r.add("switch", graph.name(child),
                lvl.switched ? "bypassing cache must reach " + family_label(lvl.upper) + " through a switch"
                             : "cache must not link to a switch");
          ++hits;
          continue;
        }
        auto parent = ix.resolve(e.upper);
        if (!parent || key_of(graph.at(*parent)) != lvl.upper) {
          r.add("fan-in", graph.name(child), "parent is not in " + family_label(lvl.upper));
          ++hits;
          continue;
        }
        ++fan_in[*parent];
        ++realized;
        ++hits;
      }
      if (lvl.lower == kCores && hits != 1) {
        r.add("fan-in", graph.name(child), "core needs exactly one " + family_label(lvl.upper) + " parent");
      }
    }
    if (upper.empty() || lower.size() < upper.size()) {
      r.add("fan-in", subject, "level pair cannot satisfy nc >= mc");
      continue;
    }
    const int nc = static_cast<int>(lower.size()), mc = static_cast<int>(upper.size());
    const int base = nc / mc, rem = nc % mc;
    if (realized != base * mc + rem) {
      r.add("fan-in", subject, "realized " + std::to_string(realized) + " connections, expected " +
                                   std::to_string(base * mc + rem));
    }
    for (int j = 0; j < mc; ++j) {
      const auto u = upper[static_cast<std::size_t>(j)];
      const int want = base + (j < rem ? 1 : 0);
      if (fan_in[u] != want) {
        r.add("fan-in", graph.name(u) + " (" + subject + ")",
              "fan-in " + std::to_string(fan_in[u]) + ", expected " + std::to_string(want));
      }
    }
  }

  // Switch network shape.
  if (is_bypass(kind)) {
    std::set<ComponentId> attachments;
    for (const auto& lvl : expected_levels(spec, kind)) {
      if (lvl.switched) {
        for (auto a : ix.family(lvl.upper)) attachments.insert(a);
      }
    }
    for (auto a : attachments) {
      // Exactly one switch feeds the attachment; the other inputs are the
      // non-bypassed links (e.g. L3 -> MEM when MEM is not switched).
      int switch_inputs = 0;
      for (auto ei : ix.down[a.value]) {
        const auto& lo = graph.at(graph.connections[ei].lower);
        if (lo.kind == ComponentKind::Switch) ++switch_inputs;
        else if (lo.kind == ComponentKind::Cache) {
          r.add("switch", graph.name(lo.id), "links to attachment " + graph.name(a) + " without a switch");
        }
      }
      if (switch_inputs != 1) {
        r.add("switch", graph.name(a), "expected one memory-side switch, found " + std::to_string(switch_inputs));
      }
    }
    for (auto sw : ix.family({ComponentKind::Switch, 0, CacheRole::Unified})) {
      const auto lower_degree = ix.down[sw.value].size();
      const auto& ups = ix.up[sw.value];
      if (ups.size() != 1) continue;  // already reported
      const auto& parent = graph.at(graph.connections[ups.front()].upper);
      const bool root = parent.kind != ComponentKind::Switch;
      if (root) {
        if (!attachments.contains(parent.id)) {
          r.add("switch", graph.name(sw), "memory-side switch is not in front of an attachment component");
        }
        if (lower_degree < 1 || lower_degree > 2) {
          r.add("switch", graph.name(sw), "memory-side switch has " + std::to_string(lower_degree) + " inputs");
        }
      } else if (lower_degree < 2 || lower_degree > 3) {
        r.add("switch", graph.name(sw), "switch has " + std::to_string(lower_degree) + " inputs, expected 2 or 3");
      }
    }
    // Each family's leaves share one subtree under the memory-side switch,
    // and each subtree holds one family only.
    std::map<ComponentId, std::set<std::string>> subtree_families;
    std::map<std::pair<ComponentId, std::string>, std::set<ComponentId>> family_roots;
    for (const auto& lvl : expected_levels(spec, kind)) {
      if (!lvl.switched) continue;
      const auto fam = family_label(lvl.lower) + (lvl.lower.role == CacheRole::Instruction ? ":I" : ":D");
      for (auto leaf : ix.family(lvl.lower)) {
        ComponentId cur = leaf;
        ComponentId below_root = leaf;
        std::size_t guard = 0;
        bool broken = false;
        while (true) {
          if (ix.up[cur.value].size() != 1 || ++guard > graph.components.size()) {
            broken = true;
            break;
          }
          const auto next = graph.connections[ix.up[cur.value].front()].upper;
          if (!ix.is_switch(next)) break;
          below_root = cur;
          cur = next;
        }
        if (broken || !ix.is_switch(cur)) continue;  // reported elsewhere
        const auto attach = graph.connections[ix.up[cur.value].front()].upper;
        family_roots[{attach, fam}].insert(below_root);
        subtree_families[below_root].insert(fam);
      }
    }
    for (const auto& [key, roots] : family_roots) {
      if (roots.size() != 1) {
        r.add("switch", graph.name(key.first),
              key.second + " family reaches the memory-side switch through " + std::to_string(roots.size()) +
                  " separate branches");
      }
    }
    for (const auto& [root, fams] : subtree_families) {
      if (fams.size() != 1) r.add("switch", graph.name(root), "switch subtree mixes cache families");
    }
  }
  return r;
}

ValidationReport validate_graph(const ArchGraph& graph, const TopologySpec& spec) {
  auto r = validate_connectivity(graph, spec);

  const auto n = graph.components.size();
  std::vector<std::vector<std::uint32_t>> up(n);
  for (const auto& e : graph.connections) {
    if (graph.contains(e.lower) && graph.contains(e.upper)) up[e.lower.value].push_back(e.upper.value);
  }

  // Acyclicity: iterative DFS with colors.
  std::vector<int> color(n, 0);
  bool cyclic = false;
  for (std::size_t s = 0; s < n && !cyclic; ++s) {
    if (color[s]) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{static_cast<std::uint32_t>(s), 0}};
    color[s] = 1;
    while (!stack.empty() && !cyclic) {
      auto& [v, i] = stack.back();
      if (i < up[v].size()) {
        const auto w = up[v][i++];
        if (color[w] == 1) {
          cyclic = true;
          r.add("cycle", graph.name(ComponentId{w}), "connection cycle through this component");
        } else if (color[w] == 0) {
          color[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }

  // Memory reachability: reverse BFS from memory.
  const auto mem = graph.memory();
  std::vector<char> reaches(n, 0);
  if (mem) {
    std::vector<std::vector<std::uint32_t>> down(n);
    for (std::size_t v = 0; v < n; ++v) {
      for (auto w : up[v]) down[w].push_back(static_cast<std::uint32_t>(v));
    }
    std::vector<std::uint32_t> queue{mem->value};
    reaches[mem->value] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      for (auto v : down[queue[q]]) {
        if (!reaches[v]) {
          reaches[v] = 1;
          queue.push_back(v);
        }
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!reaches[v]) r.add("reachability", graph.name(ComponentId{static_cast<std::uint32_t>(v)}), "no upward path to MEM");
  }
  return r;
}

}  // namespace mcsynth
