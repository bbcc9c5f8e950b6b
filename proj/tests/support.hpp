#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mcsynth/classifier.hpp"
#include "mcsynth/graph.hpp"
#include "mcsynth/topology.hpp"

namespace testsupport {

using namespace mcsynth;

inline const std::vector<std::pair<std::string, std::string>> kReferenceTopologies = {
    {"2C_2L1_2L2_1L3", "Regular"},
    {"4C_4DL1_2IL1_1L2", "SemiHybrid"},
    {"3C_3DL1_3IL1_3DL2_1IL2_1L3", "Hybrid"},
    {"2C_2DL1_2IL1_1DL2_1L3_BP", "Bypass2"},
    {"4C_4DL1_2IL1_2DL2_2IL2_1L3_BP", "Bypass3"},
    {"13C_9L1_5L2_3L3", "Regular"},
    {"18C_9DL1_6IL1_3L2", "SemiHybrid"},
    {"17C_11DL1_8IL1_5DL2_3IL2_2L3", "Hybrid"},
    {"32C_23DL1_17IL1_12DL2_4L3_BP", "Bypass2"},
    {"37C_28DL1_19IL1_13DL2_8IL2_5L3_BP", "Bypass3"},
};

inline int pick(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(std::mt19937& rng) { return pick(rng, 0, 1) == 1; }

/// A random spec of a randomly chosen method. Retries until the rules
/// accept it, so every method is represented.
inline TopologySpec random_spec(std::mt19937& rng, int max_cores = 40) {
  for (;;) {
    TopologySpec s;
    s.cores = pick(rng, 1, max_cores);
    const int method = pick(rng, 0, 4);
    auto add = [&](int level, CacheRole role, int count) { s.groups.push_back({level, role, count}); };
    if (method == 0) {
      const int l1 = pick(rng, 1, s.cores);
      add(1, CacheRole::Unified, l1);
      if (coin(rng)) {
        const int l2 = pick(rng, 1, l1);
        add(2, CacheRole::Unified, l2);
        if (coin(rng)) add(3, CacheRole::Unified, pick(rng, 1, l2));
      }
    } else {
      const int d1 = pick(rng, 1, s.cores), i1 = pick(rng, 1, s.cores);
      add(1, CacheRole::Data, d1);
      add(1, CacheRole::Instruction, i1);
      int top = 0;
      if (method == 1) {
        if (coin(rng)) {
          top = pick(rng, 1, std::min(d1, i1));
          add(2, CacheRole::Unified, top);
        }
      } else if (method == 2) {
        const int d2 = pick(rng, 1, d1), i2 = pick(rng, 1, i1);
        add(2, CacheRole::Data, d2);
        add(2, CacheRole::Instruction, i2);
        top = std::min(d2, i2);
      } else {
        s.bypass = true;
        const int d2 = pick(rng, 1, d1);
        add(2, CacheRole::Data, d2);
        top = d2;
        if (method == 4) {
          const int i2 = pick(rng, 1, i1);
          add(2, CacheRole::Instruction, i2);
        }
      }
      if (top > 0 && coin(rng)) {
        int l3 = pick(rng, 1, top);
        // A bypassing IL1 family must be able to spread over the L3s.
        if (method == 3) l3 = std::min(l3, i1);
        add(3, CacheRole::Unified, l3);
      }
    }
    if (!find_rule_violation(s)) return s;
  }
}

/// The 5C_5DL1_2IL1_2DL2_BP worked example built by hand. Ids: C1..C5 = 0..4,
/// DL1#1..5 = 5..9, IL1#1..2 = 10..11, DL2#1..2 = 12..13, MEM = 14,
/// SW1..SW3 = 15..17.
inline ArchGraph worked_example_oracle() {
  ArchGraph g;
  g.spec = parse_topology("5C_5DL1_2IL1_2DL2_BP");
  g.kind = TopologyKind::Bypass2;
  for (int i = 1; i <= 5; ++i) g.add(ComponentKind::Core, 0, CacheRole::Unified, i);
  for (int i = 1; i <= 5; ++i) g.add(ComponentKind::Cache, 1, CacheRole::Data, i);
  for (int i = 1; i <= 2; ++i) g.add(ComponentKind::Cache, 1, CacheRole::Instruction, i);
  for (int i = 1; i <= 2; ++i) g.add(ComponentKind::Cache, 2, CacheRole::Data, i);
  g.add(ComponentKind::MainMemory);
  for (int i = 1; i <= 3; ++i) g.add(ComponentKind::Switch, 0, CacheRole::Unified, i);
  auto e = [&](std::uint32_t lo, std::uint32_t hi, Stream s) { g.connections.push_back({{lo}, {hi}, s}); };
  for (std::uint32_t c = 0; c < 5; ++c) e(c, 5 + c, Stream::Data);
  // IL1#1 serves cores 1, 3, 5; IL1#2 serves cores 2, 4.
  e(0, 10, Stream::Instruction);
  e(1, 11, Stream::Instruction);
  e(2, 10, Stream::Instruction);
  e(3, 11, Stream::Instruction);
  e(4, 10, Stream::Instruction);
  // DL2#1 takes DL1 1, 3, 5; DL2#2 takes DL1 2, 4.
  e(5, 12, Stream::Data);
  e(6, 13, Stream::Data);
  e(7, 12, Stream::Data);
  e(8, 13, Stream::Data);
  e(9, 12, Stream::Data);
  // Memory-side switch, one switch per bypassing pair.
  e(15, 14, Stream::Network);
  e(12, 16, Stream::Network);
  e(13, 16, Stream::Network);
  e(16, 15, Stream::Network);
  e(10, 17, Stream::Network);
  e(11, 17, Stream::Network);
  e(17, 15, Stream::Network);
  return g;
}

inline std::vector<Connection> sorted_edges(const ArchGraph& g) {
  auto out = g.connections;
  std::sort(out.begin(), out.end(), [](const Connection& a, const Connection& b) {
    return std::tie(a.lower.value, a.upper.value, a.stream) < std::tie(b.lower.value, b.upper.value, b.stream);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle. Re-derives every rule from the spec with plain loops
// over the edge list; shares no code with the library validator.

namespace bf {

struct Fam {
  int kind;  // 0 core, 1 cache, 2 memory, 3 switch
  int level;
  CacheRole role;
  auto operator<=>(const Fam&) const = default;
};

inline Fam fam(const Component& c) {
  switch (c.kind) {
    case ComponentKind::Core: return {0, 0, CacheRole::Unified};
    case ComponentKind::Cache: return {1, c.level, c.role};
    case ComponentKind::MainMemory: return {2, 0, CacheRole::Unified};
    case ComponentKind::Switch: return {3, 0, CacheRole::Unified};
  }
  return {9, 0, CacheRole::Unified};
}

inline int switches_for(int leaves) {
  // Simulate the pairing tiers: pairs become switches, an odd leftover
  // joins the last switch of the tier.
  int made = 0;
  int width = leaves;
  while (width > 1) {
    const int pairs = width / 2;
    made += pairs;
    width = pairs;
  }
  return made;
}

inline std::vector<std::uint32_t> uppers(const ArchGraph& g, std::uint32_t v) {
  std::vector<std::uint32_t> out;
  for (const auto& e : g.connections) {
    if (e.lower.value == v) out.push_back(e.upper.value);
  }
  return out;
}

inline std::vector<std::uint32_t> lowers(const ArchGraph& g, std::uint32_t v) {
  std::vector<std::uint32_t> out;
  for (const auto& e : g.connections) {
    if (e.upper.value == v) out.push_back(e.lower.value);
  }
  return out;
}

inline bool valid(const ArchGraph& g, const TopologySpec& s) {
  const auto n = static_cast<std::uint32_t>(g.components.size());
  const bool bp = s.bypass;
  const bool has_il2 = s.count(2, CacheRole::Instruction) > 0;
  const int l3 = s.count(3, CacheRole::Unified);
  const Fam core{0, 0, CacheRole::Unified}, mem{2, 0, CacheRole::Unified}, sw{3, 0, CacheRole::Unified};
  auto cache = [](int l, CacheRole r) { return Fam{1, l, r}; };

  // Where each family must end up, and whether through switches.
  struct Want {
    Fam up;
    Stream stream;
    bool switched;
  };
  std::map<Fam, std::vector<Want>> want;
  if (s.count(1, CacheRole::Unified)) {
    want[core] = {{cache(1, CacheRole::Unified), Stream::Both, false}};
  } else {
    want[core] = {{cache(1, CacheRole::Data), Stream::Data, false},
                  {cache(1, CacheRole::Instruction), Stream::Instruction, false}};
  }
  Fam attach = mem;
  if (bp && !has_il2 && l3 > 0) attach = cache(3, CacheRole::Unified);
  for (const auto& grp : s.groups) {
    Fam up = mem;
    const bool bypasser = bp && grp.role == CacheRole::Instruction && grp.level == (has_il2 ? 2 : 1);
    if (bypasser) {
      up = attach;
    } else if (grp.level < 3) {
      if (grp.role != CacheRole::Unified && s.count(grp.level + 1, grp.role)) up = cache(grp.level + 1, grp.role);
      else if (s.count(grp.level + 1, CacheRole::Unified)) up = cache(grp.level + 1, CacheRole::Unified);
    }
    const Stream st = grp.role == CacheRole::Data ? Stream::Data
                      : grp.role == CacheRole::Instruction ? Stream::Instruction
                                                           : Stream::Both;
    want[cache(grp.level, grp.role)] = {{up, st, bp && up == attach}};
  }

  // Members of every family, sorted by index.
  std::map<Fam, std::vector<std::uint32_t>> members;
  for (std::uint32_t v = 0; v < n; ++v) members[fam(g.components[v])].push_back(v);
  for (auto& [f, ids] : members) {
    std::sort(ids.begin(), ids.end(), [&](auto a, auto b) { return g.components[a].index < g.components[b].index; });
  }

  // Counts and dense indices.
  std::map<Fam, int> count;
  count[core] = s.cores;
  for (const auto& grp : s.groups) count[cache(grp.level, grp.role)] = grp.count;
  count[mem] = 1;
  if (bp) {
    const int ntargets = static_cast<int>(count[attach]);
    int total = 0;
    for (int j = 0; j < ntargets; ++j) {
      ++total;
      for (const auto& [f, ws] : want) {
        if (!ws.front().switched) continue;
        const int nf = count[f];
        const int share = nf / ntargets + (j < nf % ntargets ? 1 : 0);
        total += switches_for(share);
      }
    }
    count[sw] = total;
  }
  for (const auto& [f, ids] : members) {
    if (!count.contains(f) || count[f] != static_cast<int>(ids.size())) return false;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (g.components[ids[i]].index != static_cast<int>(i) + (f == mem ? 0 : 1)) return false;
    }
  }
  for (const auto& [f, c] : count) {
    if (c > 0 && !members.contains(f)) return false;
  }

  // Per-edge rules.
  auto rank = [&](std::uint32_t v) {
    const auto& c = g.components[v];
    if (c.kind == ComponentKind::Core) return 0;
    if (c.kind == ComponentKind::Cache) return c.level;
    if (c.kind == ComponentKind::MainMemory) return 4;
    return -1;
  };
  for (const auto& e : g.connections) {
    if (e.lower.value >= n || e.upper.value >= n || e.lower == e.upper) return false;
    const auto& lo = g.components[e.lower.value];
    const auto& hi = g.components[e.upper.value];
    const bool net = lo.kind == ComponentKind::Switch || hi.kind == ComponentKind::Switch;
    if (net != (e.stream == Stream::Network)) return false;
    if (!net) {
      if (lo.kind == ComponentKind::Cache && e.stream != want[fam(lo)].front().stream) return false;
      if (lo.kind == ComponentKind::Core && hi.kind == ComponentKind::Cache) {
        const Stream st = hi.role == CacheRole::Data ? Stream::Data
                          : hi.role == CacheRole::Instruction ? Stream::Instruction
                                                              : Stream::Both;
        if (e.stream != st) return false;
      }
    }
    if (lo.kind == ComponentKind::MainMemory) return false;
    if (rank(e.lower.value) >= 0 && rank(e.upper.value) >= 0 && rank(e.lower.value) >= rank(e.upper.value)) return false;
  }

  // Out-degrees.
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto k = g.components[v].kind;
    const auto deg = uppers(g, v).size();
    if (k == ComponentKind::Core && deg != want[core].size()) return false;
    if ((k == ComponentKind::Cache || k == ComponentKind::Switch) && deg != 1) return false;
    if (k == ComponentKind::MainMemory && deg != 0) return false;
  }

  // Effective parents and exact fan-in.
  auto climb = [&](std::uint32_t v) -> std::int64_t {
    for (std::uint32_t steps = 0; steps <= n; ++steps) {
      if (g.components[v].kind != ComponentKind::Switch) return v;
      auto up = uppers(g, v);
      if (up.size() != 1) return -1;
      v = up.front();
    }
    return -1;
  };
  for (const auto& [f, ws] : want) {
    for (const auto& w : ws) {
      const auto& kids = members[f];
      const auto& parents = members[w.up];
      if (parents.empty() || kids.size() < parents.size()) return false;
      std::map<std::uint32_t, int> fan;
      for (auto kid : kids) {
        int found = 0;
        for (auto up : uppers(g, kid)) {
          const auto& direct = g.components[up];
          if (f == core && fam(direct) != w.up) continue;
          if ((direct.kind == ComponentKind::Switch) != w.switched) return false;
          const auto eff = climb(up);
          if (eff < 0 || fam(g.components[static_cast<std::uint32_t>(eff)]) != w.up) return false;
          ++fan[static_cast<std::uint32_t>(eff)];
          ++found;
        }
        if (found != 1) return false;
      }
      const auto nc = kids.size(), mc = parents.size();
      for (std::size_t j = 0; j < mc; ++j) {
        const int expect = static_cast<int>(nc / mc + (j < nc % mc ? 1 : 0));
        if (fan[parents[j]] != expect) return false;
      }
    }
  }

  // Switch trees.
  if (bp) {
    for (auto a : members[attach]) {
      int from_switch = 0;
      for (auto lo : lowers(g, a)) {
        if (g.components[lo].kind == ComponentKind::Switch) ++from_switch;
        if (g.components[lo].kind == ComponentKind::Cache) return false;
      }
      if (from_switch != 1) return false;
    }
    for (auto v : members[sw]) {
      const auto up = uppers(g, v).front();
      const auto ins = lowers(g, v).size();
      if (g.components[up].kind != ComponentKind::Switch) {
        if (fam(g.components[up]) != attach || ins < 1 || ins > 2) return false;
      } else if (ins < 2 || ins > 3) {
        return false;
      }
    }
    // Leaf families under each branch of each root switch.
    std::map<std::uint32_t, std::set<Fam>> branch_fams;
    std::map<std::pair<std::uint32_t, Fam>, std::set<std::uint32_t>> branches;
    for (const auto& [f, ws] : want) {
      if (!ws.front().switched) continue;
      for (auto leaf : members[f]) {
        std::uint32_t cur = leaf, branch = leaf;
        for (std::uint32_t steps = 0;; ++steps) {
          auto up = uppers(g, cur);
          if (up.size() != 1 || steps > n) return false;
          if (g.components[up.front()].kind != ComponentKind::Switch) break;
          branch = cur;
          cur = up.front();
        }
        const auto root = cur;
        const auto a = uppers(g, root).front();
        branches[{a, f}].insert(branch);
        branch_fams[branch].insert(f);
      }
    }
    for (const auto& [k, b] : branches) {
      if (b.size() != 1) return false;
    }
    for (const auto& [b, fs] : branch_fams) {
      if (fs.size() != 1) return false;
    }
  }

  // Cycles: in an acyclic graph no upward walk is longer than n steps.
  for (std::uint32_t v = 0; v < n; ++v) {
    std::vector<std::uint32_t> frontier{v};
    for (std::uint32_t step = 0; step <= n && !frontier.empty(); ++step) {
      std::vector<std::uint32_t> next;
      for (auto x : frontier) {
        for (auto u : uppers(g, x)) next.push_back(u);
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      frontier = std::move(next);
    }
    if (!frontier.empty()) return false;
  }

  // Every component reaches memory by some upward path.
  const auto m = members[mem].front();
  std::vector<char> ok(n, 0);
  ok[m] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : g.connections) {
      if (ok[e.upper.value] && !ok[e.lower.value]) {
        ok[e.lower.value] = 1;
        changed = true;
      }
    }
  }
  return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

}  // namespace bf

/// Every graph that differs from `g` by one deleted edge, one rewired upper
/// end, one rewired lower end, or one changed stream.
inline std::vector<ArchGraph> single_edge_mutations(const ArchGraph& g) {
  std::vector<ArchGraph> out;
  const auto n = static_cast<std::uint32_t>(g.components.size());
  for (std::size_t i = 0; i < g.connections.size(); ++i) {
    auto del = g;
    del.connections.erase(del.connections.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(std::move(del));
    for (std::uint32_t v = 0; v < n; ++v) {
      if (v != g.connections[i].upper.value) {
        auto m = g;
        m.connections[i].upper = ComponentId{v};
        out.push_back(std::move(m));
      }
      if (v != g.connections[i].lower.value) {
        auto m = g;
        m.connections[i].lower = ComponentId{v};
        out.push_back(std::move(m));
      }
    }
    for (auto s : {Stream::Data, Stream::Instruction, Stream::Both, Stream::Network}) {
      if (s != g.connections[i].stream) {
        auto m = g;
        m.connections[i].stream = s;
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

/// One random edit: delete, add, rewire an end, or change a stream.
inline ArchGraph random_mutation(const ArchGraph& g, std::mt19937& rng) {
  auto m = g;
  const int n = static_cast<int>(g.components.size());
  const int edges = static_cast<int>(g.connections.size());
  const auto streams = {Stream::Data, Stream::Instruction, Stream::Both, Stream::Network};
  auto any_stream = [&] { return *(streams.begin() + pick(rng, 0, 3)); };
  switch (pick(rng, 0, 4)) {
    case 0:
      m.connections.erase(m.connections.begin() + pick(rng, 0, edges - 1));
      break;
    case 1:
      m.connections.push_back({{static_cast<std::uint32_t>(pick(rng, 0, n - 1))},
                               {static_cast<std::uint32_t>(pick(rng, 0, n - 1))},
                               any_stream()});
      break;
    case 2:
      m.connections[static_cast<std::size_t>(pick(rng, 0, edges - 1))].upper = {static_cast<std::uint32_t>(pick(rng, 0, n - 1))};
      break;
    case 3:
      m.connections[static_cast<std::size_t>(pick(rng, 0, edges - 1))].lower = {static_cast<std::uint32_t>(pick(rng, 0, n - 1))};
      break;
    default:
      m.connections[static_cast<std::size_t>(pick(rng, 0, edges - 1))].stream = any_stream();
      break;
  }
  return m;
}

}  // namespace testsupport
