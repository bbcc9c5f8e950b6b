#include "mcsynth/generator.hpp"

#include <algorithm>
#include <string>

#include "mcsynth/error.hpp"
#include "mcsynth/validator.hpp"

namespace mcsynth {

ConnectionQuota connection_quota(int nc, int mc) {
  if (mc < 1 || nc < mc) {
    throw Error(ErrorCode::QuotaDomain, "connection quota needs nc >= mc >= 1 (nc=" + std::to_string(nc) +
                                            ", mc=" + std::to_string(mc) + ")");
  }
  const int base = nc / mc;
  const int remainder = nc % mc;
  return {base, remainder, base * mc + remainder};
}

std::vector<Connection> assign_level(std::span<const ComponentId> children,
                                     std::span<const ComponentId> parents, Stream stream) {
  if (children.empty() || parents.empty()) {
    throw Error(ErrorCode::EmptySide, "assign_level needs non-empty children and parents");
  }
  if (children.size() < parents.size()) {
    throw Error(ErrorCode::QuotaDomain, "assign_level needs at least as many children as parents");
  }
  std::vector<int> fan_in(parents.size(), 0);
  std::vector<Connection> out;
  out.reserve(children.size());
  for (const auto child : children) {
    // First empty parent, otherwise the least connected; min_element keeps
    // the lowest index among equals.
    const auto it = std::min_element(fan_in.begin(), fan_in.end());
    const auto slot = static_cast<std::size_t>(it - fan_in.begin());
    ++fan_in[slot];
    out.push_back({child, parents[slot], stream});
  }
  return out;
}

namespace {

void append(std::vector<Connection>& to, const std::vector<Connection>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

/// Upper family for a cache group, or empty when it attaches to memory.
std::vector<ComponentId> upper_of(const ArchGraph& g, TopologyKind kind, int level, CacheRole role) {
  const auto& s = g.spec;
  if (role == CacheRole::Instruction && is_bypass(kind)) {
    if (kind == TopologyKind::Bypass2 && level == 1) return g.caches(3, CacheRole::Unified);
    if (kind == TopologyKind::Bypass3 && level == 2) return {};
  }
  const int next = level + 1;
  if (next > 3) return {};
  if (role != CacheRole::Unified && s.has(next, role)) return g.caches(next, role);
  return g.caches(next, CacheRole::Unified);
}

}  // namespace

ArchGraph build_core_graph(const TopologySpec& spec) {
  require_valid(spec);
  ArchGraph g;
  g.spec = spec;
  g.kind = classify(spec);

  std::vector<ComponentId> cores;
  for (int i = 1; i <= spec.cores; ++i) cores.push_back(g.add(ComponentKind::Core, 0, CacheRole::Unified, i));
  for (const auto& grp : spec.groups) {
    for (int i = 1; i <= grp.count; ++i) g.add(ComponentKind::Cache, grp.level, grp.role, i);
  }
  const auto mem = g.add(ComponentKind::MainMemory);

  if (spec.has(1, CacheRole::Unified)) {
    append(g.connections, assign_level(cores, g.caches(1, CacheRole::Unified), Stream::Both));
  } else {
    append(g.connections, assign_level(cores, g.caches(1, CacheRole::Data), Stream::Data));
    append(g.connections, assign_level(cores, g.caches(1, CacheRole::Instruction), Stream::Instruction));
  }

  for (const auto& grp : spec.groups) {
    const auto lower = g.caches(grp.level, grp.role);
    auto upper = upper_of(g, g.kind, grp.level, grp.role);
    if (upper.empty()) upper = {mem};
    append(g.connections, assign_level(lower, upper, stream_for(grp.role)));
  }
  return g;
}

namespace {

class SwitchBuilder {
 public:
  explicit SwitchBuilder(ArchGraph& g) : g_(g) {}

  ComponentId make_switch() {
    return g_.add(ComponentKind::Switch, 0, CacheRole::Unified, ++switches_);
  }

  void link(ComponentId lower, ComponentId upper) {
    g_.connections.push_back({lower, upper, Stream::Network});
  }

  /// Pairs `tier` under new switches, odd leftover joins the last pair switch,
  /// and repeats on the new switches until one remains. Returns the aggregate.
  ComponentId build_tree(std::vector<ComponentId> tier) {
    while (tier.size() > 1) {
      std::vector<ComponentId> next;
      for (std::size_t i = 0; i + 1 < tier.size(); i += 2) {
        const auto sw = make_switch();
        link(tier[i], sw);
        link(tier[i + 1], sw);
        next.push_back(sw);
      }
      if (tier.size() % 2 == 1) link(tier.back(), next.back());
      tier = std::move(next);
    }
    return tier.front();
  }

 private:
  ArchGraph& g_;
  int switches_ = 0;
};

}  // namespace

ArchGraph build_bypass_network(ArchGraph g) {
  if (!g.spec.bypass || !is_bypass(g.kind)) {
    throw Error(ErrorCode::NotBypass, "switch network requested for a non-bypass topology");
  }
  std::vector<ComponentId> attachments;
  if (g.kind == TopologyKind::Bypass2 && g.spec.has(3, CacheRole::Unified)) {
    attachments = g.caches(3, CacheRole::Unified);
  } else {
    attachments = {*g.memory()};
  }

  SwitchBuilder sb(g);
  for (const auto target : attachments) {
    std::vector<ComponentId> data_family, inst_family;
    std::vector<Connection> kept;
    for (const auto& e : g.connections) {
      if (e.upper != target) {
        kept.push_back(e);
        continue;
      }
      const auto& lower = g.at(e.lower);
      (lower.role == CacheRole::Instruction ? inst_family : data_family).push_back(e.lower);
    }
    g.connections = std::move(kept);
    std::sort(data_family.begin(), data_family.end());
    std::sort(inst_family.begin(), inst_family.end());

    const auto root = sb.make_switch();
    sb.link(root, target);
    for (const auto& family : {data_family, inst_family}) {
      if (family.empty()) continue;
      sb.link(sb.build_tree(family), root);
    }
  }
  return g;
}

ArchGraph generate(const TopologySpec& spec) {
  auto g = build_core_graph(spec);
  if (spec.bypass) g = build_bypass_network(std::move(g));
  const auto report = validate_graph(g, spec);
  if (!report.ok) {
    throw Error(ErrorCode::GenerationInvariantBroken,
                "generated graph for " + canonical_name(spec) + " failed validation: " + report.summary());
  }
  return g;
}

}  // namespace mcsynth
