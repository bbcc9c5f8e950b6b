#include "mcsynth/topology.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

#include "mcsynth/ini.hpp"

namespace mcsynth {

std::string_view role_prefix(CacheRole role) {
  switch (role) {
    case CacheRole::Data: return "DL";
    case CacheRole::Instruction: return "IL";
    case CacheRole::Unified: return "L";
  }
  return "?";
}

int TopologySpec::count(int level, CacheRole role) const {
  for (const auto& g : groups) {
    if (g.level == level && g.role == role) return g.count;
  }
  return 0;
}

int TopologySpec::depth() const {
  int d = 0;
  for (const auto& g : groups) d = std::max(d, g.level);
  return d;
}

namespace {

auto group_key(const CacheGroup& g) { return std::make_tuple(g.level, static_cast<int>(g.role)); }

/// Counts along one stream from level 1 upward, following the path a request
/// takes. Unified levels belong to both chains.
struct Chain {
  std::vector<int> counts;  // index 0 = cores
};

int data_count(const TopologySpec& s, int level) {
  return s.count(level, CacheRole::Data) + s.count(level, CacheRole::Unified);
}

int inst_count(const TopologySpec& s, int level) {
  return s.count(level, CacheRole::Instruction) + s.count(level, CacheRole::Unified);
}

std::optional<std::string> check_monotone(const std::vector<int>& chain, std::string_view label) {
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (chain[i] > chain[i - 1]) {
      return std::string(label) + " chain count increases going up (" +
             std::to_string(chain[i - 1]) + " -> " + std::to_string(chain[i]) + ")";
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> find_rule_violation(const TopologySpec& spec) {
  if (spec.cores < 1) return "core count must be positive";
  for (std::size_t i = 0; i < spec.groups.size(); ++i) {
    const auto& g = spec.groups[i];
    if (g.level < 1 || g.level > 3) return "cache level must be 1, 2 or 3";
    if (g.count < 1) return "cache count must be positive";
    if (i > 0 && !(group_key(spec.groups[i - 1]) < group_key(g))) {
      return "cache groups must be unique and ordered by level then D, I, L";
    }
  }
  if (spec.groups.empty()) return "at least one level-1 cache is required";
  if (spec.split_at(3)) return "split data/instruction caches exist only at levels 1 and 2";

  for (int level = 1; level <= 3; ++level) {
    if (spec.has(level, CacheRole::Unified) && spec.split_at(level)) {
      return "level " + std::to_string(level) + " mixes unified and split caches";
    }
  }

  const bool l1_split = spec.split_at(1);
  if (!spec.has(1, CacheRole::Unified) &&
      !(spec.has(1, CacheRole::Data) && spec.has(1, CacheRole::Instruction))) {
    return "level 1 needs either L1 or both DL1 and IL1";
  }
  if (spec.split_at(2) && !l1_split) return "split level-2 caches require split level-1 caches";
  if (spec.has(2, CacheRole::Instruction) && !spec.has(2, CacheRole::Data)) {
    return "IL2 requires DL2";
  }

  const int depth = spec.depth();
  std::vector<int> data{spec.cores};
  for (int level = 1; level <= depth; ++level) {
    if (data_count(spec, level) == 0) {
      return "data chain has no cache at level " + std::to_string(level);
    }
    data.push_back(data_count(spec, level));
  }
  if (auto v = check_monotone(data, "data")) return v;

  std::vector<int> inst{spec.cores, inst_count(spec, 1)};
  if (!spec.bypass) {
    for (int level = 2; level <= depth; ++level) {
      if (inst_count(spec, level) == 0) {
        return "instruction chain has no cache at level " + std::to_string(level) +
               " and no BP tag";
      }
      inst.push_back(inst_count(spec, level));
    }
  } else {
    if (!l1_split) return "BP requires split DL1/IL1 caches";
    if (!spec.has(2, CacheRole::Data)) return "BP requires a DL2 cache to bypass";
    if (spec.has(2, CacheRole::Instruction)) {
      // IL2 skips L3 and goes to memory.
      inst.push_back(spec.count(2, CacheRole::Instruction));
    } else if (spec.has(3, CacheRole::Unified)) {
      // IL1 skips level 2 and joins L3.
      inst.push_back(spec.count(3, CacheRole::Unified));
    }
  }
  if (auto v = check_monotone(inst, "instruction")) return v;
  return std::nullopt;
}

void require_valid(const TopologySpec& spec) {
  if (auto v = find_rule_violation(spec)) throw Error(ErrorCode::InvalidSpec, *v);
}

namespace {

[[noreturn]] void malformed(std::string_view name, const std::string& why) {
  throw Error(ErrorCode::MalformedName, "malformed topology name '" + std::string(name) + "': " + why);
}

/// Leading decimal count: no sign, no leading zero, nonzero.
std::optional<int> leading_count(std::string_view tok, std::size_t& pos) {
  pos = 0;
  while (pos < tok.size() && tok[pos] >= '0' && tok[pos] <= '9') ++pos;
  if (pos == 0) return std::nullopt;
  if (tok[0] == '0') return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + pos, value);
  if (ec != std::errc() || ptr != tok.data() + pos) return std::nullopt;
  return value;
}

}  // namespace

TopologySpec parse_topology(std::string_view name) {
  if (name.empty()) malformed(name, "empty name");
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (true) {
    auto us = name.find('_', start);
    auto tok = name.substr(start, us == std::string_view::npos ? std::string_view::npos : us - start);
    if (tok.empty()) malformed(name, "empty token (stray or doubled underscore)");
    tokens.push_back(tok);
    if (us == std::string_view::npos) break;
    start = us + 1;
  }

  TopologySpec spec;
  std::size_t pos = 0;
  {
    auto cores = leading_count(tokens[0], pos);
    if (!cores || tokens[0].substr(pos) != "C") {
      malformed(name, "first token must be <count>C, got '" + std::string(tokens[0]) + "'");
    }
    spec.cores = *cores;
  }

  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto tok = tokens[i];
    if (tok == "BP") {
      if (i + 1 != tokens.size()) malformed(name, "BP must be the last token");
      spec.bypass = true;
      break;
    }
    auto count = leading_count(tok, pos);
    if (!count) malformed(name, "token '" + std::string(tok) + "' must start with a nonzero count");
    auto rest = tok.substr(pos);
    CacheGroup g;
    g.count = *count;
    if (rest.size() == 3 && rest[0] == 'D' && rest[1] == 'L') {
      g.role = CacheRole::Data;
    } else if (rest.size() == 3 && rest[0] == 'I' && rest[1] == 'L') {
      g.role = CacheRole::Instruction;
    } else if (rest.size() == 2 && rest[0] == 'L') {
      g.role = CacheRole::Unified;
    } else {
      malformed(name, "unknown token '" + std::string(tok) + "'");
    }
    const char lv = rest.back();
    if (lv < '1' || lv > '3') malformed(name, "cache level must be 1, 2 or 3 in '" + std::string(tok) + "'");
    g.level = lv - '0';
    if (!spec.groups.empty()) {
      const auto prev = group_key(spec.groups.back());
      const auto cur = group_key(g);
      if (prev == cur) malformed(name, "duplicate cache group '" + std::string(tok) + "'");
      if (cur < prev) malformed(name, "cache token '" + std::string(tok) + "' is out of order");
    }
    spec.groups.push_back(g);
  }

  if (auto v = find_rule_violation(spec)) {
    throw Error(ErrorCode::RuleViolation, "topology '" + std::string(name) + "' violates a rule: " + *v);
  }
  return spec;
}

std::string canonical_name(const TopologySpec& spec) {
  require_valid(spec);
  std::string out = std::to_string(spec.cores) + "C";
  for (const auto& g : spec.groups) {
    out += '_';
    out += std::to_string(g.count);
    out += role_prefix(g.role);
    out += std::to_string(g.level);
  }
  if (spec.bypass) out += "_BP";
  return out;
}

std::vector<TopologyListEntry> load_topology_list(std::string_view text) {
  std::vector<TopologyListEntry> out;
  const auto lines = ini::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = ini::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    TopologyListEntry entry{i + 1, std::string(line), Error(ErrorCode::MalformedName, "")};
    try {
      entry.result = parse_topology(line);
    } catch (const Error& e) {
      entry.result = e;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace mcsynth
