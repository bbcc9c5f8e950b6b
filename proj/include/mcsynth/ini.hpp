#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mcsynth::ini {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
  /// Non-empty lines inside the section that are not `key = value` pairs.
  std::vector<std::string> loose_lines;
  std::size_t line = 0;

  const Entry* find(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
};

/// Ordered INI document. Sections and keys keep their file order; duplicate
/// section names are kept as separate sections.
struct Document {
  std::vector<Section> sections;
  /// `key = value` lines that appear before the first section header.
  std::vector<Entry> preamble;

  const Section* find(std::string_view name) const;
  std::vector<const Section*> find_all(std::string_view name) const;
};

/// Parses `[Section]` headers and `Key = Value` lines. Lines starting with
/// ';' or '#' are comments. Accepts LF and CRLF line endings.
Document parse(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

}  // namespace mcsynth::ini
