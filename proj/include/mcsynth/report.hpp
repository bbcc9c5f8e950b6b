#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mcsynth {

/// A report value. `text` is the token exactly as read, so rendering never
/// rounds; the numeric fields are filled when the token looks numeric.
struct Scalar {
  enum class Kind { Integer, Real, Text };
  Kind kind = Kind::Text;
  std::int64_t integer = 0;
  double real = 0.0;
  std::string text;

  static Scalar from_token(std::string_view token);
  std::optional<double> as_number() const;
};

struct ReportSection {
  std::string name;
  std::vector<std::pair<std::string, Scalar>> values;
  std::vector<std::string> unparsed;

  const Scalar* find(std::string_view key) const;
};

struct MetricReport {
  std::string source;  // "<topology>/<benchmark>:<stage>"
  std::vector<ReportSection> sections;

  const ReportSection* section(std::string_view name) const;
};

/// "Section.Key" with an optional output column alias. The section name may
/// itself contain dots; every split point is tried left to right.
struct Selector {
  std::string path;
  std::string alias;

  const std::string& column() const { return alias.empty() ? path : alias; }
  const Scalar* resolve(const MetricReport& report) const;
};

/// Parses "Section.Key" or "Section.Key as Alias".
Selector parse_selector(std::string_view text);

/// One selector per non-blank, non-'#' line.
std::vector<Selector> parse_selector_list(std::string_view text);

/// Sectioned `key = value` text. Throws Error(UnparseableReport) when there
/// is no section header at all.
MetricReport parse_stats_report(std::string_view text, std::string source = {});

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

struct JobResult;

/// One row per job: topology, benchmark, status, probe_value, then one
/// column per selector. Missing values are empty cells.
Table extract_params(const std::vector<JobResult>& results, const std::vector<Selector>& selectors);

/// Comma-delimited, double-quote escaping, LF line endings.
std::string to_csv(const Table& table);
Table parse_csv(std::string_view text);
/// Space-aligned plain text rendering.
std::string to_text_table(const Table& table);
/// Throws Error(IoFailure).
void write_csv(const Table& table, const std::string& path);

using PowerMapping = std::vector<std::pair<std::string, Selector>>;

/// `name = Section.Key` lines, in any section or none.
PowerMapping parse_power_mapping(std::string_view text);

/// Replaces every `@{name}` with the selected report value. All placeholders
/// are checked before any output is produced. Throws Error(UnboundPlaceholder)
/// or Error(MissingStatistic).
std::string fill_power_template(const MetricReport& report, const PowerMapping& mapping,
                                std::string_view template_text);

}  // namespace mcsynth
