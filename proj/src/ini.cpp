#include "mcsynth/ini.hpp"

#include <fstream>
#include <sstream>

#include "mcsynth/error.hpp"

namespace mcsynth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedName: return "MalformedName";
    case ErrorCode::RuleViolation: return "RuleViolation";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::QuotaDomain: return "QuotaDomain";
    case ErrorCode::EmptySide: return "EmptySide";
    case ErrorCode::NotBypass: return "NotBypass";
    case ErrorCode::GenerationInvariantBroken: return "GenerationInvariantBroken";
    case ErrorCode::UnvalidatedGraph: return "UnvalidatedGraph";
    case ErrorCode::ProfileInvalid: return "ProfileInvalid";
    case ErrorCode::EmissionFailed: return "EmissionFailed";
    case ErrorCode::WorkdirConflict: return "WorkdirConflict";
    case ErrorCode::InvalidBenchmark: return "InvalidBenchmark";
    case ErrorCode::PlanInvalid: return "PlanInvalid";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::MetricUnavailable: return "MetricUnavailable";
    case ErrorCode::UnparseableReport: return "UnparseableReport";
    case ErrorCode::MissingStatistic: return "MissingStatistic";
    case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

namespace ini {

const Entry* Section::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

std::optional<std::string> Section::get(std::string_view key) const {
  if (const auto* e = find(key)) return e->value;
  return std::nullopt;
}

const Section* Document::find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<const Section*> Document::find_all(std::string_view name) const {
  std::vector<const Section*> out;
  for (const auto& s : sections) {
    if (s.name == name) out.push_back(&s);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = nl + 1;
  }
  if (!lines.empty() && !lines.back().empty() && lines.back().back() == '\r') {
    lines.back().pop_back();
  }
  return lines;
}

Document parse(std::string_view text) {
  Document doc;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == ';' || line.front() == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      Section s;
      s.name = std::string(trim(line.substr(1, line.size() - 2)));
      s.line = i + 1;
      doc.sections.push_back(std::move(s));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      if (!doc.sections.empty()) doc.sections.back().loose_lines.emplace_back(line);
      continue;
    }
    Entry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), i + 1};
    if (doc.sections.empty()) {
      doc.preamble.push_back(std::move(e));
    } else {
      doc.sections.back().entries.push_back(std::move(e));
    }
  }
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path + "' failed");
}

}  // namespace ini
}  // namespace mcsynth
