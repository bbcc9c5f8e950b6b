#include "mcsynth/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <set>
#include <sstream>

#include "mcsynth/error.hpp"
#include "mcsynth/ini.hpp"

namespace mcsynth {

Scalar Scalar::from_token(std::string_view token) {
  Scalar s;
  s.text = std::string(token);
  if (token.empty()) return s;
  const char* b = token.data();
  const char* e = token.data() + token.size();
  const char* digits = (*b == '+') ? b + 1 : b;
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(digits, e, i); ec == std::errc() && p == e) {
    s.kind = Kind::Integer;
    s.integer = i;
    s.real = static_cast<double>(i);
    return s;
  }
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(digits, e, d); ec == std::errc() && p == e) {
    s.kind = Kind::Real;
    s.real = d;
  }
  return s;
}

std::optional<double> Scalar::as_number() const {
  if (kind == Kind::Text) return std::nullopt;
  return real;
}

const Scalar* ReportSection::find(std::string_view key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return &v;
  }
  return nullptr;
}

const ReportSection* MetricReport::section(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Scalar* Selector::resolve(const MetricReport& report) const {
  for (auto dot = path.find('.'); dot != std::string::npos; dot = path.find('.', dot + 1)) {
    if (const auto* s = report.section(std::string_view(path).substr(0, dot))) {
      if (const auto* v = s->find(std::string_view(path).substr(dot + 1))) return v;
    }
  }
  return nullptr;
}

Selector parse_selector(std::string_view text) {
  text = ini::trim(text);
  Selector s;
  constexpr std::string_view as = " as ";
  if (auto pos = text.rfind(as); pos != std::string_view::npos) {
    s.alias = std::string(ini::trim(text.substr(pos + as.size())));
    text = ini::trim(text.substr(0, pos));
  }
  s.path = std::string(text);
  return s;
}

std::vector<Selector> parse_selector_list(std::string_view text) {
  std::vector<Selector> out;
  for (const auto& raw : ini::split_lines(text)) {
    auto line = ini::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_selector(line));
  }
  return out;
}

MetricReport parse_stats_report(std::string_view text, std::string source) {
  const auto doc = ini::parse(text);
  if (doc.sections.empty()) {
    throw Error(ErrorCode::UnparseableReport, "report '" + source + "' has no [section] structure");
  }
  MetricReport r;
  r.source = std::move(source);
  for (const auto& s : doc.sections) {
    auto it = std::find_if(r.sections.begin(), r.sections.end(),
                           [&](const ReportSection& rs) { return rs.name == s.name; });
    if (it == r.sections.end()) {
      r.sections.push_back({s.name, {}, {}});
      it = r.sections.end() - 1;
    }
    for (const auto& e : s.entries) {
      auto value = Scalar::from_token(e.value);
      auto existing = std::find_if(it->values.begin(), it->values.end(),
                                   [&](const auto& kv) { return kv.first == e.key; });
      if (existing == it->values.end()) it->values.emplace_back(e.key, std::move(value));
      else existing->second = std::move(value);
    }
    for (const auto& l : s.loose_lines) it->unparsed.push_back(l);
  }
  return r;
}

namespace {

bool needs_quotes(std::string_view field) {
  return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

void put_field(std::ostringstream& out, std::string_view field) {
  if (!needs_quotes(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void put_row(std::ostringstream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    put_field(out, row[i]);
  }
  out << '\n';
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream out;
  put_row(out, table.header);
  for (const auto& row : table.rows) put_row(out, row);
  return out.str();
}

Table parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      field_started = false;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  Table t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  return t;
}

std::string to_text_table(const Table& table) {
  std::vector<std::size_t> width(table.header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
  };
  widen(table.header);
  for (const auto& r : table.rows) widen(r);
  std::ostringstream out;
  auto put = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += "  ";
      line += row[i];
      if (i + 1 < row.size() && i < width.size()) line.append(width[i] - row[i].size(), ' ');
    }
    out << line << '\n';
  };
  put(table.header);
  for (const auto& r : table.rows) put(r);
  return out.str();
}

void write_csv(const Table& table, const std::string& path) { ini::write_file(path, to_csv(table)); }

PowerMapping parse_power_mapping(std::string_view text) {
  const auto doc = ini::parse(text);
  PowerMapping out;
  auto take = [&](const ini::Entry& e) { out.emplace_back(e.key, parse_selector(e.value)); };
  for (const auto& e : doc.preamble) take(e);
  for (const auto& s : doc.sections) {
    for (const auto& e : s.entries) take(e);
  }
  return out;
}

std::string fill_power_template(const MetricReport& report, const PowerMapping& mapping,
                                std::string_view template_text) {
  struct Piece {
    std::size_t begin, end;  // span of "@{name}"
    std::string_view name;
    const Selector* selector;
    const Scalar* value;
  };
  std::vector<Piece> pieces;
  std::size_t pos = 0;
  while ((pos = template_text.find("@{", pos)) != std::string_view::npos) {
    const auto close = template_text.find('}', pos + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::UnboundPlaceholder, "unterminated placeholder at offset " + std::to_string(pos));
    }
    const auto name = template_text.substr(pos + 2, close - pos - 2);
    auto it = std::find_if(mapping.begin(), mapping.end(), [&](const auto& m) { return m.first == name; });
    pieces.push_back({pos, close + 1, name, it == mapping.end() ? nullptr : &it->second, nullptr});
    pos = close + 1;
  }
  for (const auto& p : pieces) {
    if (!p.selector) {
      throw Error(ErrorCode::UnboundPlaceholder, "placeholder @{" + std::string(p.name) + "} has no mapping");
    }
  }
  for (auto& p : pieces) {
    p.value = p.selector->resolve(report);
    if (!p.value) {
      throw Error(ErrorCode::MissingStatistic, "placeholder @{" + std::string(p.name) + "} maps to '" +
                                                   p.selector->path + "', which the report does not contain");
    }
  }
  std::string out;
  std::size_t last = 0;
  for (const auto& p : pieces) {
    out.append(template_text.substr(last, p.begin - last));
    out.append(p.value->text);
    last = p.end;
  }
  out.append(template_text.substr(last));
  return out;
}

}  // namespace mcsynth
