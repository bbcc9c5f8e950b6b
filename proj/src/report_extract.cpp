#include <charconv>

#include "mcsynth/jobs.hpp"
#include "mcsynth/report.hpp"

namespace mcsynth {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

Table extract_params(const std::vector<JobResult>& results, const std::vector<Selector>& selectors) {
  Table t;
  t.header = {"topology", "benchmark", "status", "probe_value"};
  for (const auto& s : selectors) t.header.push_back(s.column());
  for (const auto& r : results) {
    std::vector<std::string> row{r.topology, r.benchmark, std::string(to_string(r.status)),
                                 r.probe_value ? format_number(*r.probe_value) : std::string()};
    for (const auto& s : selectors) {
      const Scalar* v = r.arch_report ? s.resolve(*r.arch_report) : nullptr;
      if (!v && r.power_report) v = s.resolve(*r.power_report);
      row.push_back(v ? v->text : std::string());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace mcsynth
