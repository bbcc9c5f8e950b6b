#include <doctest.h>

#include <random>

#include "mcsynth/error.hpp"
#include "mcsynth/ini.hpp"
#include "mcsynth/jobs.hpp"
#include "mcsynth/report.hpp"

using namespace mcsynth;

namespace {

MetricReport fixture() {
  return parse_stats_report(ini::read_file(MCSYNTH_SOURCE_DIR "/tests/fixtures/arch_report.ini"), "fixture");
}

ErrorCode fill_error(const MetricReport& r, const PowerMapping& m, std::string_view t) {
  try {
    fill_power_template(r, m, t);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("fill_power_template did not throw");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("scalars keep their token text") {
  auto i = Scalar::from_token("1048576");
  CHECK(i.kind == Scalar::Kind::Integer);
  CHECK(i.integer == 1048576);
  auto r = Scalar::from_token("0.9905");
  CHECK(r.kind == Scalar::Kind::Real);
  CHECK(r.text == "0.9905");
  CHECK(r.as_number() == doctest::Approx(0.9905));
  auto t = Scalar::from_token("x86");
  CHECK(t.kind == Scalar::Kind::Text);
  CHECK_FALSE(t.as_number().has_value());
}

TEST_CASE("report sections and dotted keys") {
  const auto r = fixture();
  REQUIRE(r.section("General") != nullptr);
  CHECK(r.section("General")->find("IPC")->text == "1.25");
  CHECK(parse_selector("Core 0.Commit.Branches").resolve(r)->integer == 170201);
  CHECK(parse_selector("mod-dl1-1.HitRatio").resolve(r)->text == "0.9505");
  CHECK(parse_selector("General.Nope").resolve(r) == nullptr);
  CHECK_THROWS_AS(parse_stats_report("just text\nno sections\n"), Error);
}

TEST_CASE("selector aliases") {
  const auto s = parse_selector("General.IPC as ipc");
  CHECK(s.path == "General.IPC");
  CHECK(s.column() == "ipc");
  const auto list = parse_selector_list("# columns\nGeneral.IPC\n\nmod-mm.Reads as mem_reads\n");
  REQUIRE(list.size() == 2);
  CHECK(list[1].column() == "mem_reads");
}

TEST_CASE("csv round-trip with awkward cells") {
  Table t{{"a", "b,c", "d\"e"}, {{"1", "", "x\ny"}, {"\"", ",", "plain"}}};
  const auto csv = to_csv(t);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(parse_csv(csv) == t);
  CHECK(to_text_table(t).find("plain") != std::string::npos);
}

TEST_CASE("random tables survive the csv round-trip") {
  std::mt19937 rng(5);
  const std::string alphabet = "ab ,\"\n1.-";
  for (int k = 0; k < 50; ++k) {
    Table t;
    const int cols = 1 + static_cast<int>(rng() % 5);
    for (int c = 0; c < cols; ++c) t.header.push_back("h" + std::to_string(c));
    for (int r = 0; r < 20; ++r) {
      std::vector<std::string> row;
      for (int c = 0; c < cols; ++c) {
        std::string cell;
        for (int n = static_cast<int>(rng() % 6); n > 0; --n) cell += alphabet[rng() % alphabet.size()];
        row.push_back(cell);
      }
      t.rows.push_back(row);
    }
    CHECK(parse_csv(to_csv(t)) == t);
  }
}

TEST_CASE("extract_params columns and lookups") {
  JobResult done;
  done.topology = "2C_2L1";
  done.benchmark = "fft";
  done.arch_report = fixture();
  done.power_report = parse_stats_report("[Processor]\nPeak Power = 12.5\n", "p");
  JobResult cut;
  cut.topology = "2C_2L1";
  cut.benchmark = "lu";
  cut.status = JobStatus::EarlyTerminated;
  cut.probe_value = 0.75;
  const auto t = extract_params({done, cut}, parse_selector_list("General.IPC as ipc\nProcessor.Peak Power\n"));
  CHECK(t.header == std::vector<std::string>{"topology", "benchmark", "status", "probe_value", "ipc", "Processor.Peak Power"});
  CHECK(t.rows[0] == std::vector<std::string>{"2C_2L1", "fft", "Completed", "", "1.25", "12.5"});
  CHECK(t.rows[1] == std::vector<std::string>{"2C_2L1", "lu", "EarlyTerminated", "0.75", "", ""});
}

TEST_CASE("power template filling") {
  const auto r = fixture();
  PowerMapping m{{"ipc", parse_selector("General.IPC")}, {"br", parse_selector("Core 0.Commit.Branches")}};
  CHECK(fill_power_template(r, m, "<a v=\"@{ipc}\"/><b v=\"@{br}\"/>") == "<a v=\"1.25\"/><b v=\"170201\"/>");
  CHECK(fill_error(r, m, "@{ipc} @{nope}") == ErrorCode::UnboundPlaceholder);
  CHECK(fill_error(r, m, "@{ipc") == ErrorCode::UnboundPlaceholder);
  PowerMapping missing{{"ipc", parse_selector("General.Missing")}};
  CHECK(fill_error(r, missing, "@{ipc}") == ErrorCode::MissingStatistic);
  // An unbound placeholder is reported even when it comes after a missing one.
  CHECK(fill_error(r, missing, "@{ipc} @{other}") == ErrorCode::UnboundPlaceholder);
}

TEST_CASE("shipped template, mapping and fixture fill completely") {
  const auto text = fill_power_template(
      fixture(), parse_power_mapping(ini::read_file(MCSYNTH_SOURCE_DIR "/data/power_mapping.ini")),
      ini::read_file(MCSYNTH_SOURCE_DIR "/data/power_template.xml"));
  CHECK(text.find("@{") == std::string::npos);
  CHECK(text.find("value=\"1048576\"") != std::string::npos);
}
