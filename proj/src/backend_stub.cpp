#include <sstream>
#include <thread>

#include "mcsynth/error.hpp"
#include "mcsynth/ini.hpp"
#include "mcsynth/orchestrator.hpp"

namespace mcsynth {

namespace {

double number(const ini::Entry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used == e.value.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::PlanInvalid, "scenario line " + std::to_string(e.line) + ": '" + e.value + "' is not a number");
}

void apply(StubScript& s, const ini::Entry& e, const fs::path& base_dir) {
  auto starts = [&](std::string_view p) { return e.key.rfind(p, 0) == 0 && e.key.size() > p.size(); };
  if (e.key == "functional") {
    if (e.value == "pass") s.functional = StubScript::Functional::Pass;
    else if (e.value == "fail") s.functional = StubScript::Functional::Fail;
    else if (e.value == "crash") s.functional = StubScript::Functional::Crash;
    else throw Error(ErrorCode::PlanInvalid, "scenario line " + std::to_string(e.line) + ": functional must be pass, fail or crash");
  } else if (e.key == "functional_log") {
    s.functional_log = e.value;
  } else if (e.key == "detailed") {
    if (e.value != "ok" && e.value != "crash") {
      throw Error(ErrorCode::PlanInvalid, "scenario line " + std::to_string(e.line) + ": detailed must be ok or crash");
    }
    s.detailed_crash = e.value == "crash";
  } else if (e.key == "duration") {
    s.duration = number(e);
    if (s.duration < 0) throw Error(ErrorCode::PlanInvalid, "scenario line " + std::to_string(e.line) + ": negative duration");
  } else if (starts("interim.")) {
    s.interim[e.key.substr(8)] = e.value;
  } else if (starts("final.")) {
    s.final[e.key.substr(6)] = e.value;
  } else if (starts("power.")) {
    s.power[e.key.substr(6)] = e.value;
  } else if (e.key == "report") {
    fs::path p(e.value);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    s.report_text = ini::read_file(p.string());
  } else {
    throw Error(ErrorCode::PlanInvalid, "scenario line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
  }
}

// "Section.Key" splits at the first dot so keys may carry dots of their own.
std::string synthesize(const std::map<std::string, std::string>& values) {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;
  for (const auto& [path, value] : values) {
    const auto dot = path.find('.');
    const auto sec = dot == std::string::npos ? std::string("General") : path.substr(0, dot);
    const auto key = dot == std::string::npos ? path : path.substr(dot + 1);
    auto it = std::find_if(sections.begin(), sections.end(), [&](const auto& s) { return s.first == sec; });
    if (it == sections.end()) it = sections.insert(sections.end(), {sec, {}});
    it->second.emplace_back(key, value);
  }
  std::ostringstream out;
  for (const auto& [name, entries] : sections) {
    out << "[ " << name << " ]\n";
    for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
    out << "\n";
  }
  return out.str();
}

struct StubRun : RunHandle {
  std::string job;
  fs::path workdir;
  const StubScript* script = nullptr;
  double elapsed = 0.0;
  bool open = true;
  std::size_t interval = 0;
};

StubRun& as_stub(RunHandle& h) {
  auto* run = dynamic_cast<StubRun*>(&h);
  if (!run) throw Error(ErrorCode::BackendError, "handle does not belong to the stub backend");
  return *run;
}

}  // namespace

const StubScript& StubScenario::script_for(const std::string& job_id) const {
  auto it = jobs.find(job_id);
  return it == jobs.end() ? defaults : it->second;
}

StubScenario parse_stub_scenario(std::string_view text, const fs::path& base_dir) {
  const auto doc = ini::parse(text);
  StubScenario sc;
  if (const auto* d = doc.find("default")) {
    for (const auto& e : d->entries) apply(sc.defaults, e, base_dir);
  }
  for (const auto& s : doc.sections) {
    if (s.name == "default") continue;
    if (s.name == "stub") {
      for (const auto& e : s.entries) {
        if (e.key != "time_scale") throw Error(ErrorCode::PlanInvalid, "scenario [stub]: unknown key '" + e.key + "'");
        sc.time_scale = number(e);
      }
      continue;
    }
    if (s.name.find('/') == std::string::npos) {
      throw Error(ErrorCode::PlanInvalid, "scenario section [" + s.name + "] is not topology/benchmark");
    }
    auto [it, fresh] = sc.jobs.try_emplace(s.name, sc.defaults);
    for (const auto& e : s.entries) apply(it->second, e, base_dir);
  }
  return sc;
}

void StubBackend::sleep_units(double units) const {
  if (scenario_.time_scale > 0 && units > 0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(units * scenario_.time_scale));
  }
}

StubBackend::Stats StubBackend::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

FunctionalOutcome StubBackend::run_functional(const SimJob& job) {
  const auto& s = scenario_.script_for(job.id());
  {
    std::lock_guard lock(mu_);
    ++stats_.functional_runs;
  }
  if (s.functional == StubScript::Functional::Crash) {
    throw Error(ErrorCode::BackendError, job.id() + ": functional simulator crashed");
  }
  FunctionalOutcome out;
  out.passed = s.functional == StubScript::Functional::Pass;
  out.log = s.functional_log.empty() ? (out.passed ? "functional run passed\n" : "functional run failed\n")
                                     : s.functional_log + "\n";
  return out;
}

std::unique_ptr<RunHandle> StubBackend::start_detailed(const SimJob& job) {
  const auto& s = scenario_.script_for(job.id());
  if (s.detailed_crash) throw Error(ErrorCode::BackendError, job.id() + ": detailed simulator failed to start");
  auto run = std::make_unique<StubRun>();
  run->job = job.id();
  run->workdir = job.workdir;
  run->script = &s;
  std::lock_guard lock(mu_);
  ++stats_.detailed_starts;
  ++stats_.detailed_by_job[run->job];
  stats_.scripted_total += s.duration;
  run->interval = stats_.intervals.size();
  const auto now = std::chrono::steady_clock::now();
  stats_.intervals.push_back({run->job, now, now});
  return run;
}

bool StubBackend::wait_for_probe(RunHandle& handle, double budget, ProbeClock) {
  auto& run = as_stub(handle);
  const double step = std::min(budget, run.script->duration) - run.elapsed;
  if (step > 0) {
    sleep_units(step);
    run.elapsed += step;
    std::lock_guard lock(mu_);
    stats_.time_spent += step;
  }
  return run.elapsed < run.script->duration;
}

std::optional<double> StubBackend::sample_metric(RunHandle& handle, const std::string& key) {
  const auto& run = as_stub(handle);
  auto it = run.script->interim.find(key);
  if (it == run.script->interim.end()) return std::nullopt;
  return Scalar::from_token(it->second).as_number();
}

fs::path StubBackend::wait(RunHandle& handle) {
  auto& run = as_stub(handle);
  if (!run.open) throw Error(ErrorCode::BackendError, run.job + ": run was aborted");
  const double rest = run.script->duration - run.elapsed;
  if (rest > 0) sleep_units(rest);
  run.elapsed = run.script->duration;
  run.open = false;

  std::string text = run.script->report_text;
  if (text.empty()) {
    auto values = run.script->interim;
    for (const auto& [k, v] : run.script->final) values[k] = v;
    if (values.empty()) values["General.Time"] = std::to_string(run.script->duration);
    text = synthesize(values);
  }
  const auto path = run.workdir / "arch_report.ini";
  ini::write_file(path.string(), text);

  std::lock_guard lock(mu_);
  if (rest > 0) stats_.time_spent += rest;
  ++stats_.completed;
  stats_.intervals[run.interval].end = std::chrono::steady_clock::now();
  return path;
}

void StubBackend::abort(RunHandle& handle) {
  auto& run = as_stub(handle);
  if (!run.open) return;
  run.open = false;
  std::lock_guard lock(mu_);
  ++stats_.aborts;
  stats_.time_skipped += run.script->duration - run.elapsed;
  stats_.intervals[run.interval].end = std::chrono::steady_clock::now();
}

std::optional<fs::path> StubBackend::run_power_stage(const SimJob& job, const MetricReport&,
                                                     const std::optional<fs::path>&) {
  const auto& s = scenario_.script_for(job.id());
  if (s.power.empty()) return std::nullopt;
  const auto path = job.workdir / "power_report.ini";
  ini::write_file(path.string(), synthesize(s.power));
  std::lock_guard lock(mu_);
  ++stats_.power_runs;
  return path;
}

}  // namespace mcsynth
