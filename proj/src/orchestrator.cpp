#include "mcsynth/orchestrator.hpp"

#include <unistd.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mcsynth/error.hpp"
#include "mcsynth/generator.hpp"
#include "mcsynth/ini.hpp"

namespace mcsynth {

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::GreaterEqual: return ">=";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::Less: return "<";
  }
  return "?";
}

std::optional<Comparator> comparator_from_string(std::string_view text) {
  for (auto c : {Comparator::GreaterEqual, Comparator::LessEqual, Comparator::Greater, Comparator::Less}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

bool satisfies(double value, Comparator c, double threshold) {
  switch (c) {
    case Comparator::GreaterEqual: return value >= threshold;
    case Comparator::LessEqual: return value <= threshold;
    case Comparator::Greater: return value > threshold;
    case Comparator::Less: return value < threshold;
  }
  return false;
}

void ControlPolicy::validate() const {
  if (has_condition() && !(probe_budget > 0.0)) {
    throw Error(ErrorCode::PlanInvalid, "probe_budget must be positive when a metric condition is set");
  }
}

std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::Completed: return "Completed";
    case JobStatus::PrecheckFailed: return "PrecheckFailed";
    case JobStatus::EarlyTerminated: return "EarlyTerminated";
    case JobStatus::BackendError: return "BackendError";
  }
  return "?";
}

std::optional<JobStatus> status_from_string(std::string_view text) {
  for (auto s : {JobStatus::Completed, JobStatus::PrecheckFailed, JobStatus::EarlyTerminated, JobStatus::BackendError}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::vector<SimJob> plan_jobs(const std::vector<TopologySpec>& topologies, const std::vector<Benchmark>& benchmarks,
                              const ControlPolicy& policy, const fs::path& outdir, const PlanOptions& options) {
  policy.validate();
  std::vector<SimJob> jobs;
  if (topologies.empty() || benchmarks.empty()) return jobs;

  std::set<std::string> bench_names;
  for (const auto& b : benchmarks) {
    if (b.name.empty() || b.name.find('/') != std::string::npos) {
      throw Error(ErrorCode::InvalidBenchmark, "benchmark name '" + b.name + "' is not a plain identifier");
    }
    if (!bench_names.insert(b.name).second) {
      throw Error(ErrorCode::WorkdirConflict, "benchmark '" + b.name + "' listed twice");
    }
    if (options.check_executables) {
      std::error_code ec;
      if (!fs::is_regular_file(b.executable, ec) || ::access(b.executable.c_str(), X_OK) != 0) {
        throw Error(ErrorCode::InvalidBenchmark,
                    "benchmark '" + b.name + "': '" + b.executable.string() + "' is not an executable file");
      }
    }
  }

  std::set<std::string> topo_names;
  const auto configs = outdir / "configs";
  try {
    fs::create_directories(configs);
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::EmissionFailed, std::string("cannot create config directory: ") + e.what());
  }
  for (const auto& spec : topologies) {
    std::string name;
    fs::path mem, net;
    try {
      name = canonical_name(spec);
      if (!topo_names.insert(name).second) {
        throw Error(ErrorCode::WorkdirConflict, "topology '" + name + "' listed twice");
      }
      const auto bundle = emit_bundle(generate(spec), options.profile);
      mem = configs / (name + ".mem.ini");
      net = configs / (name + ".net.ini");
      ini::write_file(mem.string(), bundle.mem_config);
      ini::write_file(net.string(), bundle.net_config);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::WorkdirConflict) throw;
      throw Error(ErrorCode::EmissionFailed, "emitting '" + name + "': " + e.what());
    }
    for (const auto& b : benchmarks) {
      SimJob job;
      job.topology_name = name;
      job.topology = spec;
      job.benchmark = b;
      job.mem_config = mem;
      job.net_config = net;
      job.workdir = outdir / "jobs" / name / b.name;
      job.policy = policy;
      job.power = options.power;
      std::error_code ec;
      fs::create_directories(job.workdir, ec);
      if (ec) throw Error(ErrorCode::WorkdirConflict, "cannot create workdir " + job.workdir.string() + ": " + ec.message());
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

FunctionalOutcome run_precheck(const SimJob& job, Backend& backend) {
  auto outcome = backend.run_functional(job);
  std::error_code ec;
  if (fs::is_directory(job.workdir, ec)) {
    try {
      ini::write_file((job.workdir / "functional.log").string(), outcome.log);
    } catch (const Error&) {
      // Log persistence is best effort; the outcome is what matters.
    }
  }
  return outcome;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::optional<double> probe(const SimJob& job, Backend& backend, RunHandle& handle, std::vector<std::string>& warnings) {
  const auto& key = job.policy.metric_key;
  if (auto path = backend.interim_report(handle); path && fs::exists(*path)) {
    try {
      const auto report = parse_stats_report(ini::read_file(path->string()), job.id() + ":interim");
      if (const auto* v = Selector{key, {}}.resolve(report)) {
        if (auto n = v->as_number()) return n;
      }
    } catch (const Error& e) {
      warnings.push_back(std::string("interim report unreadable: ") + e.what());
    }
  }
  auto value = backend.sample_metric(handle, key);
  if (!value) warnings.push_back("MetricUnavailable: '" + key + "' could not be sampled; running to completion");
  return value;
}

}  // namespace

JobResult run_job(const SimJob& job, Backend& backend) {
  JobResult r;
  r.topology = job.topology_name;
  r.benchmark = job.benchmark.name;
  const auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<RunHandle> handle;
  try {
    handle = backend.start_detailed(job);
    if (job.policy.has_condition() && backend.wait_for_probe(*handle, job.policy.probe_budget, job.policy.clock)) {
      if (auto value = probe(job, backend, *handle, r.warnings)) {
        r.probe_value = value;
        if (!satisfies(*value, job.policy.comparator, job.policy.threshold)) {
          backend.abort(*handle);
          r.status = JobStatus::EarlyTerminated;
          std::ostringstream msg;
          msg << job.policy.metric_key << " = " << *value << " fails " << to_string(job.policy.comparator) << " "
              << job.policy.threshold;
          r.message = msg.str();
          r.wall_time = seconds_since(t0);
          return r;
        }
      }
    }
    r.arch_report_path = backend.wait(*handle);
    handle.reset();
    r.arch_report = parse_stats_report(ini::read_file(r.arch_report_path.string()), job.id() + ":architectural");

    std::optional<fs::path> power_input;
    if (job.power) {
      try {
        const auto text = fill_power_template(*r.arch_report, job.power->mapping, job.power->template_text);
        power_input = job.workdir / "power_input.xml";
        ini::write_file(power_input->string(), text);
      } catch (const Error& e) {
        r.warnings.push_back(std::string("power input not generated: ") + e.what());
      }
    }
    if (!job.power || power_input) {
      if (auto p = backend.run_power_stage(job, *r.arch_report, power_input)) {
        r.power_report_path = *p;
        r.power_report = parse_stats_report(ini::read_file(p->string()), job.id() + ":power");
      }
    }
    r.status = JobStatus::Completed;
  } catch (const std::exception& e) {
    if (handle) {
      try {
        backend.abort(*handle);
      } catch (...) {
      }
    }
    r.status = JobStatus::BackendError;
    r.message = e.what();
  }
  r.wall_time = seconds_since(t0);
  return r;
}

JobResult execute_job(const SimJob& job, Backend& backend) {
  if (job.policy.precheck_enabled) {
    const auto t0 = std::chrono::steady_clock::now();
    JobResult r;
    r.topology = job.topology_name;
    r.benchmark = job.benchmark.name;
    try {
      const auto outcome = run_precheck(job, backend);
      if (!outcome.passed) {
        r.status = JobStatus::PrecheckFailed;
        r.message = "functional pre-check failed";
        r.wall_time = seconds_since(t0);
        return r;
      }
    } catch (const std::exception& e) {
      r.status = JobStatus::BackendError;
      r.message = e.what();
      r.wall_time = seconds_since(t0);
      return r;
    }
  }
  return run_job(job, backend);
}

std::vector<JobResult> run_plan(const std::vector<SimJob>& jobs, Backend& backend, int parallelism) {
  if (parallelism < 1) throw Error(ErrorCode::PlanInvalid, "parallelism must be at least 1");
  std::vector<JobResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      results[i] = execute_job(jobs[i], backend);
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(parallelism), jobs.size());
  if (n <= 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(n);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  pool.clear();  // joins
  return results;
}

int run_exit_code(const std::vector<JobResult>& results) {
  int code = 0;
  for (const auto& r : results) {
    if (r.status == JobStatus::BackendError) return 1;
    if (r.status != JobStatus::Completed) code = 3;
  }
  return code;
}

void save_results(const std::vector<JobResult>& results, const fs::path& outdir) {
  auto rel = [&](const fs::path& p) { return p.empty() ? std::string() : fs::relative(p, outdir).generic_string(); };
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json j;
    j["topology"] = r.topology;
    j["benchmark"] = r.benchmark;
    j["status"] = std::string(to_string(r.status));
    j["probe_value"] = r.probe_value ? nlohmann::json(*r.probe_value) : nlohmann::json(nullptr);
    j["wall_time"] = r.wall_time;
    j["arch_report"] = rel(r.arch_report_path);
    j["power_report"] = rel(r.power_report_path);
    j["warnings"] = r.warnings;
    j["message"] = r.message;
    doc.push_back(std::move(j));
  }
  ini::write_file((outdir / "results.json").string(), doc.dump(2) + "\n");
}

std::vector<JobResult> load_results(const fs::path& outdir) {
  const auto path = outdir / "results.json";
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ini::read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + e.what());
  }
  std::vector<JobResult> out;
  try {
    for (const auto& j : doc) {
      JobResult r;
      r.topology = j.at("topology").get<std::string>();
      r.benchmark = j.at("benchmark").get<std::string>();
      auto status = status_from_string(j.at("status").get<std::string>());
      if (!status) throw Error(ErrorCode::IoFailure, path.string() + ": unknown status");
      r.status = *status;
      if (!j.at("probe_value").is_null()) r.probe_value = j.at("probe_value").get<double>();
      r.wall_time = j.value("wall_time", 0.0);
      r.warnings = j.value("warnings", std::vector<std::string>{});
      r.message = j.value("message", std::string());
      const auto source = r.topology + "/" + r.benchmark;
      if (auto a = j.value("arch_report", std::string()); !a.empty()) {
        r.arch_report_path = outdir / a;
        r.arch_report = parse_stats_report(ini::read_file(r.arch_report_path.string()), source + ":architectural");
      }
      if (auto p = j.value("power_report", std::string()); !p.empty()) {
        r.power_report_path = outdir / p;
        r.power_report = parse_stats_report(ini::read_file(r.power_report_path.string()), source + ":power");
      }
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + e.what());
  }
  return out;
}

namespace {

[[noreturn]] void plan_error(const ini::Entry& e, const std::string& why) {
  throw Error(ErrorCode::PlanInvalid, "plan line " + std::to_string(e.line) + " (" + e.key + "): " + why);
}

double to_double(const ini::Entry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) plan_error(e, "not a number");
    return v;
  } catch (const std::logic_error&) {
    plan_error(e, "not a number");
  }
}

bool to_bool(const ini::Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1" || e.value == "on") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0" || e.value == "off") return false;
  plan_error(e, "expected true/false");
}

std::vector<std::string> words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

Plan parse_plan(std::string_view text, const fs::path& base_dir) {
  Plan plan;
  const auto doc = ini::parse(text);
  bool have_list = false;
  for (const auto& s : doc.sections) {
    for (const auto& e : s.entries) {
      if (s.name == "Topologies") {
        if (e.key != "list") plan_error(e, "unknown key");
        plan.topology_list = resolve(base_dir, e.value);
        have_list = true;
      } else if (s.name == "Benchmarks") {
        auto w = words(e.value);
        if (w.empty()) plan_error(e, "benchmark needs an executable path");
        Benchmark b;
        b.name = e.key;
        b.executable = resolve(base_dir, w.front());
        b.args.assign(w.begin() + 1, w.end());
        plan.benchmarks.push_back(std::move(b));
      } else if (s.name == "Control") {
        auto& p = plan.policy;
        if (e.key == "metric") p.metric_key = e.value;
        else if (e.key == "comparator") {
          auto c = comparator_from_string(e.value);
          if (!c) plan_error(e, "comparator must be one of >= <= > <");
          p.comparator = *c;
        } else if (e.key == "threshold") p.threshold = to_double(e);
        else if (e.key == "probe_budget") p.probe_budget = to_double(e);
        else if (e.key == "precheck") p.precheck_enabled = to_bool(e);
        else if (e.key == "clock") {
          if (e.value == "wall") p.clock = ProbeClock::Wall;
          else if (e.value == "simulated") p.clock = ProbeClock::Simulated;
          else plan_error(e, "clock must be wall or simulated");
        } else plan_error(e, "unknown key");
      } else if (s.name == "Run") {
        if (e.key == "parallelism") {
          const double v = to_double(e);
          if (v < 1 || v != static_cast<int>(v)) plan_error(e, "parallelism must be a positive integer");
          plan.parallelism = static_cast<int>(v);
        } else if (e.key == "outdir") plan.outdir = resolve(base_dir, e.value);
        else plan_error(e, "unknown key");
      } else if (s.name == "Backend") {
        auto& c = plan.commands;
        if (e.key == "functional") c.functional = e.value;
        else if (e.key == "detailed") c.detailed = e.value;
        else if (e.key == "power") c.power = e.value;
        else if (e.key == "poll_interval") c.poll_interval = to_double(e);
        else if (e.key == "sim_time_key") c.sim_time_key = e.value;
        else plan_error(e, "unknown key");
      } else if (s.name == "Power") {
        if (e.key == "template") plan.power_template = resolve(base_dir, e.value);
        else if (e.key == "mapping") plan.power_mapping = resolve(base_dir, e.value);
        else plan_error(e, "unknown key");
      } else if (s.name == "Profile") {
        if (e.key == "path") plan.profile = resolve(base_dir, e.value);
        else plan_error(e, "unknown key");
      } else {
        throw Error(ErrorCode::PlanInvalid, "unknown plan section [" + s.name + "]");
      }
    }
  }
  if (!have_list) throw Error(ErrorCode::PlanInvalid, "plan needs [Topologies] list = <file>");
  if (plan.power_template.has_value() != plan.power_mapping.has_value()) {
    throw Error(ErrorCode::PlanInvalid, "[Power] needs both template and mapping");
  }
  plan.policy.validate();
  return plan;
}

}  // namespace mcsynth
