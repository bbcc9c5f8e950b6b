#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mcsynth/emitter.hpp"
#include "mcsynth/jobs.hpp"

namespace mcsynth {

struct FunctionalOutcome {
  bool passed = false;
  std::string log;
};

/// Opaque handle to one running detailed simulation.
class RunHandle {
 public:
  virtual ~RunHandle() = default;
};

/// Adapter between the job runner and a simulator. Implementations must
/// accept concurrent calls on distinct handles. Operational failures are
/// reported as Error(BackendError).
class Backend {
 public:
  virtual ~Backend() = default;

  virtual FunctionalOutcome run_functional(const SimJob& job) = 0;
  virtual std::unique_ptr<RunHandle> start_detailed(const SimJob& job) = 0;
  /// Blocks until the run has consumed `budget` on `clock`, or has ended.
  /// Returns true while the run is still going.
  virtual bool wait_for_probe(RunHandle& handle, double budget, ProbeClock clock) = 0;
  /// Interim statistics file written by the simulator, if it has one.
  virtual std::optional<fs::path> interim_report(RunHandle&) { return std::nullopt; }
  virtual std::optional<double> sample_metric(RunHandle& handle, const std::string& key) = 0;
  /// Waits for completion and returns the architectural report file.
  virtual fs::path wait(RunHandle& handle) = 0;
  /// Idempotent.
  virtual void abort(RunHandle& handle) = 0;
  /// Runs the power model. `power_input` is the filled template when the job
  /// has a PowerSetup. Returns the power report file, if the backend has a
  /// power stage.
  virtual std::optional<fs::path> run_power_stage(const SimJob& job, const MetricReport& arch,
                                                  const std::optional<fs::path>& power_input) = 0;
};

struct PlanOptions {
  CacheProfile profile = CacheProfile::defaults();
  std::optional<PowerSetup> power;
  bool check_executables = true;
};

/// Cartesian product topologies x benchmarks. Emits each topology's configs
/// once under `outdir/configs` and creates one workdir per job under
/// `outdir/jobs`. Throws Error(EmissionFailed), Error(WorkdirConflict) or
/// Error(InvalidBenchmark).
std::vector<SimJob> plan_jobs(const std::vector<TopologySpec>& topologies, const std::vector<Benchmark>& benchmarks,
                              const ControlPolicy& policy, const fs::path& outdir,
                              const PlanOptions& options = {});

/// Runs the functional pre-check. Throws Error(BackendError) when the backend
/// itself fails (as opposed to a failing check).
FunctionalOutcome run_precheck(const SimJob& job, Backend& backend);

/// Detailed simulation with the single-probe early-termination rule, then
/// the power stage.
JobResult run_job(const SimJob& job, Backend& backend);

/// Pre-check (when enabled) then run_job. Never throws for job failures.
JobResult execute_job(const SimJob& job, Backend& backend);

/// At most `parallelism` jobs in flight; results in job order.
std::vector<JobResult> run_plan(const std::vector<SimJob>& jobs, Backend& backend, int parallelism);

/// 0 all Completed, 3 some EarlyTerminated/PrecheckFailed, 1 any BackendError.
int run_exit_code(const std::vector<JobResult>& results);

/// results.json in `outdir`; report paths are stored relative to it.
void save_results(const std::vector<JobResult>& results, const fs::path& outdir);
std::vector<JobResult> load_results(const fs::path& outdir);

// ---------------------------------------------------------------------------
// Scripted backend

/// Per-job script of the stub backend.
struct StubScript {
  enum class Functional { Pass, Fail, Crash };
  Functional functional = Functional::Pass;
  std::string functional_log;
  bool detailed_crash = false;
  double duration = 1.0;  // time units of the full detailed run
  std::map<std::string, std::string> interim;  // selector path -> value
  std::map<std::string, std::string> final;
  std::map<std::string, std::string> power;
  std::string report_text;  // verbatim final report; overrides `final`
};

/// INI scenario: `[stub]` (time_scale = seconds per unit), `[default]`, and
/// one `[topology/benchmark]` section per scripted job. Job sections start
/// from `[default]`. Keys: functional, functional_log, detailed, duration,
/// interim.<Section.Key>, final.<Section.Key>, power.<Section.Key>, report
/// (file, relative to `base_dir`).
struct StubScenario {
  double time_scale = 0.0;
  StubScript defaults;
  std::map<std::string, StubScript> jobs;

  const StubScript& script_for(const std::string& job_id) const;
};

StubScenario parse_stub_scenario(std::string_view text, const fs::path& base_dir = {});

/// Deterministic backend driven by a StubScenario. Keeps counters and a
/// ledger of scripted time so tests can observe what ran.
class StubBackend : public Backend {
 public:
  explicit StubBackend(StubScenario scenario) : scenario_(std::move(scenario)) {}

  FunctionalOutcome run_functional(const SimJob& job) override;
  std::unique_ptr<RunHandle> start_detailed(const SimJob& job) override;
  bool wait_for_probe(RunHandle& handle, double budget, ProbeClock clock) override;
  std::optional<double> sample_metric(RunHandle& handle, const std::string& key) override;
  fs::path wait(RunHandle& handle) override;
  void abort(RunHandle& handle) override;
  std::optional<fs::path> run_power_stage(const SimJob& job, const MetricReport& arch,
                                          const std::optional<fs::path>& power_input) override;

  struct Interval {
    std::string job;
    std::chrono::steady_clock::time_point start, end;
  };

  struct Stats {
    int functional_runs = 0;
    int detailed_starts = 0;
    int completed = 0;
    int aborts = 0;
    int power_runs = 0;
    double scripted_total = 0.0;  // sum of full durations of started runs
    double time_spent = 0.0;      // units actually simulated
    double time_skipped = 0.0;    // units avoided by aborts
    std::map<std::string, int> detailed_by_job;
    std::vector<Interval> intervals;
  };

  Stats stats() const;

 private:
  void sleep_units(double units) const;

  StubScenario scenario_;
  mutable std::mutex mu_;
  Stats stats_;
};

// ---------------------------------------------------------------------------
// External-command backend

/// Shell command templates. Placeholders: {mem_config} {net_config}
/// {benchmark} {args} {workdir} {report_out} {interim_out} {power_input}
/// {power_out}. Values are substituted shell-quoted.
struct ExternalCommands {
  std::string functional;
  std::string detailed;
  std::string power;
  double poll_interval = 0.05;             // seconds
  std::string sim_time_key = "General.Time";  // interim key read for the Simulated clock
};

std::string expand_command(const std::string& templ, const std::map<std::string, std::string>& values);

class ExternalBackend : public Backend {
 public:
  explicit ExternalBackend(ExternalCommands commands) : cmds_(std::move(commands)) {}

  FunctionalOutcome run_functional(const SimJob& job) override;
  std::unique_ptr<RunHandle> start_detailed(const SimJob& job) override;
  bool wait_for_probe(RunHandle& handle, double budget, ProbeClock clock) override;
  std::optional<fs::path> interim_report(RunHandle& handle) override;
  std::optional<double> sample_metric(RunHandle& handle, const std::string& key) override;
  fs::path wait(RunHandle& handle) override;
  void abort(RunHandle& handle) override;
  std::optional<fs::path> run_power_stage(const SimJob& job, const MetricReport& arch,
                                          const std::optional<fs::path>& power_input) override;

 private:
  ExternalCommands cmds_;
};

// ---------------------------------------------------------------------------
// Plan file

struct Plan {
  fs::path topology_list;
  std::vector<Benchmark> benchmarks;
  ControlPolicy policy;
  int parallelism = 1;
  fs::path outdir = "out";
  ExternalCommands commands;
  std::optional<fs::path> power_template;
  std::optional<fs::path> power_mapping;
  std::optional<fs::path> profile;
};

/// INI plan: [Topologies] list; [Benchmarks] name = path args...; [Control]
/// metric, comparator, threshold, probe_budget, precheck, clock; [Run]
/// parallelism, outdir; [Backend] functional, detailed, power,
/// poll_interval, sim_time_key; [Power] template, mapping; [Profile] path.
/// Relative paths resolve against `base_dir`. Throws Error(PlanInvalid).
Plan parse_plan(std::string_view text, const fs::path& base_dir = {});

}  // namespace mcsynth
