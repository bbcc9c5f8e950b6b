#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcsynth/report.hpp"
#include "mcsynth/topology.hpp"

namespace mcsynth {

namespace fs = std::filesystem;

struct Benchmark {
  std::string name;
  fs::path executable;
  std::vector<std::string> args;
  std::vector<fs::path> input_data;
};

enum class Comparator { GreaterEqual, LessEqual, Greater, Less };

std::string_view to_string(Comparator c);
std::optional<Comparator> comparator_from_string(std::string_view text);
bool satisfies(double value, Comparator c, double threshold);

/// Clock used to decide when the probe budget has elapsed.
enum class ProbeClock { Wall, Simulated };

struct ControlPolicy {
  bool precheck_enabled = false;
  std::string metric_key;  // empty: no early-termination condition
  Comparator comparator = Comparator::GreaterEqual;
  double threshold = 0.0;
  double probe_budget = 0.0;  // seconds (Wall) or backend time units (Simulated)
  ProbeClock clock = ProbeClock::Wall;

  bool has_condition() const { return !metric_key.empty(); }
  /// Throws Error(PlanInvalid).
  void validate() const;
};

struct PowerSetup {
  std::string template_text;
  PowerMapping mapping;
};

struct SimJob {
  std::string topology_name;
  TopologySpec topology;
  Benchmark benchmark;
  fs::path mem_config;
  fs::path net_config;
  fs::path workdir;
  ControlPolicy policy;
  std::optional<PowerSetup> power;

  std::string id() const { return topology_name + "/" + benchmark.name; }
};

enum class JobStatus { Completed, PrecheckFailed, EarlyTerminated, BackendError };

std::string_view to_string(JobStatus s);
std::optional<JobStatus> status_from_string(std::string_view text);

struct JobResult {
  std::string topology;
  std::string benchmark;
  JobStatus status = JobStatus::Completed;
  std::optional<MetricReport> arch_report;
  std::optional<MetricReport> power_report;
  fs::path arch_report_path;
  fs::path power_report_path;
  double wall_time = 0.0;  // seconds
  std::optional<double> probe_value;
  std::vector<std::string> warnings;
  std::string message;
};

}  // namespace mcsynth
