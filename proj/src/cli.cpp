#include "mcsynth/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <optional>

#include "mcsynth/classifier.hpp"
#include "mcsynth/emitter.hpp"
#include "mcsynth/error.hpp"
#include "mcsynth/generator.hpp"
#include "mcsynth/ini.hpp"
#include "mcsynth/orchestrator.hpp"
#include "mcsynth/report.hpp"
#include "mcsynth/validator.hpp"

namespace mcsynth {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kViolations = 2;

struct Options {
  std::string list;
  std::string out;
  std::string profile;
  std::string plan;
  std::string selectors;
  std::string format = "csv";
  std::string backend = "external";
  std::string scenario;
  std::string topology;
  int parallelism = 0;
  std::vector<std::string> inputs;
};

CacheProfile load_profile(const std::string& path) {
  return path.empty() ? CacheProfile::defaults() : parse_profile(ini::read_file(path));
}

void write_bundle(const fs::path& dir, const std::string& name, const ArchGraph& graph, const ConfigBundle& bundle,
                  bool with_edges) {
  ini::write_file((dir / (name + ".mem.ini")).string(), bundle.mem_config);
  ini::write_file((dir / (name + ".net.ini")).string(), bundle.net_config);
  if (with_edges) ini::write_file((dir / (name + ".edges")).string(), dump_edges(graph));
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

int loc_total(const ConfigBundle& b) { return count_nonblank_lines(b.mem_config) + count_nonblank_lines(b.net_config); }

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
  const auto profile = load_profile(o.profile);
  const auto entries = load_topology_list(ini::read_file(o.list));
  make_dir(o.out);
  int code = kOk;
  for (const auto& e : entries) {
    if (!e.ok()) {
      err << o.list << ":" << e.line << ": " << e.error().what() << "\n";
      code = kViolations;
      continue;
    }
    const auto name = canonical_name(e.spec());
    const auto graph = generate(e.spec());
    const auto bundle = emit_bundle(graph, profile);
    write_bundle(o.out, name, graph, bundle, true);
    out << name << "\t" << to_string(graph.kind) << "\t" << loc_total(bundle) << "\n";
  }
  return code;
}

int cmd_classify(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, std::string>> names;
  for (const auto& n : o.inputs) names.emplace_back(n, n);
  if (!o.list.empty()) {
    for (const auto& e : load_topology_list(ini::read_file(o.list))) {
      names.emplace_back(e.text, o.list + ":" + std::to_string(e.line));
    }
  }
  if (names.empty()) {
    err << "classify: no topology names given\n";
    return kFailure;
  }
  const bool bare = names.size() == 1;
  int code = kOk;
  for (const auto& [name, where] : names) {
    try {
      const auto kind = classify(parse_topology(name));
      if (bare) out << to_string(kind) << "\n";
      else out << name << "\t" << to_string(kind) << "\n";
    } catch (const Error& e) {
      err << where << ": " << e.what() << "\n";
      code = kViolations;
    }
  }
  return code;
}

std::string strip_suffix(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0
             ? s.substr(0, s.size() - suffix.size())
             : std::string();
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.inputs.empty()) {
    err << "validate: no input files given\n";
    return kFailure;
  }
  int code = kOk;
  for (const auto& path : o.inputs) {
    ValidationReport report;
    const auto file = fs::path(path).filename().string();
    try {
      if (auto stem = strip_suffix(file, ".edges"); !stem.empty()) {
        const auto graph = parse_edges(ini::read_file(path));
        report = validate_graph(graph, o.topology.empty() ? graph.spec : parse_topology(o.topology));
      } else if (auto base = strip_suffix(path, ".mem.ini"); !base.empty()) {
        const auto name = o.topology.empty() ? strip_suffix(file, ".mem.ini") : o.topology;
        const auto spec = parse_topology(name);
        const auto mem = ini::read_file(path);
        const auto net = ini::read_file(base + ".net.ini");
        try {
          const auto graph = import_config(mem, net, spec);
          report = validate_graph(graph, spec);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::IoFailure) throw;
          report.add("structure", file, e.what());
        }
      } else {
        err << path << ": expected a .edges or .mem.ini file\n";
        code = std::max(code, kFailure);
        continue;
      }
    } catch (const Error& e) {
      err << path << ": " << e.what() << "\n";
      code = std::max(code, e.code() == ErrorCode::IoFailure ? kFailure : kViolations);
      continue;
    }
    if (report.ok) {
      out << path << ": OK\n";
    } else {
      for (const auto& v : report.violations) out << path << ": " << v.code << " " << v.subject << ": " << v.message << "\n";
      if (code == kOk) code = kViolations;
    }
  }
  return code;
}

int cmd_emit(const Options& o, std::ostream& out, std::ostream&) {
  const auto spec = parse_topology(o.inputs.front());
  const auto name = canonical_name(spec);
  const auto graph = generate(spec);
  const auto bundle = emit_bundle(graph, load_profile(o.profile));
  make_dir(o.out);
  write_bundle(o.out, name, graph, bundle, false);
  for (const auto& [klass, lines] : bundle.loc_breakdown) out << klass << "\t" << lines << "\n";
  out << "total\t" << loc_total(bundle) << "\n";
  return kOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const fs::path plan_path(o.plan);
  auto plan = parse_plan(ini::read_file(o.plan), plan_path.parent_path());
  if (!o.out.empty()) plan.outdir = o.out;
  if (o.parallelism > 0) plan.parallelism = o.parallelism;
  if (!o.profile.empty()) plan.profile = o.profile;

  std::vector<TopologySpec> topologies;
  bool rejected = false;
  for (const auto& e : load_topology_list(ini::read_file(plan.topology_list.string()))) {
    if (e.ok()) {
      topologies.push_back(e.spec());
    } else {
      err << plan.topology_list.string() << ":" << e.line << ": " << e.error().what() << "\n";
      rejected = true;
    }
  }
  if (rejected) return kViolations;

  PlanOptions options;
  options.profile = plan.profile ? load_profile(plan.profile->string()) : CacheProfile::defaults();
  if (plan.power_template) {
    options.power = PowerSetup{ini::read_file(plan.power_template->string()),
                               parse_power_mapping(ini::read_file(plan.power_mapping->string()))};
  }
  std::unique_ptr<Backend> backend;
  if (o.backend == "stub") {
    if (o.scenario.empty()) {
      err << "run: --backend stub needs --scenario\n";
      return kFailure;
    }
    backend = std::make_unique<StubBackend>(
        parse_stub_scenario(ini::read_file(o.scenario), fs::path(o.scenario).parent_path()));
    options.check_executables = false;
  } else {
    backend = std::make_unique<ExternalBackend>(plan.commands);
  }

  const auto jobs = plan_jobs(topologies, plan.benchmarks, plan.policy, plan.outdir, options);
  const auto results = run_plan(jobs, *backend, plan.parallelism);
  save_results(results, plan.outdir);
  for (const auto& r : results) {
    out << r.topology << "\t" << r.benchmark << "\t" << to_string(r.status) << "\n";
    for (const auto& w : r.warnings) err << r.topology << "/" << r.benchmark << ": warning: " << w << "\n";
    if (!r.message.empty() && r.status != JobStatus::Completed) {
      err << r.topology << "/" << r.benchmark << ": " << r.message << "\n";
    }
  }
  return run_exit_code(results);
}

int cmd_report(const Options& o, std::ostream& out, std::ostream&) {
  const auto results = load_results(o.inputs.front());
  const auto selectors = parse_selector_list(ini::read_file(o.selectors));
  const auto table = extract_params(results, selectors);
  const auto text = o.format == "txt" ? to_text_table(table) : to_csv(table);
  if (o.out.empty()) out << text;
  else ini::write_file(o.out, text);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multicore cache topology synthesis and simulation batches", "mcsynth"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate configs and edge dumps for a topology list");
  gen->add_option("--list", o.list, "Topology list file")->required();
  gen->add_option("--out", o.out, "Output directory")->required();
  gen->add_option("--profile", o.profile, "Cache profile INI");

  auto* cls = app.add_subcommand("classify", "Print the generation method of topology names");
  cls->add_option("names", o.inputs, "Topology names");
  cls->add_option("--list", o.list, "Topology list file");

  auto* val = app.add_subcommand("validate", "Check .edges dumps or emitted .mem.ini/.net.ini pairs");
  val->add_option("files", o.inputs, "Files to check")->required();
  val->add_option("--topology", o.topology, "Topology name (default: from the file)");

  auto* emit = app.add_subcommand("emit", "Emit the config bundle of one topology");
  emit->add_option("name", o.inputs, "Topology name")->required()->expected(1);
  emit->add_option("--out", o.out, "Output directory")->required();
  emit->add_option("--profile", o.profile, "Cache profile INI");

  auto* run = app.add_subcommand("run", "Execute a simulation plan");
  run->add_option("--plan", o.plan, "Plan file")->required();
  run->add_option("--out", o.out, "Output directory (overrides the plan)");
  run->add_option("--profile", o.profile, "Cache profile INI (overrides the plan)");
  run->add_option("--parallelism", o.parallelism, "Concurrent jobs (overrides the plan)")->check(CLI::PositiveNumber);
  run->add_option("--backend", o.backend, "Simulation backend")->check(CLI::IsMember({"external", "stub"}));
  run->add_option("--scenario", o.scenario, "Stub backend scenario file");

  auto* rep = app.add_subcommand("report", "Extract selected statistics from a results directory");
  rep->add_option("results", o.inputs, "Results directory")->required()->expected(1);
  rep->add_option("--selectors", o.selectors, "Selector list file")->required();
  rep->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "txt"}));
  rep->add_option("--out", o.out, "Output file (default: standard output)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, out, err);
    if (cls->parsed()) return cmd_classify(o, out, err);
    if (val->parsed()) return cmd_validate(o, out, err);
    if (emit->parsed()) return cmd_emit(o, out, err);
    if (run->parsed()) return cmd_run(o, out, err);
    if (rep->parsed()) return cmd_report(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::MalformedName:
      case ErrorCode::RuleViolation:
      case ErrorCode::InvalidSpec:
        return kViolations;
      default:
        return kFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace mcsynth
