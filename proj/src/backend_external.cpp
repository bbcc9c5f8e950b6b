#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "mcsynth/error.hpp"
#include "mcsynth/ini.hpp"
#include "mcsynth/orchestrator.hpp"

namespace mcsynth {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

pid_t spawn(const std::string& command, const fs::path& workdir, const fs::path& log) {
  const int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::BackendError, "cannot open " + log.string() + ": " + std::strerror(errno));
  const std::string dir = workdir.string();
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fd);
    throw Error(ErrorCode::BackendError, std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    if (::chdir(dir.c_str()) != 0) ::_exit(126);
    ::dup2(fd, STDOUT_FILENO);
    ::dup2(fd, STDERR_FILENO);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(fd);
  return pid;
}

int reap(pid_t pid, bool block, bool& done) {
  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid, &status, block ? 0 : WNOHANG);
    if (r == pid) {
      done = true;
      return status;
    }
    if (r == 0) return 0;
    if (errno != EINTR) throw Error(ErrorCode::BackendError, std::string("waitpid failed: ") + std::strerror(errno));
  }
}

std::string describe(int status) {
  if (WIFEXITED(status)) return "exit status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "signal " + std::to_string(WTERMSIG(status));
  return "unknown status";
}

void terminate_group(pid_t pid) {
  ::kill(-pid, SIGTERM);
  bool done = false;
  for (int i = 0; i < 50 && !done; ++i) {
    reap(pid, false, done);
    if (!done) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (!done) {
    ::kill(-pid, SIGKILL);
    reap(pid, true, done);
  }
}

std::map<std::string, std::string> placeholders(const SimJob& job) {
  std::string args;
  for (const auto& a : job.benchmark.args) {
    if (!args.empty()) args += ' ';
    args += shell_quote(a);
  }
  return {
      {"mem_config", shell_quote(fs::absolute(job.mem_config).string())},
      {"net_config", shell_quote(fs::absolute(job.net_config).string())},
      {"benchmark", shell_quote(fs::absolute(job.benchmark.executable).string())},
      {"args", args},
      {"workdir", shell_quote(fs::absolute(job.workdir).string())},
      {"report_out", shell_quote(fs::absolute(job.workdir / "arch_report.ini").string())},
      {"interim_out", shell_quote(fs::absolute(job.workdir / "interim_report.ini").string())},
      {"power_input", shell_quote(fs::absolute(job.workdir / "power_input.xml").string())},
      {"power_out", shell_quote(fs::absolute(job.workdir / "power_report.ini").string())},
  };
}

std::optional<double> read_interim(const fs::path& path, const std::string& key) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    const auto report = parse_stats_report(ini::read_file(path.string()));
    if (const auto* v = Selector{key, {}}.resolve(report)) return v->as_number();
  } catch (const Error&) {
    // A half-written interim file reads as "not yet available".
  }
  return std::nullopt;
}

struct ExternalRun : RunHandle {
  std::string job;
  pid_t pid = -1;
  bool done = false;
  int status = 0;
  fs::path report_out;
  fs::path interim_out;
  std::chrono::steady_clock::time_point start;

  ~ExternalRun() override {
    if (!done && pid > 0) {
      try {
        terminate_group(pid);
      } catch (...) {
      }
    }
  }

  bool poll() {
    if (!done) status = reap(pid, false, done);
    return done;
  }
};

ExternalRun& as_external(RunHandle& h) {
  auto* run = dynamic_cast<ExternalRun*>(&h);
  if (!run) throw Error(ErrorCode::BackendError, "handle does not belong to the external backend");
  return *run;
}

}  // namespace

std::string expand_command(const std::string& templ, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < templ.size()) {
    if (templ[i] == '{') {
      const auto close = templ.find('}', i);
      if (close != std::string::npos) {
        auto it = values.find(templ.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += templ[i++];
  }
  return out;
}

FunctionalOutcome ExternalBackend::run_functional(const SimJob& job) {
  if (cmds_.functional.empty()) return {true, "no functional command configured\n"};
  const auto log = job.workdir / "functional.out";
  bool done = false;
  const int status = reap(spawn(expand_command(cmds_.functional, placeholders(job)), job.workdir, log), true, done);
  if (WIFEXITED(status) && (WEXITSTATUS(status) == 126 || WEXITSTATUS(status) == 127)) {
    throw Error(ErrorCode::BackendError, job.id() + ": functional command could not be executed");
  }
  FunctionalOutcome out;
  out.passed = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  try {
    out.log = ini::read_file(log.string());
  } catch (const Error&) {
  }
  if (!out.passed) out.log += "functional command ended with " + describe(status) + "\n";
  return out;
}

std::unique_ptr<RunHandle> ExternalBackend::start_detailed(const SimJob& job) {
  if (cmds_.detailed.empty()) throw Error(ErrorCode::BackendError, "no detailed command configured");
  auto run = std::make_unique<ExternalRun>();
  run->job = job.id();
  run->report_out = job.workdir / "arch_report.ini";
  run->interim_out = job.workdir / "interim_report.ini";
  std::error_code ec;
  fs::remove(run->report_out, ec);
  fs::remove(run->interim_out, ec);
  run->start = std::chrono::steady_clock::now();
  run->pid = spawn(expand_command(cmds_.detailed, placeholders(job)), job.workdir, job.workdir / "detailed.out");
  return run;
}

bool ExternalBackend::wait_for_probe(RunHandle& handle, double budget, ProbeClock clock) {
  auto& run = as_external(handle);
  const auto interval = std::chrono::duration<double>(std::max(cmds_.poll_interval, 0.001));
  for (;;) {
    if (run.poll()) return false;
    if (clock == ProbeClock::Wall) {
      if (std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count() >= budget) return true;
    } else if (auto t = read_interim(run.interim_out, cmds_.sim_time_key); t && *t >= budget) {
      return true;
    }
    std::this_thread::sleep_for(interval);
  }
}

std::optional<fs::path> ExternalBackend::interim_report(RunHandle& handle) {
  auto& run = as_external(handle);
  std::error_code ec;
  if (fs::exists(run.interim_out, ec)) return run.interim_out;
  return std::nullopt;
}

std::optional<double> ExternalBackend::sample_metric(RunHandle& handle, const std::string& key) {
  return read_interim(as_external(handle).interim_out, key);
}

fs::path ExternalBackend::wait(RunHandle& handle) {
  auto& run = as_external(handle);
  if (!run.done) run.status = reap(run.pid, true, run.done);
  if (!WIFEXITED(run.status) || WEXITSTATUS(run.status) != 0) {
    throw Error(ErrorCode::BackendError, run.job + ": detailed simulation ended with " + describe(run.status));
  }
  std::error_code ec;
  if (!fs::exists(run.report_out, ec)) {
    throw Error(ErrorCode::BackendError, run.job + ": detailed simulation wrote no report");
  }
  return run.report_out;
}

void ExternalBackend::abort(RunHandle& handle) {
  auto& run = as_external(handle);
  if (run.done) return;
  terminate_group(run.pid);
  run.done = true;
}

std::optional<fs::path> ExternalBackend::run_power_stage(const SimJob& job, const MetricReport&,
                                                         const std::optional<fs::path>&) {
  if (cmds_.power.empty()) return std::nullopt;
  const auto out = job.workdir / "power_report.ini";
  std::error_code ec;
  fs::remove(out, ec);
  bool done = false;
  const int status = reap(spawn(expand_command(cmds_.power, placeholders(job)), job.workdir, job.workdir / "power.out"), true, done);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::BackendError, job.id() + ": power stage ended with " + describe(status));
  }
  if (!fs::exists(out, ec)) throw Error(ErrorCode::BackendError, job.id() + ": power stage wrote no report");
  return out;
}

}  // namespace mcsynth
