#include "equivfuse/solve/external.h"

#include "equivfuse/support/error.h"

#include <json.hpp>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <fstream>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace equivfuse::solve {

namespace fs = std::filesystem;
using backends::Format;
using Clock = std::chrono::steady_clock;

EngineRegistry EngineRegistry::builtin() {
  EngineRegistry r;
  r.set({"z3", "z3", {"-smt2", "{file}"}, 60, Format::Smtlib});
  r.set({"bitwuzla", "bitwuzla", {"--lang", "btor2", "--produce-models", "{file}"}, 60, Format::Btor2});
  r.set({"kissat", "kissat", {"{file}"}, 60, Format::Dimacs});
  r.set({"cadical", "cadical", {"{file}"}, 60, Format::Dimacs});
  return r;
}

void EngineRegistry::load(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::SchemaError, std::string("engine registry: ") + e.what());
  }
  if (!j.is_object())
    fail(ErrorKind::SchemaError, "engine registry: top level must be an object");
  for (const auto &[name, e] : j.items()) {
    if (!e.is_object() || !e.contains("path") || !e["path"].is_string())
      fail(ErrorKind::SchemaError, "engine registry: entry '" + name + "' needs a string 'path'");
    SolverConfig cfg;
    cfg.engine = name;
    cfg.path = e["path"].get<std::string>();
    if (e.contains("args")) {
      if (!e["args"].is_array())
        fail(ErrorKind::SchemaError, "engine registry: '" + name + "'.args must be an array");
      for (const auto &a : e["args"]) {
        if (!a.is_string())
          fail(ErrorKind::SchemaError, "engine registry: '" + name + "'.args must hold strings");
        cfg.args.push_back(a.get<std::string>());
      }
    }
    std::string fmt = e.value("format", std::string("smtlib"));
    auto f = backends::parseFormat(fmt);
    if (!f)
      fail(ErrorKind::SchemaError, "engine registry: '" + name + "' has unknown format '" + fmt + "'");
    cfg.format = *f;
    if (e.contains("timeout")) {
      if (!e["timeout"].is_number())
        fail(ErrorKind::SchemaError, "engine registry: '" + name + "'.timeout must be a number");
      cfg.timeoutSeconds = e["timeout"].get<double>();
    }
    engines_[name] = cfg;
  }
}

std::vector<std::string> EngineRegistry::names() const {
  std::vector<std::string> out;
  for (const auto &[n, _] : engines_)
    out.push_back(n);
  return out;
}

namespace {

bool executable(const fs::path &p) { return !p.empty() && ::access(p.c_str(), X_OK) == 0 && !fs::is_directory(p); }

std::string envName(const std::string &engine) {
  std::string s = "EQUIVFUSE_";
  for (char c : engine)
    s += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : '_';
  return s + "_PATH";
}

std::optional<std::string> locate(const std::string &engine, const std::string &path) {
  if (const char *e = std::getenv(envName(engine).c_str()); e && *e)
    return std::string(e);
  if (path.find('/') != std::string::npos)
    return path;
  if (const char *d = std::getenv("EQUIVFUSE_SOLVER_DIR"); d && *d) {
    fs::path p = fs::path(d) / path;
    if (executable(p))
      return p.string();
  }
  if (const char *env = std::getenv("PATH")) {
    std::string all = env;
    std::size_t start = 0;
    while (start <= all.size()) {
      std::size_t end = all.find(':', start);
      std::string dir = all.substr(start, end == std::string::npos ? std::string::npos : end - start);
      fs::path p = fs::path(dir.empty() ? "." : dir) / path;
      if (executable(p))
        return p.string();
      if (end == std::string::npos)
        break;
      start = end + 1;
    }
  }
  return std::nullopt;
}

} // namespace

SolverConfig EngineRegistry::resolve(const std::string &name) const {
  auto it = engines_.find(name);
  if (it == engines_.end())
    fail(ErrorKind::Usage, "unknown solver '" + name + "'");
  SolverConfig cfg = it->second;
  if (auto p = locate(name, cfg.path))
    cfg.path = *p;
  return cfg;
}

bool EngineRegistry::available(const std::string &name) const {
  if (!contains(name))
    return false;
  return executable(resolve(name).path);
}

namespace {

struct Job {
  const ProblemFile *problem = nullptr;
  const SolverConfig *cfg = nullptr;
  pid_t pid = -1;
  int out = -1, err = -1;
  std::string stdoutText, stderrText;
  Clock::time_point deadline;
  bool timedOut = false;
  bool done = false;
  int status = 0;
};

void setCloexec(int fd) { ::fcntl(fd, F_SETFD, FD_CLOEXEC); }

void spawn(Job &job) {
  const SolverConfig &cfg = *job.cfg;
  if (!executable(cfg.path))
    fail(ErrorKind::SpawnFailure, "cannot execute solver '" + cfg.engine + "' at '" + cfg.path + "'");
  std::vector<std::string> argv{cfg.path};
  bool placed = false;
  for (const auto &a : cfg.args) {
    std::string s = a;
    if (auto pos = s.find("{file}"); pos != std::string::npos) {
      s.replace(pos, 6, job.problem->path);
      placed = true;
    }
    argv.push_back(s);
  }
  if (!placed)
    argv.push_back(job.problem->path);
  std::vector<char *> cargv;
  for (auto &s : argv)
    cargv.push_back(s.data());
  cargv.push_back(nullptr);

  int outPipe[2], errPipe[2], execPipe[2];
  if (::pipe(outPipe) || ::pipe(errPipe) || ::pipe(execPipe))
    fail(ErrorKind::SpawnFailure, std::string("pipe: ") + std::strerror(errno));
  for (int fd : {outPipe[0], errPipe[0], execPipe[0], execPipe[1]})
    setCloexec(fd);
  pid_t pid = ::fork();
  if (pid < 0)
    fail(ErrorKind::SpawnFailure, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(outPipe[1], STDOUT_FILENO);
    ::dup2(errPipe[1], STDERR_FILENO);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0)
      ::dup2(devnull, STDIN_FILENO);
    ::execv(cargv[0], cargv.data());
    int e = errno;
    [[maybe_unused]] auto n = ::write(execPipe[1], &e, sizeof e);
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(outPipe[1]);
  ::close(errPipe[1]);
  ::close(execPipe[1]);
  int childErr = 0;
  ssize_t n = ::read(execPipe[0], &childErr, sizeof childErr);
  ::close(execPipe[0]);
  if (n == sizeof childErr) {
    ::close(outPipe[0]);
    ::close(errPipe[0]);
    ::waitpid(pid, nullptr, 0);
    fail(ErrorKind::SpawnFailure,
         "cannot execute solver '" + cfg.engine + "' at '" + cfg.path + "': " + std::strerror(childErr));
  }
  job.pid = pid;
  job.out = outPipe[0];
  job.err = errPipe[0];
  job.deadline = Clock::now() + std::chrono::milliseconds(static_cast<int64_t>(cfg.timeoutSeconds * 1000));
}

/// SIGTERM to the process group, SIGKILL after the grace period.
void terminate(Job &job) {
  if (job.pid <= 0 || job.done)
    return;
  ::kill(-job.pid, SIGTERM);
  auto grace = Clock::now() + std::chrono::seconds(2);
  while (Clock::now() < grace) {
    if (::waitpid(job.pid, &job.status, WNOHANG) == job.pid) {
      job.done = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (!job.done) {
    ::kill(-job.pid, SIGKILL);
    ::waitpid(job.pid, &job.status, 0);
    job.done = true;
  }
  ::kill(-job.pid, SIGKILL);  // stray grandchildren
  for (int *fd : {&job.out, &job.err})
    if (*fd >= 0) {
      ::close(*fd);
      *fd = -1;
    }
}

void writeLogs(const Job &job) {
  const char *dir = std::getenv("EQUIVFUSE_LOG_DIR");
  if (!dir || !*dir)
    return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::string base = job.cfg->engine + "-" + std::to_string(job.pid);
  std::ofstream(fs::path(dir) / (base + ".stdout"), std::ios::binary) << job.stdoutText;
  std::ofstream(fs::path(dir) / (base + ".stderr"), std::ios::binary) << job.stderrText;
}

Verdict interpret(const Job &job) {
  const SolverConfig &cfg = *job.cfg;
  if (job.timedOut) {
    std::ostringstream os;
    os << "no answer within " << cfg.timeoutSeconds << " s";
    return Verdict::unknown(UnknownReason::Timeout, os.str(), cfg.engine);
  }
  backends::ModelResult m = backends::parseModel(cfg.format, job.stdoutText, job.problem->symbols);
  switch (m.status) {
  case backends::ModelStatus::Unsat:
    return Verdict::equivalent(cfg.engine);
  case backends::ModelStatus::Unknown: {
    bool silent = job.stdoutText.find_first_not_of(" \t\r\n") == std::string::npos;
    bool err = m.reason.rfind("solver-error", 0) == 0 || silent;
    std::string detail = m.reason;
    if (!job.stderrText.empty())
      detail += " (stderr: " + job.stderrText.substr(0, 200) + ")";
    return Verdict::unknown(err ? UnknownReason::SolverError : UnknownReason::ParseFailure, detail, cfg.engine);
  }
  case backends::ModelStatus::Sat:
    break;
  }
  Verdict v;
  v.kind = Verdict::Kind::NotEquivalent;
  v.cex = std::move(m.cex);
  v.engine = cfg.engine;
  const auto &symbols = job.problem->symbols;
  if (symbols.replay)
    return checkWithReplay(std::move(v), *symbols.replay);
  if (job.problem->raw && !satisfiesRaw(*job.problem->raw, symbols, *v.cex))
    return Verdict::unknown(UnknownReason::ParseFailure, "model does not satisfy the problem", cfg.engine);
  return v;
}

/// Runs the jobs until one gives a definitive verdict or all finish.
/// Returns the per-job verdicts; unfinished jobs stay Unknown.
std::vector<Verdict> runAll(std::vector<Job> &jobs, bool firstWins, std::size_t &winner) {
  winner = jobs.size();
  std::vector<Verdict> verdicts(jobs.size());
  std::vector<bool> decided(jobs.size(), false);
  try {
    for (auto &j : jobs)
      spawn(j);
  } catch (...) {
    for (auto &j : jobs)
      terminate(j);
    throw;
  }
  std::size_t open = jobs.size();
  while (open > 0) {
    std::vector<pollfd> fds;
    std::vector<std::pair<std::size_t, bool>> owner;
    auto now = Clock::now();
    int waitMs = 1000;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      Job &j = jobs[i];
      if (j.done)
        continue;
      if (now >= j.deadline) {
        j.timedOut = true;
        terminate(j);
        continue;
      }
      waitMs = std::min<int>(waitMs, static_cast<int>(
                                         std::chrono::duration_cast<std::chrono::milliseconds>(j.deadline - now).count()) +
                                         1);
      if (j.out >= 0) {
        fds.push_back({j.out, POLLIN, 0});
        owner.push_back({i, true});
      }
      if (j.err >= 0) {
        fds.push_back({j.err, POLLIN, 0});
        owner.push_back({i, false});
      }
    }
    if (!fds.empty())
      ::poll(fds.data(), fds.size(), waitMs);
    else
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    for (std::size_t k = 0; k < fds.size(); ++k) {
      if (!(fds[k].revents & (POLLIN | POLLHUP | POLLERR)))
        continue;
      Job &j = jobs[owner[k].first];
      int &fd = owner[k].second ? j.out : j.err;
      char buf[65536];
      ssize_t n = ::read(fd, buf, sizeof buf);
      if (n > 0) {
        (owner[k].second ? j.stdoutText : j.stderrText).append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        ::close(fd);
        fd = -1;
      }
    }
    // Jobs whose pipes are both closed have exited (or closed them).
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      Job &j = jobs[i];
      if (!j.done && j.out < 0 && j.err < 0 && ::waitpid(j.pid, &j.status, WNOHANG) == j.pid)
        j.done = true;
    }
    open = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      Job &j = jobs[i];
      if (j.done && !decided[i]) {
        decided[i] = true;
        writeLogs(j);
        verdicts[i] = interpret(j);
        if (firstWins && verdicts[i].definitive()) {
          winner = i;
          for (auto &other : jobs)
            terminate(other);
          break;
        }
      }
      if (!j.done)
        ++open;
    }
    if (winner < jobs.size())
      break;
  }
  for (std::size_t i = 0; i < jobs.size(); ++i)
    if (!decided[i])
      verdicts[i] = Verdict::unknown(UnknownReason::Timeout, "cancelled", jobs[i].cfg->engine);
  return verdicts;
}

} // namespace

Verdict runExternal(const ProblemFile &problem, const SolverConfig &cfg) {
  std::vector<Job> jobs(1);
  jobs[0].problem = &problem;
  jobs[0].cfg = &cfg;
  std::size_t winner;
  return runAll(jobs, false, winner)[0];
}

Verdict portfolio(const std::vector<std::pair<ProblemFile, SolverConfig>> &entries) {
  if (entries.empty())
    fail(ErrorKind::Usage, "portfolio needs at least one engine");
  std::vector<Job> jobs(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    jobs[i].problem = &entries[i].first;
    jobs[i].cfg = &entries[i].second;
  }
  std::size_t winner;
  auto verdicts = runAll(jobs, true, winner);
  if (winner < verdicts.size())
    return verdicts[winner];
  Verdict out = Verdict::unknown(verdicts[0].reason, {}, "portfolio");
  for (const auto &v : verdicts) {
    if (v.reason != out.reason)
      out.reason = UnknownReason::SolverError;
    if (!out.detail.empty())
      out.detail += "; ";
    out.detail += v.engine + ": " + std::string(reasonName(v.reason)) + (v.detail.empty() ? "" : " (" + v.detail + ")");
  }
  bool allTimeout = std::all_of(verdicts.begin(), verdicts.end(),
                                [](const Verdict &v) { return v.reason == UnknownReason::Timeout; });
  if (allTimeout)
    out.reason = UnknownReason::Timeout;
  return out;
}

} // namespace equivfuse::solve
