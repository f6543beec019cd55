#include "riskplan/subprocess.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <thread>

#include "riskplan/error.hpp"

namespace riskplan {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& prefix) {
  std::string pattern = (fs::temp_directory_path() / (prefix + "XXXXXX")).string();
  if (::mkdtemp(pattern.data()) == nullptr) {
    throw IoError("cannot create temporary directory for " + prefix);
  }
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

CommandResult run_command(const std::string& command, const std::vector<std::string>& args,
                          std::chrono::milliseconds timeout) {
  if (command.empty()) throw AdapterError("no adapter command configured");
  const std::string script = command + " \"$@\"";
  std::vector<const char*> argv = {"sh", "-c", script.c_str(), "sh"};
  for (const auto& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw AdapterError("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    ::execv("/bin/sh", const_cast<char* const*>(argv.data()));
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  while (true) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw AdapterError("waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      return {-1, true};
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFEXITED(status)) return {WEXITSTATUS(status), false};
  return {128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0), false};
}

}  // namespace riskplan
