#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace riskplan {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
};

/// Runs `command` through /bin/sh with `args` appended as positional
/// arguments. The whole process group is killed when `timeout` elapses.
CommandResult run_command(const std::string& command, const std::vector<std::string>& args,
                          std::chrono::milliseconds timeout);

}  // namespace riskplan
