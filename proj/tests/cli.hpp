#pragma once

// Runs the command-line tool and captures its standard output.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

namespace bnmon::testing {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

inline CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + BNMON_CLI_PATH + "\" " + args + " 2>/dev/null";
  CliResult res;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return res;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

inline std::string data_file(const std::string& name) { return std::string(BNMON_DATA_DIR) + "/" + name; }

// Fresh per-process scratch directory.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("bnmon_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace bnmon::testing
