#pragma once

// Process and filesystem helpers shared by the CLI tests and the acceptance
// suite.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace support {

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("mixie-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI binary with the given argument string, capturing both streams.
inline CliResult run_cli(const std::string& args, const std::string& stdin_path = {}) {
  const auto dir = make_temp_dir("cli");
  const auto out_path = dir / "out";
  const auto err_path = dir / "err";
  std::string command = std::string(MIXIE_CLI_PATH) + " " + args;
  if (!stdin_path.empty()) command += " < " + stdin_path;
  command += " > " + out_path.string() + " 2> " + err_path.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  std::filesystem::remove_all(dir);
  return result;
}

}  // namespace support
