#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kglr {

// Parsed command line; run_command does the work so tests can drive the
// frontend without spawning a process.
struct CliCommand {
  std::string verb;  // solve | convergence | efficiency | energy-drift |
                     // reversibility | selftest
  std::filesystem::path config_path;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> overrides;  // key=value, applied after the file
  int jobs = 1;
  std::optional<std::uint64_t> seed;   // overrides the config seed
  std::filesystem::path cache_dir;     // empty: <output_dir>/cache
  bool print_config = false;           // print the effective config and exit
};

/// Dispatches the verb, writes one CSV per experiment kind plus the
/// effective config into output_dir. Returns the process exit code; any
/// aborted or non-finite run yields a nonzero code with a one-line
/// diagnostic on stderr.
int run_command(const CliCommand& cmd);

}  // namespace kglr
