#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kacsim/config.hpp"

namespace kac {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate",        "entropy",           "envelope",
                                              "verify-sum-rule", "discretize-angle",  "discretize-sphere",
                                              "verify-inequalities"};
  return names;
}

struct RunOptions {
  std::string subcommand;
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::size_t> k;  // verify-sum-rule word length
  std::optional<std::size_t> n;  // verify-sum-rule word count
  std::optional<std::size_t> K;  // discretization orders
  std::optional<std::size_t> L;
};

// Files of one run, kept in memory until every computation has finished so
// that a failed run leaves nothing behind.
struct RunArtifacts {
  std::map<std::string, std::string> files;
  json summary;
  bool pass = true;
};

// Explicit value, then KACSIM_WORKERS, then the config value.
unsigned resolve_workers(std::optional<unsigned> flag, unsigned config_value);

// Computes the artifacts of a subcommand without touching the filesystem.
// Throws ConfigError for invalid options.
RunArtifacts execute(const std::string& subcommand, const ExperimentConfig& cfg, std::uint64_t seed,
                     unsigned workers, const RunOptions& opts);

// Full run: parse config, execute, write the files and manifest.json into the
// output directory. Diagnostics and the summary go to `out` / `err` as JSON.
int run(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace kac
