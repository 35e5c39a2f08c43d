#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kacsim/angle.hpp"
#include "kacsim/errors.hpp"
#include "kacsim/kmc.hpp"
#include "kacsim/params.hpp"

namespace kac {

// Objects are key-sorted, so dump() is canonical.
using json = nlohmann::json;

struct EntropyOptions {
  std::string estimator = "knn";  // or "histogram"
  std::size_t k = 4;
  std::size_t bootstrap = 50;
  std::size_t bins = 256;
  std::optional<double> bias_margin;  // default 0.02 per system coordinate
};

struct SumRuleOptions {
  std::size_t k = 3;
  std::size_t n_words = 100000;
};

struct DiscretizeOptions {
  std::size_t K = 3;
  std::size_t L = 4;
};

struct ExperimentConfig {
  GeneratorParams params{2, 8, 1.0, 1.0, 1.0, 1};
  AngleDistribution angle = AngleDistribution::uniform();
  json angle_spec = {{"type", "uniform"}};
  InitialCondition initial = InitialCondition::gaussian_product(std::numbers::inv_pi);
  EnsembleConfig ensemble{1000, {0.0, 0.5, 1.0, 2.0, 4.0}, 0, {}, 1};
  bool record_snapshots = false;
  std::string output_dir = "out";
  EntropyOptions entropy;
  SumRuleOptions sum_rule;
  DiscretizeOptions discretize;
  std::vector<double> envelope_t_grid;  // falls back to the ensemble grid

  std::string canonical;  // canonical dump of the source document
  std::uint64_t hash = 0;
};

// Schema violations and semantic errors.
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : InvalidInput(path.empty() ? message : path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Unknown keys are rejected at every level; every section is optional.
ExperimentConfig parse_config(const json& doc);
ExperimentConfig load_config(const std::string& path);

AngleDistribution parse_angle(const json& spec, const std::string& path = "angle");

}  // namespace kac
