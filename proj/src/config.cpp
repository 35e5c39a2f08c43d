#include "kacsim/config.hpp"

#include <fstream>
#include <cmath>
#include <initializer_list>
#include <set>

#include "kacsim/io.hpp"

namespace kac {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.contains(key)) throw ConfigError(join(path, key), "unknown key");
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, const std::string& path, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(join(path, key), "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<double> get_numbers(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(join(path, key), "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void parse_model(const json& m, GeneratorParams& p) {
  const std::string path = "model";
  only_keys(m, path, {"M", "N", "lambda_S", "lambda_R", "mu", "dimension"});
  p.M = get_count(m, path, "M", p.M);
  p.N = get_count(m, path, "N", p.N);
  p.lambda_S = get_number(m, path, "lambda_S", p.lambda_S);
  p.lambda_R = get_number(m, path, "lambda_R", p.lambda_R);
  p.mu = get_number(m, path, "mu", p.mu);
  p.dimension = static_cast<int>(get_count(m, path, "dimension", static_cast<std::size_t>(p.dimension)));
  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }
}

InitialCondition parse_initial(const json& s, const GeneratorParams& params) {
  const std::string path = "initial";
  if (!s.is_object() || !s.contains("type") || !s.at("type").is_string())
    throw ConfigError(path, "expected an object with a string 'type'");
  const std::string type = s.at("type").get<std::string>();
  InitialCondition ic;
  if (type == "thermal") {
    only_keys(s, path, {"type"});
    ic = InitialCondition::thermal();
  } else if (type == "gaussian") {
    only_keys(s, path, {"type", "variance"});
    ic = InitialCondition::gaussian_product(get_number(s, path, "variance", kThermalVariance));
  } else if (type == "two_temperature") {
    only_keys(s, path, {"type", "hot", "cold", "n_hot"});
    ic = InitialCondition::two_temperature(get_number(s, path, "hot", kThermalVariance),
                                           get_number(s, path, "cold", kThermalVariance),
                                           get_count(s, path, "n_hot", 0));
  } else if (type == "shifted_gaussian") {
    only_keys(s, path, {"type", "variance", "mean"});
    if (!s.contains("mean")) throw ConfigError(join(path, "mean"), "required");
    ic = InitialCondition::shifted_gaussian(get_number(s, path, "variance", kThermalVariance),
                                            get_numbers(s, path, "mean"));
  } else {
    throw ConfigError(join(path, "type"), "unknown initial condition '" + type + "'");
  }
  try {
    ic.validate(params);
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }
  return ic;
}

void parse_ensemble(const json& s, ExperimentConfig& cfg) {
  const std::string path = "ensemble";
  only_keys(s, path, {"n_traj", "t_grid", "seed", "workers", "record_snapshots"});
  auto& e = cfg.ensemble;
  e.n_traj = get_count(s, path, "n_traj", e.n_traj);
  if (s.contains("t_grid")) e.t_grid = get_numbers(s, path, "t_grid");
  if (s.contains("seed")) {
    if (!s.at("seed").is_number_unsigned()) throw ConfigError(join(path, "seed"), "expected an unsigned integer");
    e.seed = s.at("seed").get<std::uint64_t>();
  }
  e.workers = static_cast<unsigned>(get_count(s, path, "workers", e.workers));
  if (s.contains("record_snapshots")) {
    if (!s.at("record_snapshots").is_boolean()) throw ConfigError(join(path, "record_snapshots"), "expected a boolean");
    cfg.record_snapshots = s.at("record_snapshots").get<bool>();
  }
  try {
    e.validate();
  } catch (const InvalidInput& ex) {
    throw ConfigError(path, ex.what());
  }
}

void parse_entropy(const json& s, EntropyOptions& o) {
  const std::string path = "entropy";
  only_keys(s, path, {"estimator", "k", "bootstrap", "bins", "bias_margin"});
  if (s.contains("estimator")) {
    if (!s.at("estimator").is_string()) throw ConfigError(join(path, "estimator"), "expected a string");
    o.estimator = s.at("estimator").get<std::string>();
    if (o.estimator != "knn" && o.estimator != "histogram")
      throw ConfigError(join(path, "estimator"), "must be 'knn' or 'histogram'");
  }
  o.k = get_count(s, path, "k", o.k);
  o.bootstrap = get_count(s, path, "bootstrap", o.bootstrap);
  o.bins = get_count(s, path, "bins", o.bins);
  if (o.k < 1) throw ConfigError(join(path, "k"), "must be at least 1");
  if (o.bins < 2) throw ConfigError(join(path, "bins"), "must be at least 2");
  if (s.contains("bias_margin")) {
    const double b = get_number(s, path, "bias_margin", 0.0);
    if (!(b >= 0.0)) throw ConfigError(join(path, "bias_margin"), "must be nonnegative");
    o.bias_margin = b;
  }
}

}  // namespace

AngleDistribution parse_angle(const json& spec, const std::string& path) {
  if (!spec.is_object() || !spec.contains("type") || !spec.at("type").is_string())
    throw ConfigError(path, "expected an object with a string 'type'");
  const std::string type = spec.at("type").get<std::string>();
  try {
    if (type == "uniform") {
      only_keys(spec, path, {"type"});
      return AngleDistribution::uniform();
    }
    if (type == "half_pi_atoms") {
      only_keys(spec, path, {"type"});
      return AngleDistribution::half_pi_atoms();
    }
    if (type == "atoms") {
      only_keys(spec, path, {"type", "atoms"});
      if (!spec.contains("atoms") || !spec.at("atoms").is_array()) throw ConfigError(join(path, "atoms"), "expected an array");
      std::vector<std::pair<double, double>> atoms;
      for (const auto& a : spec.at("atoms")) {
        if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
          throw ConfigError(join(path, "atoms"), "each atom must be [theta, probability]");
        atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
      }
      return AngleDistribution::atoms(std::move(atoms));
    }
    if (type == "density_table") {
      only_keys(spec, path, {"type", "thetas", "values"});
      if (!spec.contains("thetas") || !spec.contains("values")) throw ConfigError(path, "needs 'thetas' and 'values'");
      return AngleDistribution(AngleDistribution::DensityTable{get_numbers(spec, path, "thetas"),
                                                               get_numbers(spec, path, "values")});
    }
    if (type == "trigonometric") {
      only_keys(spec, path, {"type", "cos", "sin"});
      AngleDistribution::Trigonometric t;
      if (spec.contains("cos")) t.cos_coef = get_numbers(spec, path, "cos");
      if (spec.contains("sin")) t.sin_coef = get_numbers(spec, path, "sin");
      return AngleDistribution(std::move(t));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join(path, "type"), "unknown angle law '" + type + "'");
}

ExperimentConfig parse_config(const json& doc) {
  only_keys(doc, "", {"model", "angle", "initial", "ensemble", "output", "entropy", "sum_rule", "discretize", "envelope"});
  ExperimentConfig cfg;
  if (doc.contains("model")) parse_model(doc.at("model"), cfg.params);
  if (doc.contains("angle")) {
    cfg.angle = parse_angle(doc.at("angle"));
    cfg.angle_spec = doc.at("angle");
  }
  if (doc.contains("initial")) {
    cfg.initial = parse_initial(doc.at("initial"), cfg.params);
  } else {
    try {
      cfg.initial.validate(cfg.params);
    } catch (const InvalidInput& e) {
      throw ConfigError("initial", e.what());
    }
  }
  if (doc.contains("ensemble")) parse_ensemble(doc.at("ensemble"), cfg);
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw ConfigError("output", "expected a string");
    cfg.output_dir = doc.at("output").get<std::string>();
  }
  if (doc.contains("entropy")) parse_entropy(doc.at("entropy"), cfg.entropy);
  if (doc.contains("sum_rule")) {
    const json& s = doc.at("sum_rule");
    only_keys(s, "sum_rule", {"k", "n_words"});
    cfg.sum_rule.k = get_count(s, "sum_rule", "k", cfg.sum_rule.k);
    cfg.sum_rule.n_words = get_count(s, "sum_rule", "n_words", cfg.sum_rule.n_words);
    if (cfg.sum_rule.n_words < 1) throw ConfigError("sum_rule.n_words", "must be at least 1");
  }
  if (doc.contains("discretize")) {
    const json& s = doc.at("discretize");
    only_keys(s, "discretize", {"K", "L"});
    cfg.discretize.K = get_count(s, "discretize", "K", cfg.discretize.K);
    cfg.discretize.L = get_count(s, "discretize", "L", cfg.discretize.L);
  }
  if (doc.contains("envelope")) {
    const json& s = doc.at("envelope");
    only_keys(s, "envelope", {"t_grid"});
    if (s.contains("t_grid")) cfg.envelope_t_grid = get_numbers(s, "envelope", "t_grid");
    for (double t : cfg.envelope_t_grid)
      if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("envelope.t_grid", "times must be finite and nonnegative");
  }
  cfg.canonical = doc.dump();
  cfg.hash = fnv1a64(cfg.canonical);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace kac
