#include "kacsim/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kacsim/discretization.hpp"
#include "kacsim/entropy.hpp"
#include "kacsim/inequalities.hpp"
#include "kacsim/io.hpp"
#include "kacsim/kmc.hpp"
#include "kacsim/moments.hpp"
#include "kacsim/rotation_words.hpp"

namespace kac {

namespace {

std::vector<std::string> header(const std::string& sub, const ExperimentConfig& cfg, std::uint64_t seed) {
  return {std::string("kacsim ") + kVersion + " " + sub, "config_hash=" + hex64(cfg.hash),
          "seed=" + std::to_string(seed)};
}

void put_header(std::ostream& os, const std::vector<std::string>& lines) {
  for (const auto& l : lines) os << "# " << l << '\n';
}

MomentPair initial_moments(const ExperimentConfig& cfg) {
  return {cfg.initial.mean_system_second_moment(cfg.params), kThermalVariance};
}

EnsembleResult run_ensemble(const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers, bool keep_velocities) {
  EnsembleConfig e = cfg.ensemble;
  e.seed = seed;
  e.workers = workers;
  e.record.system_velocities = keep_velocities;
  EnsembleResult res = simulate_ensemble(cfg.params, cfg.angle, cfg.initial, e);
  if (res.partial) throw NumericalError("ensemble ran out of memory after " + std::to_string(res.completed) + " trajectories");
  return res;
}

RunArtifacts do_simulate(const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers) {
  RunArtifacts art;
  const EnsembleResult res = run_ensemble(cfg, seed, workers, cfg.record_snapshots);
  std::ostringstream csv;
  const auto comments = header("simulate", cfg, seed);
  write_moments_csv(csv, res.moments, comments);
  art.files["moments.csv"] = csv.str();
  if (cfg.record_snapshots) {
    std::ostringstream bin(std::ios::binary);
    write_snapshots_binary(bin, cfg.params, res, cfg.ensemble.t_grid.size());
    art.files["snapshots.bin"] = bin.str();
  }

  const MomentPair m0 = initial_moments(cfg);
  json rows = json::array();
  bool moments_ok = true;
  for (const auto& r : res.moments) {
    const double pred = propagate_moments(m0, r.t, cfg.params, cfg.angle).m1;
    const double z = std::abs(r.mean_v2_system - pred) / std::max(r.se, 1e-12);
    const bool ok = z <= 4.0;
    moments_ok = moments_ok && ok;
    rows.push_back({{"t", r.t}, {"mean_v2_system", r.mean_v2_system}, {"se", r.se}, {"predicted", pred},
                    {"z", z}, {"pass", ok}});
  }
  const bool energy_ok = res.max_relative_energy_drift <= 1e-9;
  art.pass = moments_ok && energy_ok;
  art.summary = {{"n_traj", res.completed},
                 {"moments", rows},
                 {"max_relative_energy_drift", res.max_relative_energy_drift},
                 {"mean_event_counts", res.mean_event_counts},
                 {"energy_pass", energy_ok},
                 {"moments_pass", moments_ok},
                 {"pass", art.pass}};
  art.files["simulate_report.json"] = art.summary.dump(2) + "\n";
  return art;
}

RunArtifacts do_entropy(const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers) {
  const std::size_t ds = cfg.params.system_coords();
  if (cfg.entropy.estimator == "histogram" && ds != 1)
    throw ConfigError("entropy.estimator", "histogram estimator needs a single system coordinate");
  RunArtifacts art;
  const EnsembleResult res = run_ensemble(cfg, seed, workers, true);
  const double s0 = gaussian_initial_entropy(cfg.initial, cfg.params);
  std::vector<EntropyEstimate> estimates;
  for (std::size_t ti = 0; ti < cfg.ensemble.t_grid.size(); ++ti) {
    SampleCloud cloud{snapshot_cloud(res, ti, ds), ds, cfg.ensemble.t_grid[ti], seed, res.completed};
    if (cfg.entropy.estimator == "knn") {
      KnnOptions o{cfg.entropy.k, cfg.entropy.bootstrap, stream_key(seed, 0xB0075000 + ti)};
      estimates.push_back(relative_entropy_to_thermal(cloud, o));
    } else {
      estimates.push_back(relative_entropy_histogram(cloud, cfg.entropy.bins));
    }
  }
  const double bias = cfg.entropy.bias_margin.value_or(default_bias_margin(cfg.params));
  const DecayReport rep = decay_check(cfg.ensemble.t_grid, estimates, s0, cfg.params, cfg.angle, bias);

  std::ostringstream csv;
  put_header(csv, header("entropy", cfg, seed));
  csv << "t,S_hat,SE,envelope_times_S0,pass_flag\n";
  json rows = json::array();
  for (const auto& r : rep.rows) {
    csv << format_double(r.t) << ',' << format_double(r.s_hat) << ',' << format_double(r.se) << ','
        << format_double(r.envelope_times_s0) << ',' << (r.pass ? 1 : 0) << '\n';
    rows.push_back({{"t", r.t}, {"S_hat", r.s_hat}, {"SE", r.se}, {"envelope_times_S0", r.envelope_times_s0},
                    {"margin", r.margin}, {"pass", r.pass}});
  }
  std::vector<std::string> warnings = rep.warnings;
  for (const auto& e : estimates) warnings.insert(warnings.end(), e.warnings.begin(), e.warnings.end());
  art.files["entropy.csv"] = csv.str();
  art.pass = rep.all_pass;
  art.summary = {{"S0", s0},
                 {"estimator", cfg.entropy.estimator},
                 {"k", cfg.entropy.k},
                 {"bias_margin", bias},
                 {"tolerances",
                  {{"se_multiplier", 3.0},
                   {"bias_margin", bias},
                   {"bias_margin_source", cfg.entropy.bias_margin ? "config" : "0.02 nats per system coordinate"},
                   {"bootstrap_resamples", cfg.entropy.bootstrap}}},
                 {"n_traj", res.completed},
                 {"rows", rows},
                 {"warnings", warnings},
                 {"pass", rep.all_pass}};
  art.files["entropy_report.json"] = art.summary.dump(2) + "\n";
  return art;
}

RunArtifacts do_envelope(const ExperimentConfig& cfg, std::uint64_t seed) {
  RunArtifacts art;
  const auto& grid = cfg.envelope_t_grid.empty() ? cfg.ensemble.t_grid : cfg.envelope_t_grid;
  const MomentPair m0 = initial_moments(cfg);
  std::ostringstream csv;
  put_header(csv, header("envelope", cfg, seed));
  csv << "t,envelope,envelope_poisson_sum,m1_pred,m2_pred\n";
  double max_diff = 0.0;
  for (double t : grid) {
    const double d = envelope(t, cfg.params, cfg.angle);
    const PoissonSum ps = envelope_poisson_sum(t, cfg.params, cfg.angle);
    const MomentPair m = propagate_moments(m0, t, cfg.params, cfg.angle);
    max_diff = std::max(max_diff, std::abs(d - ps.value));
    csv << format_double(t) << ',' << format_double(d) << ',' << format_double(ps.value) << ','
        << format_double(m.m1) << ',' << format_double(m.m2) << '\n';
  }
  art.files["envelope.csv"] = csv.str();
  art.pass = max_diff <= 1e-10;
  art.summary = {{"max_difference", max_diff}, {"tolerance", 1e-10}, {"pass", art.pass}};
  return art;
}

RunArtifacts do_sum_rule(const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers, const RunOptions& o) {
  RunArtifacts art;
  const std::size_t k = o.k.value_or(cfg.sum_rule.k);
  const std::size_t n = o.n.value_or(cfg.sum_rule.n_words);
  if (n < 1) throw ConfigError("--n", "need at least one word");
  const SumRuleEstimate est = mc_sum_rule(k, cfg.params, cfg.angle, n, seed, workers);
  art.pass = est.pass;
  art.summary = {{"k", k},
                 {"n_words", n},
                 {"C_km", est.c_km},
                 {"Z_hat_diag_mean", est.diag_mean},
                 {"max_offdiag", est.max_offdiag},
                 {"se", est.max_se},
                 {"max_z_score", est.max_z_score},
                 {"pass", est.pass}};
  art.files["sum_rule.json"] = art.summary.dump(2) + "\n";
  return art;
}

RunArtifacts do_discretize_angle(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& o) {
  RunArtifacts art;
  const std::size_t K = o.K.value_or(cfg.discretize.K);
  if (K < 1) throw ConfigError("--K", "must be at least 1");
  const DiscreteAngleMeasure nu = build_nu_k(cfg.angle, K);
  const AngleMeasureReport r = nu.check();
  std::ostringstream csv;
  put_header(csv, header("discretize-angle", cfg, seed));
  csv << "theta,weight\n";
  for (std::size_t i = 0; i < nu.thetas.size(); ++i)
    csv << format_double(nu.thetas[i]) << ',' << format_double(nu.weights[i]) << '\n';
  art.files["nu_K.csv"] = csv.str();
  art.pass = r.ok;
  art.summary = {{"K", K},
                 {"atoms", nu.thetas.size()},
                 {"mass_error", r.mass_error},
                 {"sincos_error", r.sincos_error},
                 {"max_fourier_error", r.max_fourier_error},
                 {"min_weight", r.min_weight},
                 {"tolerance", 1e-12},
                 {"pass", r.ok}};
  art.files["angle_report.json"] = art.summary.dump(2) + "\n";
  return art;
}

RunArtifacts do_discretize_sphere(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& o) {
  RunArtifacts art;
  const std::size_t L = o.L.value_or(cfg.discretize.L);
  const std::size_t K = o.K.value_or(cfg.discretize.K);
  if (L < 2 || K < 2) throw ConfigError("--L/--K", "sphere rule needs L >= 2 and K >= 2");
  const SphereQuadrature q = build_sphere_quadrature(L, K);
  const SphereReport r = q.check();
  const double cos2 = q.polar_integral([](double th) { return std::cos(th) * std::cos(th); });
  const double sin2 = q.polar_integral([](double th) { return std::sin(th) * std::sin(th); });
  const AzimuthalSums az = azimuthal_sums(K);
  std::ostringstream csv;
  put_header(csv, header("discretize-sphere", cfg, seed));
  csv << "omega_x,omega_y,omega_z,weight\n";
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    csv << format_double(q.nodes[i][0]) << ',' << format_double(q.nodes[i][1]) << ','
        << format_double(q.nodes[i][2]) << ',' << format_double(q.weights[i]) << '\n';
  art.files["sphere.csv"] = csv.str();
  // Polar integrals carry the sin(theta) Jacobian through u = cos(theta).
  const double polar_err = std::max(std::abs(cos2 - 2.0 / 3.0), std::abs(sin2 - 4.0 / 3.0));
  const double az_err = std::max(std::abs(az.sin_cos), std::abs(az.sin2_scaled - std::numbers::pi));
  art.pass = r.ok && polar_err <= 1e-12 && az_err <= 1e-12;
  art.summary = {{"L", L},
                 {"K", K},
                 {"nodes", q.nodes.size()},
                 {"mass_error", r.mass_error},
                 {"second_moment_error", r.second_moment_error},
                 {"min_weight", r.min_weight},
                 {"polar_cos2_sin", cos2},
                 {"polar_sin3", sin2},
                 {"azimuthal_sin_cos", az.sin_cos},
                 {"azimuthal_sin2", az.sin2_scaled},
                 {"tolerance", 1e-12},
                 {"pass", art.pass}};
  art.files["sphere_report.json"] = art.summary.dump(2) + "\n";
  return art;
}

RunArtifacts do_inequalities(std::uint64_t seed) {
  RunArtifacts art;
  const Scoreboard board = run_inequality_suite(seed);
  json entries = json::array();
  for (const auto& e : board.entries)
    entries.push_back({{"group", e.group}, {"name", e.name}, {"margin", e.margin},
                       {"margin_coarse", e.margin_coarse}, {"verdict", to_string(e.verdict)}});
  art.pass = board.all_pass();
  art.summary = {{"passed", board.passed}, {"failed", board.failed}, {"inconclusive", board.inconclusive},
                 {"pass", art.pass}};
  json full = art.summary;
  full["entries"] = entries;
  art.files["inequalities.json"] = full.dump(2) + "\n";
  return art;
}

// Atomic laws sample exactly; continuous ones through the inverse-CDF table.
// The Fourier-series hypothesis of the discretization route holds only for
// non-atomic laws.
json angle_metadata(const AngleDistribution& rho) {
  json j = {{"type", rho.type_name()}, {"atomic", rho.is_atomic()}, {"fourier_series_hypothesis", !rho.is_atomic()}};
  if (!rho.is_atomic()) j["inverse_cdf_knots"] = AngleDistribution::kInverseCdfKnots;
  return j;
}

json error_json(const std::string& kind, const std::string& message, const std::string& path = "") {
  json j = {{"status", "error"}, {"kind", kind}, {"message", message}};
  if (!path.empty()) j["path"] = path;
  return j;
}

}  // namespace

unsigned resolve_workers(std::optional<unsigned> flag, unsigned config_value) {
  if (flag) return std::max(1U, *flag);
  if (const char* env = std::getenv("KACSIM_WORKERS"); env && *env) {
    unsigned v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0)
      throw ConfigError("KACSIM_WORKERS", "expected a positive integer");
    return v;
  }
  return std::max(1U, config_value);
}

RunArtifacts execute(const std::string& sub, const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers,
                     const RunOptions& opts) {
  try {
    if (sub == "simulate") return do_simulate(cfg, seed, workers);
    if (sub == "entropy") return do_entropy(cfg, seed, workers);
    if (sub == "envelope") return do_envelope(cfg, seed);
    if (sub == "verify-sum-rule") return do_sum_rule(cfg, seed, workers, opts);
    if (sub == "discretize-angle") return do_discretize_angle(cfg, seed, opts);
    if (sub == "discretize-sphere") return do_discretize_sphere(cfg, seed, opts);
    if (sub == "verify-inequalities") return do_inequalities(seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError("", e.what());
  }
  throw ConfigError("subcommand", "unknown subcommand '" + sub + "'");
}

int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  RunArtifacts art;
  std::string out_dir;
  std::uint64_t seed = 0;
  try {
    cfg = opts.config_path ? load_config(*opts.config_path) : parse_config(json::object());
    out_dir = opts.out_dir.value_or(cfg.output_dir);
    seed = opts.seed.value_or(cfg.ensemble.seed);
    const unsigned workers = resolve_workers(opts.workers, cfg.ensemble.workers);
    art = execute(opts.subcommand, cfg, seed, workers, opts);
  } catch (const ConfigError& e) {
    err << error_json("config", e.what(), e.path()).dump() << '\n';
    return kExitConfigError;
  } catch (const NumericalError& e) {
    err << error_json("numerical", e.what()).dump() << '\n';
    return kExitCheckFailed;
  }

  namespace fs = std::filesystem;
  json checksums = json::object();
  try {
    fs::create_directories(out_dir);
    for (const auto& [name, content] : art.files) {
      std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
      f.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!f) throw std::runtime_error("cannot write " + name);
      checksums[name] = hex64(fnv1a64(content));
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json manifest = {{"version", kVersion},   {"subcommand", opts.subcommand}, {"config_hash", hex64(cfg.hash)},
                           {"seed", seed},          {"wall_time_s", wall},          {"files", checksums},
                           {"angle", angle_metadata(cfg.angle)}, {"pass", art.pass}};
    std::ofstream m(fs::path(out_dir) / "manifest.json");
    m << manifest.dump(2) << '\n';
    if (!m) throw std::runtime_error("cannot write manifest.json");
  } catch (const std::exception& e) {
    err << error_json("io", e.what()).dump() << '\n';
    return kExitCheckFailed;
  }
  json result = {{"subcommand", opts.subcommand}, {"out", out_dir}, {"pass", art.pass}, {"summary", art.summary}};
  out << result.dump() << '\n';
  return art.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace kac
