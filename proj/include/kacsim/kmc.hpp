#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kacsim/angle.hpp"
#include "kacsim/collision.hpp"
#include "kacsim/params.hpp"
#include "kacsim/rng.hpp"

namespace kac {

// Per-coordinate variance of the thermal state exp(-pi |v|^2).
inline constexpr double kThermalVariance = 0.15915494309189533577;  // 1 / (2 pi)

// Law of the system velocities at t = 0. The reservoir always starts in the
// thermal state.
struct InitialCondition {
  enum class Kind { GaussianProduct, TwoTemperature, ShiftedGaussian, Custom };
  // Fills the d*M system coordinates.
  using Sampler = std::function<void(RngStream&, std::span<double>)>;

  Kind kind = Kind::GaussianProduct;
  double variance = kThermalVariance;  // GaussianProduct, ShiftedGaussian
  double hot_variance = kThermalVariance;
  double cold_variance = kThermalVariance;
  std::size_t n_hot = 0;               // TwoTemperature: first n_hot particles are hot
  std::vector<double> mean;            // ShiftedGaussian, one entry per system coordinate
  Sampler sampler;                     // Custom

  static InitialCondition gaussian_product(double s);
  static InitialCondition thermal() { return gaussian_product(kThermalVariance); }
  static InitialCondition two_temperature(double hot, double cold, std::size_t n_hot);
  static InitialCondition shifted_gaussian(double s, std::vector<double> mean);
  static InitialCondition custom(Sampler sampler);

  void validate(const GeneratorParams& params) const;
  // Draws system coordinates, then reservoir coordinates.
  void sample(const GeneratorParams& params, RngStream& rng, std::span<double> coords) const;
  // E|v|^2 / (d M) at t = 0; throws InvalidInput for custom samplers.
  double mean_system_second_moment(const GeneratorParams& params) const;
};

struct RecordFlags {
  bool system_velocities = true;
  bool collision_counts = true;
  bool energies = true;
};

struct EnsembleConfig {
  std::size_t n_traj = 1;
  std::vector<double> t_grid{0.0};
  std::uint64_t seed = 0;
  RecordFlags record;
  unsigned workers = 1;

  // t_grid strictly increasing and starting at 0; n_traj >= 1.
  void validate() const;
};

struct Trajectory {
  // Row-major [t index][system coordinate].
  std::vector<double> snapshots;
  std::vector<double> energies;
  std::array<std::uint64_t, 3> event_counts{0, 0, 0};
  double initial_energy = 0.0;
};

Trajectory simulate_trajectory(const GeneratorParams& params, const AngleDistribution& rho,
                               const InitialCondition& init, std::span<const double> t_grid,
                               RngStream& rng, const RecordFlags& record = {});

struct MomentRow {
  double t = 0.0;
  double mean_v2_system = 0.0;  // mean over trajectories of |v|^2 / (d M)
  double se = 0.0;
  std::size_t n_traj = 0;
};

struct EnsembleResult {
  std::vector<Trajectory> trajectories;
  std::vector<MomentRow> moments;
  // Mean collision counts per kind at the final grid time.
  std::array<double, 3> mean_event_counts{0, 0, 0};
  std::array<double, 3> se_event_counts{0, 0, 0};
  double max_relative_energy_drift = 0.0;
  bool partial = false;
  std::size_t completed = 0;
};

// Trajectory i draws from RngStream::for_stream(seed, i); the result does not
// depend on the worker count.
EnsembleResult simulate_ensemble(const GeneratorParams& params, const AngleDistribution& rho,
                                 const InitialCondition& init, const EnsembleConfig& config);

// n x (d M) matrix of system velocities at grid index t_index, row-major.
std::vector<double> snapshot_cloud(const EnsembleResult& result, std::size_t t_index, std::size_t dim);

// Column header t,mean_v2_system,se,n_traj preceded by '#' comment lines.
void write_moments_csv(std::ostream& os, std::span<const MomentRow> rows,
                       std::span<const std::string> comments);

// Little-endian: five uint64 {d, M, N, n_traj, n_times}, then float64
// snapshots ordered [trajectory][time][coordinate].
void write_snapshots_binary(std::ostream& os, const GeneratorParams& params, const EnsembleResult& result,
                            std::size_t n_times);

struct SnapshotDump {
  std::uint64_t d = 0, M = 0, N = 0, n_traj = 0, n_times = 0;
  std::vector<double> values;
};
SnapshotDump read_snapshots_binary(std::istream& is);

}  // namespace kac
