#include "kacsim/kmc.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <mutex>
#include <new>
#include <ostream>
#include <thread>

#include "kacsim/errors.hpp"
#include "kacsim/io.hpp"

namespace kac {

InitialCondition InitialCondition::gaussian_product(double s) {
  InitialCondition ic;
  ic.kind = Kind::GaussianProduct;
  ic.variance = s;
  return ic;
}

InitialCondition InitialCondition::two_temperature(double hot, double cold, std::size_t n_hot) {
  InitialCondition ic;
  ic.kind = Kind::TwoTemperature;
  ic.hot_variance = hot;
  ic.cold_variance = cold;
  ic.n_hot = n_hot;
  return ic;
}

InitialCondition InitialCondition::shifted_gaussian(double s, std::vector<double> mean) {
  InitialCondition ic;
  ic.kind = Kind::ShiftedGaussian;
  ic.variance = s;
  ic.mean = std::move(mean);
  return ic;
}

InitialCondition InitialCondition::custom(Sampler sampler) {
  InitialCondition ic;
  ic.kind = Kind::Custom;
  ic.sampler = std::move(sampler);
  return ic;
}

void InitialCondition::validate(const GeneratorParams& params) const {
  auto positive = [](double s, const char* what) {
    if (!std::isfinite(s) || s <= 0.0) throw InvalidInput(std::string(what) + " must be positive");
  };
  switch (kind) {
    case Kind::GaussianProduct:
      positive(variance, "initial variance");
      break;
    case Kind::TwoTemperature:
      positive(hot_variance, "hot variance");
      positive(cold_variance, "cold variance");
      if (n_hot > params.M) throw InvalidInput("n_hot exceeds the number of system particles");
      break;
    case Kind::ShiftedGaussian:
      positive(variance, "initial variance");
      if (mean.size() != params.system_coords())
        throw InvalidInput("shifted gaussian mean must have d*M entries");
      for (double m : mean)
        if (!std::isfinite(m)) throw InvalidInput("non-finite initial mean");
      break;
    case Kind::Custom:
      if (!sampler) throw InvalidInput("custom initial condition without sampler");
      break;
  }
}

void InitialCondition::sample(const GeneratorParams& params, RngStream& rng, std::span<double> coords) const {
  const std::size_t ds = params.system_coords();
  const int d = params.dimension;
  auto sys = coords.first(ds);
  switch (kind) {
    case Kind::GaussianProduct: {
      const double sd = std::sqrt(variance);
      for (double& x : sys) x = sd * rng.normal();
      break;
    }
    case Kind::TwoTemperature: {
      const double hot = std::sqrt(hot_variance), cold = std::sqrt(cold_variance);
      for (std::size_t c = 0; c < ds; ++c)
        sys[c] = (c / static_cast<std::size_t>(d) < n_hot ? hot : cold) * rng.normal();
      break;
    }
    case Kind::ShiftedGaussian: {
      const double sd = std::sqrt(variance);
      for (std::size_t c = 0; c < ds; ++c) sys[c] = mean[c] + sd * rng.normal();
      break;
    }
    case Kind::Custom:
      sampler(rng, sys);
      break;
  }
  const double sd_r = std::sqrt(kThermalVariance);
  for (double& x : coords.subspan(ds)) x = sd_r * rng.normal();
}

double InitialCondition::mean_system_second_moment(const GeneratorParams& params) const {
  const double ds = static_cast<double>(params.system_coords());
  switch (kind) {
    case Kind::GaussianProduct:
      return variance;
    case Kind::TwoTemperature: {
      const double hot = static_cast<double>(n_hot), total = static_cast<double>(params.M);
      return (hot * hot_variance + (total - hot) * cold_variance) / total;
    }
    case Kind::ShiftedGaussian: {
      double m2 = 0.0;
      for (double m : mean) m2 += m * m;
      return variance + m2 / ds;
    }
    case Kind::Custom:
      break;
  }
  throw InvalidInput("second moment of a custom initial condition is unknown");
}

void EnsembleConfig::validate() const {
  if (n_traj < 1) throw InvalidInput("n_traj must be at least 1");
  if (t_grid.empty() || t_grid.front() != 0.0) throw InvalidInput("t_grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidInput("t_grid must be strictly increasing");
  for (double t : t_grid)
    if (!std::isfinite(t)) throw InvalidInput("t_grid entries must be finite");
}

Trajectory simulate_trajectory(const GeneratorParams& params, const AngleDistribution& rho,
                               const InitialCondition& init, std::span<const double> t_grid,
                               RngStream& rng, const RecordFlags& record) {
  const std::size_t ds = params.system_coords();
  std::vector<double> coords(params.system_coords() + params.reservoir_coords());
  init.sample(params, rng, coords);

  Trajectory traj;
  auto energy_of = [&] {
    double e = 0.0;
    for (double x : coords) e += x * x;
    return e;
  };
  traj.initial_energy = energy_of();
  if (record.system_velocities) traj.snapshots.reserve(t_grid.size() * ds);
  if (record.energies) traj.energies.reserve(t_grid.size());

  const double L = params.Lambda();
  double now = 0.0;
  CollisionEvent next;
  bool has_next = L > 0.0;
  double next_time = 0.0;
  if (has_next) {
    next = sample_event(params, rho, rng);
    next_time = next.time;
  }
  for (double tg : t_grid) {
    while (has_next && next_time <= tg) {
      apply_event(coords, params.dimension, next);
      ++traj.event_counts[static_cast<int>(next.pair.kind)];
      now = next_time;
      next = sample_event(params, rho, rng);
      next_time = now + next.time;
    }
    const double e = energy_of();
    if (!std::isfinite(e))
      throw NumericalError("non-finite particle state at t = " + format_double(tg));
    if (record.energies) traj.energies.push_back(e);
    if (record.system_velocities)
      traj.snapshots.insert(traj.snapshots.end(), coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(ds));
  }
  return traj;
}

EnsembleResult simulate_ensemble(const GeneratorParams& params, const AngleDistribution& rho,
                                 const InitialCondition& init, const EnsembleConfig& config) {
  params.validate();
  config.validate();
  init.validate(params);

  EnsembleResult result;
  const std::size_t n = config.n_traj;
  RecordFlags rec = config.record;
  // Moments need the system snapshots.
  rec.system_velocities = true;
  try {
    result.trajectories.resize(n);
  } catch (const std::bad_alloc&) {
    result.partial = true;
    return result;
  }

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  constexpr std::size_t kChunk = 256;
  auto worker = [&] {
    for (;;) {
      const std::size_t begin = cursor.fetch_add(kChunk);
      if (begin >= n || stop.load()) return;
      const std::size_t end = std::min(n, begin + kChunk);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          RngStream rng = RngStream::for_stream(config.seed, i);
          result.trajectories[i] = simulate_trajectory(params, rho, init, config.t_grid, rng, rec);
        } catch (const std::bad_alloc&) {
          stop.store(true);
          return;
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          stop.store(true);
          return;
        }
      }
    }
  };
  const unsigned workers = std::max(1u, config.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Keep the longest fully simulated prefix; reduction is in index order.
  std::size_t done = 0;
  const std::size_t nt = config.t_grid.size();
  const std::size_t ds = params.system_coords();
  while (done < n && result.trajectories[done].snapshots.size() == nt * ds) ++done;
  if (done < n) {
    result.partial = true;
    result.trajectories.resize(done);
  }
  result.completed = done;
  if (done == 0) return result;

  const double dn = static_cast<double>(done);
  result.moments.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& tr : result.trajectories) {
      double q = 0.0;
      for (std::size_t c = 0; c < ds; ++c) q += tr.snapshots[t * ds + c] * tr.snapshots[t * ds + c];
      q /= static_cast<double>(ds);
      sum += q;
      sum2 += q * q;
    }
    const double mean = sum / dn;
    const double var = done > 1 ? std::max(0.0, (sum2 - dn * mean * mean) / (dn - 1.0)) : 0.0;
    result.moments[t] = {config.t_grid[t], mean, std::sqrt(var / dn), done};
  }
  for (int k = 0; k < 3; ++k) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& tr : result.trajectories) {
      const double c = static_cast<double>(tr.event_counts[k]);
      sum += c;
      sum2 += c * c;
    }
    const double mean = sum / dn;
    const double var = done > 1 ? std::max(0.0, (sum2 - dn * mean * mean) / (dn - 1.0)) : 0.0;
    result.mean_event_counts[k] = mean;
    result.se_event_counts[k] = std::sqrt(var / dn);
  }
  for (const auto& tr : result.trajectories)
    for (double e : tr.energies)
      if (tr.initial_energy > 0.0)
        result.max_relative_energy_drift =
            std::max(result.max_relative_energy_drift, std::abs(e - tr.initial_energy) / tr.initial_energy);
  if (!config.record.system_velocities) {
    // Snapshots were kept only for the moment table.
    for (auto& tr : result.trajectories) {
      tr.snapshots.clear();
      tr.snapshots.shrink_to_fit();
    }
  }
  return result;
}

std::vector<double> snapshot_cloud(const EnsembleResult& result, std::size_t t_index, std::size_t dim) {
  std::vector<double> cloud;
  cloud.reserve(result.trajectories.size() * dim);
  for (const auto& tr : result.trajectories) {
    if (tr.snapshots.size() < (t_index + 1) * dim) throw InvalidInput("snapshot not recorded");
    cloud.insert(cloud.end(), tr.snapshots.begin() + static_cast<std::ptrdiff_t>(t_index * dim),
                 tr.snapshots.begin() + static_cast<std::ptrdiff_t>((t_index + 1) * dim));
  }
  return cloud;
}

void write_moments_csv(std::ostream& os, std::span<const MomentRow> rows, std::span<const std::string> comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "t,mean_v2_system,se,n_traj\n";
  for (const auto& r : rows)
    os << format_double(r.t) << ',' << format_double(r.mean_v2_system) << ',' << format_double(r.se) << ','
       << r.n_traj << '\n';
}

namespace {

void put_u64(std::ostream& os, std::uint64_t x) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw InvalidInput("truncated snapshot dump");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return x;
}

}  // namespace

void write_snapshots_binary(std::ostream& os, const GeneratorParams& params, const EnsembleResult& result,
                            std::size_t n_times) {
  put_u64(os, static_cast<std::uint64_t>(params.dimension));
  put_u64(os, params.M);
  put_u64(os, params.N);
  put_u64(os, result.trajectories.size());
  put_u64(os, n_times);
  for (const auto& tr : result.trajectories)
    for (double x : tr.snapshots) put_u64(os, std::bit_cast<std::uint64_t>(x));
}

SnapshotDump read_snapshots_binary(std::istream& is) {
  SnapshotDump dump;
  dump.d = get_u64(is);
  dump.M = get_u64(is);
  dump.N = get_u64(is);
  dump.n_traj = get_u64(is);
  dump.n_times = get_u64(is);
  const std::uint64_t count = dump.n_traj * dump.n_times * dump.d * dump.M;
  dump.values.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) dump.values.push_back(std::bit_cast<double>(get_u64(is)));
  return dump;
}

}  // namespace kac
