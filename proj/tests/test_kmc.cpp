#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kacsim/errors.hpp"
#include "kacsim/kmc.hpp"
#include "kacsim/moments.hpp"

using namespace kac;

namespace {

const GeneratorParams kRef{2, 8, 1.0, 1.0, 1.0, 1};

}  // namespace

TEST_CASE("single trajectory conserves energy and starts from the sample") {
  const auto rho = AngleDistribution::uniform();
  const auto init = InitialCondition::gaussian_product(1.0 / std::numbers::pi);
  const std::vector<double> grid{0.0, 0.5, 1.0, 3.0};
  auto rng = RngStream::for_stream(1, 0);
  const Trajectory tr = simulate_trajectory(kRef, rho, init, grid, rng);
  REQUIRE(tr.snapshots.size() == grid.size() * 2);
  REQUIRE(tr.energies.size() == grid.size());

  auto rng2 = RngStream::for_stream(1, 0);
  std::vector<double> coords(10);
  init.sample(kRef, rng2, coords);
  CHECK(tr.snapshots[0] == coords[0]);
  CHECK(tr.snapshots[1] == coords[1]);
  for (double e : tr.energies) CHECK(std::abs(e - tr.initial_energy) <= 1e-12 * tr.initial_energy);
  CHECK(tr.event_counts[0] + tr.event_counts[1] + tr.event_counts[2] > 0);
}

TEST_CASE("a generator without jumps leaves the state frozen") {
  const GeneratorParams p{2, 2, 0.0, 0.0, 0.0, 1};
  auto rng = RngStream::for_stream(2, 0);
  const auto tr = simulate_trajectory(p, AngleDistribution::uniform(), InitialCondition::thermal(), std::vector{0.0, 5.0},
                                      rng);
  CHECK(tr.snapshots[0] == tr.snapshots[2]);
  CHECK(tr.snapshots[1] == tr.snapshots[3]);
}

TEST_CASE("ensemble output does not depend on the worker count") {
  EnsembleConfig cfg{3000, {0.0, 0.5, 2.0}, 77, {}, 1};
  const auto rho = AngleDistribution::uniform();
  const auto init = InitialCondition::gaussian_product(0.3);
  const auto a = simulate_ensemble(kRef, rho, init, cfg);
  cfg.workers = 4;
  const auto b = simulate_ensemble(kRef, rho, init, cfg);
  REQUIRE(a.moments.size() == b.moments.size());
  for (std::size_t i = 0; i < a.moments.size(); ++i) {
    CHECK(a.moments[i].mean_v2_system == b.moments[i].mean_v2_system);
    CHECK(a.moments[i].se == b.moments[i].se);
  }
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) CHECK(a.trajectories[i].snapshots == b.trajectories[i].snapshots);
  CHECK_FALSE(a.partial);
  CHECK(a.completed == 3000);
}

TEST_CASE("collision counts match the kind rates") {
  const double T = 2.0;
  EnsembleConfig cfg{4000, {0.0, T}, 5, {}, 2};
  const auto res = simulate_ensemble(kRef, AngleDistribution::uniform(), InitialCondition::thermal(), cfg);
  for (auto kind : {PairKind::SystemSystem, PairKind::ReservoirReservoir, PairKind::Cross}) {
    const int k = static_cast<int>(kind);
    CAPTURE(k);
    CHECK(std::abs(res.mean_event_counts[k] - kRef.kind_rate(kind) * T) < 5 * res.se_event_counts[k]);
  }
  CHECK(res.max_relative_energy_drift < 1e-12);
}

TEST_CASE("simulated system second moment follows the moment equation") {
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 4.0};
  EnsembleConfig cfg{20000, grid, 123, {}, 4};
  for (const auto& [init, label] : {std::pair{InitialCondition::gaussian_product(1.0 / std::numbers::pi), "gaussian"},
                                    std::pair{InitialCondition::two_temperature(0.5, 0.05, 1), "two-temperature"},
                                    std::pair{InitialCondition::shifted_gaussian(0.1, {0.4, -0.2}), "shifted"}}) {
    CAPTURE(label);
    const auto res = simulate_ensemble(kRef, AngleDistribution::uniform(), init, cfg);
    const MomentPair m0{init.mean_system_second_moment(kRef), kThermalVariance};
    for (const auto& row : res.moments) {
      const double pred = propagate_moments(m0, row.t, kRef, AngleDistribution::uniform()).m1;
      CAPTURE(row.t);
      CHECK(std::abs(row.mean_v2_system - pred) <= 5 * row.se);
    }
  }
}

TEST_CASE("three-dimensional ensemble conserves energy") {
  const GeneratorParams p{1, 2, 0.0, 1.0, 1.0, 3};
  EnsembleConfig cfg{500, {0.0, 1.0, 3.0}, 8, {}, 1};
  const auto res = simulate_ensemble(p, AngleDistribution::uniform(), InitialCondition::gaussian_product(0.05), cfg);
  CHECK(res.max_relative_energy_drift < 1e-12);
  CHECK(res.trajectories.front().snapshots.size() == 3 * 3);
}

TEST_CASE("snapshot dump round trip and CSV layout") {
  EnsembleConfig cfg{10, {0.0, 1.0}, 3, {}, 1};
  const auto res = simulate_ensemble(kRef, AngleDistribution::uniform(), InitialCondition::thermal(), cfg);
  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_snapshots_binary(bin, kRef, res, 2);
  const auto dump = read_snapshots_binary(bin);
  CHECK(dump.d == 1);
  CHECK(dump.M == 2);
  CHECK(dump.N == 8);
  CHECK(dump.n_traj == 10);
  CHECK(dump.n_times == 2);
  REQUIRE(dump.values.size() == 40);
  CHECK(dump.values[4] == res.trajectories[1].snapshots[0]);
  const auto cloud = snapshot_cloud(res, 1, 2);
  CHECK(cloud[2] == res.trajectories[1].snapshots[2]);

  std::ostringstream csv;
  const std::vector<std::string> comments{"config_hash=abc", "seed=3"};
  write_moments_csv(csv, res.moments, comments);
  const std::string s = csv.str();
  CHECK(s.starts_with("# config_hash=abc\n# seed=3\nt,mean_v2_system,se,n_traj\n0,"));
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS((EnsembleConfig{10, {0.5, 1.0}, 0, {}, 1}.validate()), InvalidInput);
  CHECK_THROWS_AS((EnsembleConfig{10, {0.0, 1.0, 1.0}, 0, {}, 1}.validate()), InvalidInput);
  CHECK_THROWS_AS((EnsembleConfig{0, {0.0}, 0, {}, 1}.validate()), InvalidInput);
  CHECK_THROWS_AS(InitialCondition::gaussian_product(-1.0).validate(kRef), InvalidInput);
  CHECK_THROWS_AS(InitialCondition::shifted_gaussian(0.1, {1.0}).validate(kRef), InvalidInput);
  CHECK_THROWS_AS(InitialCondition::two_temperature(1, 1, 3).validate(kRef), InvalidInput);
  CHECK(InitialCondition::two_temperature(0.5, 0.1, 1).mean_system_second_moment(kRef) == doctest::Approx(0.3));
  CHECK(InitialCondition::shifted_gaussian(0.1, {0.4, -0.2}).mean_system_second_moment(kRef) ==
        doctest::Approx(0.1 + 0.1));
}
