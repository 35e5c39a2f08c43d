#pragma once

#include <array>
#include <span>
#include <vector>

#include "kacsim/angle.hpp"
#include "kacsim/params.hpp"
#include "kacsim/rng.hpp"

namespace kac {

using Vec3 = std::array<double, 3>;

// Velocities of all particles: the d*M system coordinates followed by the d*N
// reservoir coordinates. Particle p occupies coordinates [d*p, d*p + d).
class ParticleState {
 public:
  ParticleState() = default;
  ParticleState(int dimension, std::size_t M, std::size_t N);
  ParticleState(int dimension, std::size_t M, std::size_t N, std::vector<double> coords);

  int dimension() const { return dimension_; }
  std::size_t M() const { return M_; }
  std::size_t N() const { return N_; }

  std::span<double> coords() { return coords_; }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> system() const { return std::span(coords_).first(dimension_ * M_); }
  std::span<const double> reservoir() const { return std::span(coords_).subspan(dimension_ * M_); }

  double system_energy() const;
  double energy() const;

  bool operator==(const ParticleState&) const = default;

 private:
  int dimension_ = 1;
  std::size_t M_ = 0;
  std::size_t N_ = 0;
  std::vector<double> coords_;
};

// One jump of the generator. `time` is the waiting time since the previous jump.
struct CollisionEvent {
  double time = 0.0;
  PairIndex pair;
  double theta = 0.0;     // d = 1
  Vec3 omega{0, 0, 1};    // d = 3
};

// mu * integral sin^2 d rho in d = 1; mu / 3 in d = 3.
double mu_rho(const GeneratorParams& params, const AngleDistribution& rho);

// In-place forms used by the simulator.
void apply_rotation_1d(std::span<double> coords, std::size_t i, std::size_t j, double theta);
void apply_collision_3d(std::span<double> coords, std::size_t i, std::size_t j, const Vec3& omega);

// v_i' = v_i cos(theta) + v_j sin(theta), v_j' = -v_i sin(theta) + v_j cos(theta).
ParticleState rotation_1d(const ParticleState& state, const PairIndex& pair, double theta);

// Momentum- and energy-conserving exchange along omega (omega-representation);
// throws InvalidInput unless |omega| = 1 within 1e-14.
ParticleState collision_3d(const ParticleState& state, const PairIndex& pair, const Vec3& omega);

Vec3 sample_unit_sphere(RngStream& rng);
PairIndex sample_pair(const GeneratorParams& params, RngStream& rng);

// Waiting time ~ Exp(Lambda), pair ~ lambda_alpha, theta ~ rho (d = 1) or
// omega uniform on the sphere (d = 3). Requires Lambda > 0.
CollisionEvent sample_event(const GeneratorParams& params, const AngleDistribution& rho, RngStream& rng);

void apply_event(std::span<double> coords, int dimension, const CollisionEvent& ev);

}  // namespace kac
