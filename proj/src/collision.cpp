#include "kacsim/collision.hpp"

#include <cmath>
#include <string>

#include "kacsim/errors.hpp"

namespace kac {

ParticleState::ParticleState(int dimension, std::size_t M, std::size_t N)
    : dimension_(dimension), M_(M), N_(N), coords_(static_cast<std::size_t>(dimension) * (M + N), 0.0) {}

ParticleState::ParticleState(int dimension, std::size_t M, std::size_t N, std::vector<double> coords)
    : dimension_(dimension), M_(M), N_(N), coords_(std::move(coords)) {
  if (coords_.size() != static_cast<std::size_t>(dimension) * (M + N))
    throw InvalidInput("state coordinate count does not match d*(M+N)");
}

double ParticleState::system_energy() const {
  double e = 0.0;
  for (double x : system()) e += x * x;
  return e;
}

double ParticleState::energy() const {
  double e = 0.0;
  for (double x : coords_) e += x * x;
  return e;
}

double mu_rho(const GeneratorParams& params, const AngleDistribution& rho) {
  if (params.dimension == 3) return params.mu / 3.0;
  return params.mu * rho.sin2_moment();
}

void apply_rotation_1d(std::span<double> coords, std::size_t i, std::size_t j, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double vi = coords[i], vj = coords[j];
  coords[i] = vi * c + vj * s;
  coords[j] = -vi * s + vj * c;
}

void apply_collision_3d(std::span<double> coords, std::size_t i, std::size_t j, const Vec3& omega) {
  double* zi = &coords[3 * i];
  double* zj = &coords[3 * j];
  const double proj = omega[0] * (zi[0] - zj[0]) + omega[1] * (zi[1] - zj[1]) + omega[2] * (zi[2] - zj[2]);
  for (int a = 0; a < 3; ++a) {
    zi[a] -= proj * omega[a];
    zj[a] += proj * omega[a];
  }
}

namespace {

void check_pair(const ParticleState& state, const PairIndex& pair) {
  if (!(pair.i < pair.j) || pair.j >= state.M() + state.N())
    throw InvalidInput("pair index out of range");
}

}  // namespace

ParticleState rotation_1d(const ParticleState& state, const PairIndex& pair, double theta) {
  if (state.dimension() != 1) throw InvalidInput("rotation_1d requires d = 1");
  check_pair(state, pair);
  ParticleState out = state;
  apply_rotation_1d(out.coords(), pair.i, pair.j, theta);
  return out;
}

ParticleState collision_3d(const ParticleState& state, const PairIndex& pair, const Vec3& omega) {
  if (state.dimension() != 3) throw InvalidInput("collision_3d requires d = 3");
  check_pair(state, pair);
  const double norm = std::sqrt(omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]);
  if (!(std::abs(norm - 1.0) <= 1e-14))
    throw InvalidInput("collision direction must be a unit vector (|omega| = " + std::to_string(norm) + ")");
  ParticleState out = state;
  apply_collision_3d(out.coords(), pair.i, pair.j, omega);
  return out;
}

Vec3 sample_unit_sphere(RngStream& rng) {
  for (;;) {
    const double x = rng.normal(), y = rng.normal(), z = rng.normal();
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r > 1e-300) return {x / r, y / r, z / r};
  }
}

PairIndex sample_pair(const GeneratorParams& params, RngStream& rng) {
  const auto probs = params.kind_probabilities();
  const double u = rng.uniform();
  constexpr PairKind kinds[3] = {PairKind::SystemSystem, PairKind::ReservoirReservoir, PairKind::Cross};
  int chosen = -1;
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (probs[k] <= 0.0) continue;
    chosen = k;
    acc += probs[k];
    if (u < acc) break;
  }
  if (chosen < 0) throw InvalidInput("no pair kind has positive rate");
  const PairKind kind = kinds[chosen];
  const std::size_t r = rng.index(params.pair_count(kind));
  return pair_of_kind(kind, r, params.M, params.N);
}

CollisionEvent sample_event(const GeneratorParams& params, const AngleDistribution& rho, RngStream& rng) {
  const double L = params.Lambda();
  if (!(L > 0.0)) throw InvalidInput("total jump rate Lambda must be positive to sample events");
  CollisionEvent ev;
  ev.time = rng.exponential(L);
  ev.pair = sample_pair(params, rng);
  if (params.dimension == 3)
    ev.omega = sample_unit_sphere(rng);
  else
    ev.theta = rho.sample(rng);
  return ev;
}

void apply_event(std::span<double> coords, int dimension, const CollisionEvent& ev) {
  if (dimension == 3)
    apply_collision_3d(coords, ev.pair.i, ev.pair.j, ev.omega);
  else
    apply_rotation_1d(coords, ev.pair.i, ev.pair.j, ev.theta);
}

}  // namespace kac
