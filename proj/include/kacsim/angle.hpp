#pragma once

#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kacsim/rng.hpp"

namespace kac {

// Law of the collision angle on [-pi, pi].
//
// Fourier convention: rho_hat(m) = (1 / 2pi) * integral of exp(-i m theta) d rho,
// so that a density reads rho(theta) = sum_m rho_hat(m) exp(i m theta).
class AngleDistribution {
 public:
  struct Uniform {};
  struct Atoms {
    std::vector<std::pair<double, double>> atoms;  // (theta, probability)
  };
  // Piecewise-linear density through the knots; knots must span [-pi, pi].
  struct DensityTable {
    std::vector<double> thetas;
    std::vector<double> values;
  };
  // rho(theta) = (1 / 2pi) * (1 + sum_{m>=1} cos_coef[m-1] cos(m theta)
  //                              + sin_coef[m-1] sin(m theta)).
  struct Trigonometric {
    std::vector<double> cos_coef;
    std::vector<double> sin_coef;
  };
  using Representation = std::variant<Uniform, Atoms, DensityTable, Trigonometric>;

  static constexpr int kInverseCdfKnots = 1 << 16;
  static constexpr double kTolerance = 1e-12;

  // Validates on construction; throws InvalidInput for a law with mass != 1,
  // nonzero sin*cos moment, negative weights or malformed tables.
  explicit AngleDistribution(Representation rep);

  static AngleDistribution uniform() { return AngleDistribution(Uniform{}); }
  // 1/2 (delta_{pi/2} + delta_{-pi/2}).
  static AngleDistribution half_pi_atoms();
  static AngleDistribution atoms(std::vector<std::pair<double, double>> atoms) {
    return AngleDistribution(Atoms{std::move(atoms)});
  }

  const Representation& representation() const { return rep_; }
  std::string type_name() const;
  bool is_atomic() const { return std::holds_alternative<Atoms>(rep_); }
  bool is_uniform() const { return std::holds_alternative<Uniform>(rep_); }

  std::complex<double> fourier_coefficient(int m) const;
  double mass() const;
  // Integral of sin^2 theta d rho.
  double sin2_moment() const { return sin2_moment_; }
  // Integral of sin theta cos theta d rho.
  double sincos_moment() const { return sincos_moment_; }

  // Density value; only for non-atomic laws.
  double density(double theta) const;

  double sample(RngStream& rng) const;

 private:
  void validate() const;
  void build_sampler();

  Representation rep_;
  double sin2_moment_ = 0.0;
  double sincos_moment_ = 0.0;
  // Cumulative distribution on kInverseCdfKnots equal cells of [-pi, pi], or
  // cumulative atom probabilities for atomic laws.
  std::shared_ptr<const std::vector<double>> cdf_;
};

}  // namespace kac
