#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kacsim/angle.hpp"
#include "kacsim/params.hpp"

namespace kac {

// Per-coordinate second moments of system (m1) and reservoir (m2).
struct MomentPair {
  double m1 = 0.0;
  double m2 = 0.0;
};

// One averaged jump acting on (m1, m2):
//   P = I - (mu_nu / (Lambda N)) [[N, -N], [-M, M]],
// with mu_nu = mu * integral sin^2 d nu in d = 1 and mu / 3 in d = 3.
struct PMatrix {
  Eigen::Matrix2d P;
  double ell1 = 1.0;
  double ell2 = 1.0;
  Eigen::Vector2d v1;  // (1, 1)
  Eigen::Vector2d v2;  // (N, -M) / (M + N)

  MomentPair apply(const MomentPair& m) const;
};

PMatrix make_p_matrix(const GeneratorParams& params, double mu_nu);
PMatrix make_p_matrix(const GeneratorParams& params, const AngleDistribution& rho);

// C_{k,M} = M/(N+M) + N/(N+M) * (1 - mu_nu (N+M) / (N Lambda))^k.
double c_km(unsigned k, const GeneratorParams& params, double mu_nu);
double c_km(unsigned k, const GeneratorParams& params, const AngleDistribution& rho);

struct DecayEnvelope {
  double system_weight = 1.0;     // M / (N+M), the t -> infinity level
  double reservoir_weight = 0.0;  // N / (N+M)
  double rate = 0.0;              // mu_rho (N+M) / N

  double operator()(double t) const;
};

DecayEnvelope make_envelope(const GeneratorParams& params, const AngleDistribution& rho);
double envelope(double t, const GeneratorParams& params, const AngleDistribution& rho);

// Rate of the standard Kac corollary, integral sin^2 d rho * 2 (N+M) / (N+M-1).
double classical_kac_rate(const GeneratorParams& params, const AngleDistribution& rho);

// Poisson(lambda_t) probabilities e^{-x} x^k / k! for k = 0..K, with K the
// first index past the mode where the remaining tail is below `tail`.
std::vector<double> poisson_weights(double lambda_t, double tail = 1e-12);

struct PoissonSum {
  double value = 0.0;
  std::size_t terms = 0;
};

// e^{-Lambda t} sum_k (Lambda t)^k / k! C_{k,M}.
PoissonSum envelope_poisson_sum(double t, const GeneratorParams& params, const AngleDistribution& rho);

MomentPair propagate_moments(const MomentPair& m0, double t, const GeneratorParams& params,
                             const AngleDistribution& rho);
// Same quantity through e^{-Lambda t} sum_k (Lambda t)^k / k! P^k m0.
MomentPair propagate_moments_poisson(const MomentPair& m0, double t, const GeneratorParams& params,
                                     const AngleDistribution& rho);

}  // namespace kac
