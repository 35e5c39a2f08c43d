#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "kacsim/angle.hpp"
#include "kacsim/collision.hpp"
#include "kacsim/quadrature.hpp"

namespace kac {

// Fejer-smoothed angle law: coefficients rho_hat(m) (1 - |m| / (2K+1)) for
// 0 <= m <= 2K; negative modes follow by conjugation.
struct FejerSmoothed {
  std::size_t K = 0;
  std::vector<std::complex<double>> coefficients;

  double density(double theta) const;
  std::complex<double> coefficient(int m) const;
};

FejerSmoothed fejer_smooth(const AngleDistribution& rho, std::size_t K);
// Same, with the Fourier coefficients of a density on [-pi, pi] obtained by
// direct summation on the 4K+1 point grid.
FejerSmoothed fejer_smooth(const std::function<double(double)>& density, std::size_t K);

struct AngleMeasureReport {
  double mass_error = 0.0;
  double sincos_error = 0.0;
  double max_fourier_error = 0.0;
  double min_weight = 0.0;
  bool ok = false;
};

// Atoms 2 pi l / (4K+1), l = -2K..2K, with weights 2 pi / (4K+1) rho_K(theta_l).
struct DiscreteAngleMeasure {
  std::size_t K = 0;
  std::vector<double> thetas;
  std::vector<double> weights;
  FejerSmoothed smoothed;

  std::complex<double> fourier_coefficient(int m) const;
  double integrate(const std::function<double(double)>& f) const;
  AngleMeasureReport check(double tol = 1e-12) const;
  AngleDistribution to_distribution() const;
};

// Throws InvalidInput for K = 0 and NumericalError if rho_K is below -1e-12 at
// a node. Weights within rounding of zero are set to zero.
DiscreteAngleMeasure build_nu_k(const AngleDistribution& rho, std::size_t K);
DiscreteAngleMeasure build_nu_k(const std::function<double(double)>& density, std::size_t K);

struct SphereReport {
  double mass_error = 0.0;
  double second_moment_error = 0.0;  // max |sum w omega omega^T - I/3|
  double min_weight = 0.0;
  bool ok = false;
};

// Product rule on the unit sphere: polar nodes arccos(u_i) at the roots of P_L,
// azimuths pi j / K for j = 0..2K-1, weights w_i / (4K) with w_i the plain
// Gauss-Legendre weights. The sin(theta) Jacobian is carried by the change
// of variables u = cos(theta), so sum_i w_i g(theta_i) approximates
// integral_0^pi g(theta) sin(theta) d theta.
struct SphereQuadrature {
  std::size_t L = 0;
  std::size_t K = 0;
  QuadratureRule legendre;
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  // sum_i w_i g(arccos u_i).
  double polar_integral(const std::function<double(double)>& g) const;
  SphereReport check(double tol = 1e-12) const;
};

SphereQuadrature build_sphere_quadrature(std::size_t L, std::size_t K);

struct AzimuthalSums {
  double sin_cos = 0.0;       // sum_j sin(pi j / K) cos(pi j / K)
  double sin2_scaled = 0.0;   // sum_j sin^2(pi j / K) pi / K
};

AzimuthalSums azimuthal_sums(std::size_t K);

}  // namespace kac
