#include "kacsim/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kacsim/errors.hpp"

namespace kac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double grid_angle(long l, std::size_t K) {
  return kTwoPi * static_cast<double>(l) / static_cast<double>(4 * K + 1);
}

FejerSmoothed apply_fejer(std::vector<std::complex<double>> raw, std::size_t K) {
  FejerSmoothed out;
  out.K = K;
  out.coefficients.resize(2 * K + 1);
  const double denom = static_cast<double>(2 * K + 1);
  for (std::size_t m = 0; m <= 2 * K; ++m)
    out.coefficients[m] = raw[m] * (1.0 - static_cast<double>(m) / denom);
  return out;
}

void require_positive_order(std::size_t K) {
  if (K == 0) throw InvalidInput("discretization order K must be at least 1");
}

DiscreteAngleMeasure measure_from(FejerSmoothed smoothed) {
  const std::size_t K = smoothed.K;
  DiscreteAngleMeasure nu;
  nu.K = K;
  const double cell = kTwoPi / static_cast<double>(4 * K + 1);
  const long span = static_cast<long>(2 * K);
  for (long l = -span; l <= span; ++l) {
    const double theta = grid_angle(l, K);
    double w = cell * smoothed.density(theta);
    if (w < -1e-12) {
      throw NumericalError("smoothed density is negative (" + std::to_string(w / cell) + ") at theta = " +
                           std::to_string(theta));
    }
    nu.thetas.push_back(theta);
    nu.weights.push_back(std::max(w, 0.0));
  }
  nu.smoothed = std::move(smoothed);
  return nu;
}

}  // namespace

double FejerSmoothed::density(double theta) const {
  double v = coefficients.empty() ? 0.0 : coefficients[0].real();
  for (std::size_t m = 1; m < coefficients.size(); ++m) {
    const std::complex<double> e = std::polar(1.0, static_cast<double>(m) * theta);
    v += 2.0 * (coefficients[m] * e).real();
  }
  return v;
}

std::complex<double> FejerSmoothed::coefficient(int m) const {
  const std::size_t a = static_cast<std::size_t>(m < 0 ? -m : m);
  if (a >= coefficients.size()) return 0.0;
  return m < 0 ? std::conj(coefficients[a]) : coefficients[a];
}

FejerSmoothed fejer_smooth(const AngleDistribution& rho, std::size_t K) {
  require_positive_order(K);
  std::vector<std::complex<double>> raw(2 * K + 1);
  for (std::size_t m = 0; m <= 2 * K; ++m) raw[m] = rho.fourier_coefficient(static_cast<int>(m));
  return apply_fejer(std::move(raw), K);
}

FejerSmoothed fejer_smooth(const std::function<double(double)>& density, std::size_t K) {
  require_positive_order(K);
  const std::size_t n = 4 * K + 1;
  std::vector<double> values(n);
  std::vector<double> thetas(n);
  const long span = static_cast<long>(2 * K);
  for (long l = -span; l <= span; ++l) {
    thetas[static_cast<std::size_t>(l + span)] = grid_angle(l, K);
    values[static_cast<std::size_t>(l + span)] = density(grid_angle(l, K));
  }
  std::vector<std::complex<double>> raw(2 * K + 1);
  for (std::size_t m = 0; m <= 2 * K; ++m) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i] * std::polar(1.0, -static_cast<double>(m) * thetas[i]);
    raw[m] = s / static_cast<double>(n);
  }
  return apply_fejer(std::move(raw), K);
}

DiscreteAngleMeasure build_nu_k(const AngleDistribution& rho, std::size_t K) {
  return measure_from(fejer_smooth(rho, K));
}

DiscreteAngleMeasure build_nu_k(const std::function<double(double)>& density, std::size_t K) {
  return measure_from(fejer_smooth(density, K));
}

std::complex<double> DiscreteAngleMeasure::fourier_coefficient(int m) const {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i)
    s += weights[i] * std::polar(1.0, -static_cast<double>(m) * thetas[i]);
  return s / kTwoPi;
}

double DiscreteAngleMeasure::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) s += weights[i] * f(thetas[i]);
  return s;
}

AngleMeasureReport DiscreteAngleMeasure::check(double tol) const {
  AngleMeasureReport r;
  double mass = 0.0, sc = 0.0;
  r.min_weight = weights.empty() ? 0.0 : weights[0];
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    mass += weights[i];
    sc += weights[i] * std::sin(thetas[i]) * std::cos(thetas[i]);
    r.min_weight = std::min(r.min_weight, weights[i]);
  }
  r.mass_error = std::abs(mass - 1.0);
  r.sincos_error = std::abs(sc);
  const int top = static_cast<int>(2 * K);
  for (int m = -top; m <= top; ++m)
    r.max_fourier_error = std::max(r.max_fourier_error, std::abs(fourier_coefficient(m) - smoothed.coefficient(m)));
  r.ok = r.min_weight >= 0.0 && r.mass_error <= tol && r.sincos_error <= tol && r.max_fourier_error <= tol;
  return r;
}

AngleDistribution DiscreteAngleMeasure::to_distribution() const {
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t i = 0; i < thetas.size(); ++i)
    if (weights[i] > 0.0) atoms.emplace_back(thetas[i], weights[i]);
  return AngleDistribution::atoms(std::move(atoms));
}

SphereQuadrature build_sphere_quadrature(std::size_t L, std::size_t K) {
  if (L < 2 || K < 2) throw InvalidInput("sphere quadrature needs L >= 2 and K >= 2");
  SphereQuadrature q;
  q.L = L;
  q.K = K;
  q.legendre = gauss_legendre(L);
  const double azimuth_weight = 1.0 / static_cast<double>(4 * K);
  for (std::size_t i = 0; i < L; ++i) {
    const double u = q.legendre.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (std::size_t j = 0; j < 2 * K; ++j) {
      const double phi = std::numbers::pi * static_cast<double>(j) / static_cast<double>(K);
      q.nodes.push_back({s * std::cos(phi), s * std::sin(phi), u});
      q.weights.push_back(q.legendre.weights[i] * azimuth_weight);
    }
  }
  return q;
}

double SphereQuadrature::polar_integral(const std::function<double(double)>& g) const {
  double s = 0.0;
  for (std::size_t i = 0; i < legendre.size(); ++i) s += legendre.weights[i] * g(std::acos(legendre.nodes[i]));
  return s;
}

SphereReport SphereQuadrature::check(double tol) const {
  SphereReport r;
  double mass = 0.0;
  double m[3][3] = {};
  r.min_weight = weights.empty() ? 0.0 : weights[0];
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    mass += weights[n];
    r.min_weight = std::min(r.min_weight, weights[n]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m[a][b] += weights[n] * nodes[n][a] * nodes[n][b];
  }
  r.mass_error = std::abs(mass - 1.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      r.second_moment_error = std::max(r.second_moment_error, std::abs(m[a][b] - (a == b ? 1.0 / 3.0 : 0.0)));
  r.ok = r.min_weight > 0.0 && r.mass_error <= tol && r.second_moment_error <= tol;
  return r;
}

AzimuthalSums azimuthal_sums(std::size_t K) {
  if (K < 1) throw InvalidInput("azimuthal count must be positive");
  AzimuthalSums s;
  const double step = std::numbers::pi / static_cast<double>(K);
  for (std::size_t j = 0; j < 2 * K; ++j) {
    const double phi = step * static_cast<double>(j);
    s.sin_cos += std::sin(phi) * std::cos(phi);
    s.sin2_scaled += std::sin(phi) * std::sin(phi) * step;
  }
  return s;
}

}  // namespace kac
