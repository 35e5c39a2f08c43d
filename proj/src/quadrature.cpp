#include "kacsim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kacsim/errors.hpp"

namespace kac {

std::pair<double, double> legendre_with_derivative(std::size_t n, double u) {
  double p0 = 1.0, p1 = u;
  if (n == 0) return {1.0, 0.0};
  for (std::size_t j = 2; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    const double p2 = ((2.0 * jd - 1.0) * u * p1 - (jd - 1.0) * p0) / jd;
    p0 = p1;
    p1 = p2;
  }
  const double nd = static_cast<double>(n);
  return {p1, nd * (u * p1 - p0) / (u * u - 1.0)};
}

QuadratureRule gauss_legendre(std::size_t n) {
  if (n < 1) throw InvalidInput("Gauss-Legendre order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    bool converged = false;
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre_with_derivative(n, z);
      const double step = p / d;
      z -= step;
      dp = d;
      if (std::abs(step) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("Legendre root iteration did not converge for order " + std::to_string(n));
    dp = legendre_with_derivative(n, z).second;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_hermite_thermal(std::size_t n) {
  if (n < 1) throw InvalidInput("Gauss-Hermite order must be positive");
  // Roots of the orthonormal Hermite functions for weight exp(-z^2).
  constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^{-1/4}
  const double nd = static_cast<double>(n);
  std::vector<double> x(n), w(n);
  double z = 0.0;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(nd, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double p1 = kPiQuarterInv, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double jd = static_cast<double>(j);
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("Hermite root iteration did not converge for order " + std::to_string(n));
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  // exp(-z^2) dz with z = sqrt(pi) x becomes sqrt(pi) exp(-pi x^2) dx.
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = x[n - 1 - i] / sqrt_pi;
    rule.weights[i] = w[n - 1 - i] / sqrt_pi;
  }
  return rule;
}

double tensor_integrate(const QuadratureRule& rule, std::size_t dim,
                        const std::function<double(std::span<const double>)>& f) {
  if (dim == 0) {
    return f(std::span<const double>());
  }
  const std::size_t n = rule.size();
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> point(dim, rule.nodes[0]);
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t a = 0; a < dim; ++a) w *= rule.weights[idx[a]];
    total += w * f(point);
    std::size_t a = 0;
    while (a < dim) {
      if (++idx[a] < n) {
        point[a] = rule.nodes[idx[a]];
        break;
      }
      idx[a] = 0;
      point[a] = rule.nodes[0];
      ++a;
    }
    if (a == dim) break;
  }
  return total;
}

}  // namespace kac
