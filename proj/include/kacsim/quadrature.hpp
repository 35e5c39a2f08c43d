#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kac {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n (cap of 100
// iterations per root, throws NumericalError otherwise). Roots ascending.
QuadratureRule gauss_legendre(std::size_t n);

// Legendre polynomial value and derivative at u.
std::pair<double, double> legendre_with_derivative(std::size_t n, double u);

// Gauss-Hermite rule for the probability measure exp(-pi x^2) dx; the
// weights sum to 1. Exact for polynomials of degree <= 2n - 1.
QuadratureRule gauss_hermite_thermal(std::size_t n);

// Integral over R^dim of f against exp(-pi |x|^2) dx using the tensor rule.
double tensor_integrate(const QuadratureRule& rule, std::size_t dim,
                        const std::function<double(std::span<const double>)>& f);

}  // namespace kac
