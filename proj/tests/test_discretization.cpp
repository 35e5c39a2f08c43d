#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "kacsim/discretization.hpp"
#include "kacsim/errors.hpp"

using namespace kac;
using std::numbers::pi;

namespace {

AngleDistribution one_plus_cos() { return AngleDistribution(AngleDistribution::Trigonometric{{1.0}, {}}); }
AngleDistribution three_mode() {
  return AngleDistribution(AngleDistribution::Trigonometric{{0.0, 0.5, 0.3}, {}});
}

}  // namespace

TEST_CASE("uniform law discretizes to equal weights") {
  for (std::size_t K = 1; K <= 6; ++K) {
    const auto nu = build_nu_k(AngleDistribution::uniform(), K);
    REQUIRE(nu.weights.size() == 4 * K + 1);
    for (double w : nu.weights) CHECK(w == doctest::Approx(1.0 / static_cast<double>(4 * K + 1)).epsilon(1e-13));
    CHECK(nu.integrate([](double t) { return std::sin(t) * std::sin(t); }) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(nu.thetas.front() + 2 * pi * (2.0 * K) / (4 * K + 1.0)) < 1e-15);
  }
}

TEST_CASE("Fejer-smoothed first coefficient") {
  for (std::size_t K = 1; K <= 8; ++K) {
    const auto nu = build_nu_k(one_plus_cos(), K);
    const double expected = (1.0 / (4 * pi)) * (1.0 - 1.0 / (2.0 * K + 1.0));
    CHECK(std::abs(nu.smoothed.coefficient(1).real() - expected) < 1e-14);
    CHECK(std::abs(nu.fourier_coefficient(1) - std::complex<double>(expected, 0.0)) < 1e-13);
    CHECK(std::abs(nu.smoothed.coefficient(-1) - std::conj(nu.smoothed.coefficient(1))) < 1e-16);
  }
}

TEST_CASE("discrete angle measure invariants") {
  for (const auto& rho : {one_plus_cos(), three_mode()}) {
    for (std::size_t K = 1; K <= 8; ++K) {
      CAPTURE(K);
      const auto nu = build_nu_k(rho, K);
      const auto rep = nu.check();
      CHECK(rep.ok);
      CHECK(rep.mass_error <= 1e-12);
      CHECK(rep.sincos_error <= 1e-12);
      CHECK(rep.max_fourier_error <= 1e-12);
      CHECK(rep.min_weight >= 0.0);
      const double mass = std::accumulate(nu.weights.begin(), nu.weights.end(), 0.0);
      CHECK(std::abs(mass - 1.0) <= 1e-12);
      const auto d = nu.to_distribution();
      CHECK(d.is_atomic());
      CHECK(std::abs(d.sincos_moment()) <= 1e-12);
    }
  }
}

TEST_CASE("density overload agrees with the exact coefficients") {
  const auto rho = three_mode();
  const auto a = build_nu_k(rho, 5);
  const auto b = build_nu_k([&](double t) { return rho.density(t); }, 5);
  for (std::size_t i = 0; i < a.weights.size(); ++i) CHECK(std::abs(a.weights[i] - b.weights[i]) < 1e-13);
}

TEST_CASE("second moment converges weakly") {
  // sin^2 under nu_K is 1/2 - c2/4 (1 - 2/(2K+1)) for a cos(2 theta) mode c2.
  const double c2 = 0.5;
  const double exact = 0.5 - c2 / 4.0;
  double prev = 1.0;
  for (std::size_t K = 1; K <= 32; K *= 2) {
    const auto nu = build_nu_k(three_mode(), K);
    const double s = nu.integrate([](double t) { return std::sin(t) * std::sin(t); });
    CHECK(std::abs(s - (0.5 - c2 / 4.0 * (1.0 - 2.0 / (2.0 * K + 1.0)))) < 1e-12);
    const double err = std::abs(s - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.005);
}

TEST_CASE("sphere quadrature invariants") {
  for (std::size_t L = 2; L <= 8; ++L) {
    for (std::size_t K = 2; K <= 8; ++K) {
      CAPTURE(L);
      CAPTURE(K);
      const auto q = build_sphere_quadrature(L, K);
      REQUIRE(q.nodes.size() == 2 * K * L);
      const auto rep = q.check();
      CHECK(rep.ok);
      CHECK(rep.mass_error <= 1e-12);
      CHECK(rep.second_moment_error <= 1e-12);
      for (const auto& n : q.nodes) CHECK(std::abs(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0) < 1e-14);
      CHECK(std::abs(q.polar_integral([](double t) { return std::cos(t) * std::cos(t); }) - 2.0 / 3.0) < 1e-12);
      CHECK(std::abs(q.polar_integral([](double t) { return std::sin(t) * std::sin(t); }) - 4.0 / 3.0) < 1e-12);
      const auto az = azimuthal_sums(K);
      CHECK(std::abs(az.sin_cos) < 1e-12);
      CHECK(std::abs(az.sin2_scaled - pi) < 1e-12);
    }
  }
}

TEST_CASE("discretization input validation") {
  CHECK_THROWS_AS(build_nu_k(AngleDistribution::uniform(), 0), InvalidInput);
  CHECK_THROWS_AS(build_sphere_quadrature(1, 4), InvalidInput);
  CHECK_THROWS_AS(build_sphere_quadrature(4, 1), InvalidInput);
}
