#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kacsim/entropy.hpp"
#include "kacsim/errors.hpp"
#include "kacsim/kdtree.hpp"
#include "kacsim/moments.hpp"
#include "oracles.hpp"

using namespace kac;
using std::numbers::pi;

namespace {

SampleCloud gaussian_cloud(std::size_t n, std::size_t dim, double s, std::uint64_t seed, double shift = 0.0) {
  auto rng = RngStream::for_stream(seed, 0);
  SampleCloud c;
  c.dim = dim;
  c.points.resize(n * dim);
  for (auto& x : c.points) x = shift + std::sqrt(s) * rng.normal();
  return c;
}

}  // namespace

TEST_CASE("k-d tree neighbor distances match brute force") {
  auto rng = RngStream::for_stream(4, 0);
  for (std::size_t dim : {1u, 2u, 3u}) {
    const std::size_t n = 700;
    std::vector<double> pts(n * dim);
    for (auto& x : pts) x = rng.normal();
    const KdTree tree(pts, dim);
    for (std::size_t i = 0; i < n; i += 37) {
      std::vector<double> d;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double s = 0.0;
        for (std::size_t a = 0; a < dim; ++a) s += (pts[i * dim + a] - pts[j * dim + a]) * (pts[i * dim + a] - pts[j * dim + a]);
        d.push_back(std::sqrt(s));
      }
      std::sort(d.begin(), d.end());
      for (std::size_t k : {1u, 4u, 9u}) CHECK(tree.kth_neighbor_distance(i, k) == doctest::Approx(d[k - 1]).epsilon(1e-14));
    }
  }
}

TEST_CASE("nearest-neighbor entropy of Gaussian samples") {
  for (std::size_t dim : {1u, 2u, 3u}) {
    CAPTURE(dim);
    const double s = 0.2;
    const auto cloud = gaussian_cloud(20000, dim, s, 10 + dim);
    const auto h = knn_differential_entropy(cloud);
    const double exact = 0.5 * static_cast<double>(dim) * std::log(2 * pi * std::numbers::e * s);
    CHECK(h.std_error > 0.0);
    CHECK(std::abs(h.value - exact) <= 4 * h.std_error + 0.02 * static_cast<double>(dim));
  }
}

TEST_CASE("relative entropy to the thermal state") {
  // Thermal samples: zero relative entropy.
  const auto thermal = gaussian_cloud(20000, 2, kThermalVariance, 3);
  const auto e0 = relative_entropy_to_thermal(thermal);
  CHECK(std::abs(e0.value) <= 4 * e0.std_error + 0.04);

  // Variance 1/pi in two coordinates: 1 - log 2.
  const auto hot = gaussian_cloud(20000, 2, 1.0 / pi, 4);
  const auto e1 = relative_entropy_to_thermal(hot);
  CHECK(std::abs(e1.value - (1.0 - std::log(2.0))) <= 4 * e1.std_error + 0.04);
  CHECK(e1.estimator == "knn");
  CHECK(e1.n == 20000);

  const auto hist = relative_entropy_histogram(gaussian_cloud(50000, 1, 1.0 / pi, 5));
  CHECK(std::abs(hist.value - 0.5 * (1.0 - std::log(2.0))) <= 4 * hist.std_error + 0.02);
}

TEST_CASE("closed-form initial entropy") {
  const GeneratorParams p{2, 8, 1, 1, 1, 1};
  CHECK(gaussian_initial_entropy(InitialCondition::gaussian_product(1.0 / pi), p) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-14));
  CHECK(gaussian_initial_entropy(InitialCondition::thermal(), p) == doctest::Approx(0.0));
  const GeneratorParams p1{1, 3, 1, 1, 1, 1};
  const auto shifted = InitialCondition::shifted_gaussian(0.3, {0.7});
  CHECK(gaussian_initial_entropy(shifted, p1) == doctest::Approx(oracle::gaussian_kl_quadrature(0.3, 0.7)).epsilon(1e-9));
  CHECK(gaussian_initial_entropy(shifted, p1) == doctest::Approx(oracle::gaussian_kl(1, 0.3, 0.49)).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_initial_entropy(InitialCondition::custom([](RngStream&, std::span<double>) {}), p),
                  InvalidInput);
}

TEST_CASE("duplicate samples are jittered with a warning") {
  SampleCloud c = gaussian_cloud(500, 1, 1.0, 6);
  for (std::size_t i = 0; i < 50; ++i) c.points[i] = c.points[0];
  const auto h = knn_differential_entropy(c);
  CHECK(std::isfinite(h.value));
  CHECK_FALSE(h.warnings.empty());
}

TEST_CASE("sample cloud validation") {
  SampleCloud c;
  c.dim = 2;
  c.points = {1.0, 2.0};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.points = {1.0, 2.0, std::nan(""), 0.0};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  SampleCloud d = gaussian_cloud(10, 2, 1.0, 1);
  CHECK_THROWS_AS(histogram_differential_entropy(d), InvalidInput);
}

TEST_CASE("decay check applies the bound row by row") {
  const GeneratorParams p{2, 8, 1, 1, 1, 1};
  const auto u = AngleDistribution::uniform();
  const double s0 = 1.0 - std::log(2.0);
  std::vector<double> grid{0.0, 1.0, 4.0};
  std::vector<EntropyEstimate> est(3);
  for (std::size_t i = 0; i < 3; ++i) {
    est[i].value = envelope(grid[i], p, u) * s0;
    est[i].std_error = 0.01;
  }
  auto rep = decay_check(grid, est, s0, p, u, default_bias_margin(p));
  CHECK(rep.all_pass);
  CHECK(default_bias_margin(p) == doctest::Approx(0.04));
  est[2].value += 0.03 + 0.04 + 0.001;
  rep = decay_check(grid, est, s0, p, u, default_bias_margin(p));
  CHECK_FALSE(rep.all_pass);
  CHECK(rep.rows[0].pass);
  CHECK_FALSE(rep.rows[2].pass);
  const GeneratorParams small{3, 1, 1, 1, 1, 1};
  CHECK_FALSE(decay_check(grid, est, s0, small, u, 0.0).warnings.empty());
}
