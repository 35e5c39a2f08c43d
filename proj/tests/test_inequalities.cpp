#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kacsim/errors.hpp"
#include "kacsim/inequalities.hpp"
#include "kacsim/rotation_words.hpp"
#include "oracles.hpp"

using namespace kac;
using std::numbers::pi;

namespace {

TestFunction1D fn(std::string name, std::function<double(double)> f) { return {std::move(name), std::move(f), true}; }

BLDatum identity_datum(std::size_t dim) {
  return {dim, {{Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)), 1.0}}};
}

// Coordinate projections of R^2 with unit weights.
BLDatum coordinate_datum() {
  Eigen::MatrixXd e1(1, 2), e2(1, 2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  return {2, {{e1, 1.0}, {e2, 1.0}}};
}

BLDatum rotated_datum() {
  const GeneratorParams p{2, 2, 1, 1, 1, 1};
  return build_bl_datum(1, p, {{pi / 2, -pi / 2, 0.9, -0.9}, {}, {0.3, 0.3, 0.2, 0.2}});
}

}  // namespace

TEST_CASE("Ornstein-Uhlenbeck semigroup") {
  const auto h = fn("bump", [](double x) { return 1.0 + x * x + 0.2 * x * x * x * x; });
  const auto h0 = ou_apply(h, 0.0);
  for (double x : {-1.3, 0.0, 2.0}) CHECK(h0(x) == h(x));

  const auto lin = ou_apply(fn("x", [](double x) { return x; }), 0.7);
  for (double x : {-1.3, 0.5, 2.0}) CHECK(lin(x) == doctest::Approx(std::exp(-0.7) * x).epsilon(1e-13));

  const auto rule = gauss_hermite_thermal(96);
  for (double t : {0.1, 1.0, 5.0}) CHECK(std::abs(gaussian_mean(ou_apply(h, t), rule) - gaussian_mean(h, rule)) < 1e-10);
  CHECK_THROWS_AS(ou_apply(h, 0.5, 32), InvalidInput);
}

TEST_CASE("entropic Nelson margins") {
  const auto one = fn("one", [](double) { return 1.0; });
  const auto m0 = entropic_nelson_check(one, 0.5);
  CHECK(std::abs(m0.value()) < 1e-13);
  CHECK(m0.verdict == Verdict::Pass);

  const auto c = fn("c", [](double) { return 2.5; });
  CHECK(std::abs(entropic_nelson_check(c, 1.0).value()) < 1e-12);

  const auto bump = fn("bump", [](double x) { return 1.0 + x * x; });
  const auto m = entropic_nelson_check(bump, 0.5);
  CHECK(m.value() > 0.0);
  CHECK(m.verdict == Verdict::Pass);

  // Near equilibrium the margin closes.
  CHECK(std::abs(entropic_nelson_check(bump, 20.0).value()) < 1e-6);
}

TEST_CASE("hypercontractive norm bound on the admissible grid") {
  const auto h = fn("h", [](double x) { return 1.0 + 0.5 * x * x + 0.1 * std::pow(x, 4); });
  const auto constant = nelson_norm_check(fn("c", [](double) { return 3.0; }), 2.0, 4.0, 1.0);
  CHECK(constant.lhs == doctest::Approx(constant.rhs).epsilon(1e-12));
  for (double p : {1.5, 2.0, 3.0}) {
    for (double t : {0.1, 0.5, 1.0}) {
      const double q = 1.0 + (p - 1.0) * std::exp(2.0 * t);
      const auto r = nelson_norm_check(h, p, q, t);
      CHECK(r.admissible);
      CHECK(r.lhs <= r.rhs * (1.0 + 1e-10));
    }
  }
  CHECK_FALSE(nelson_norm_check(h, 2.0, 10.0, 0.1).admissible);
}

TEST_CASE("Brascamp-Lieb margins on simple data") {
  const auto coords = coordinate_datum();
  // f = 1 gives equality.
  const PositiveFamily ones{PositiveQuadratic::constant(1, 1.0), PositiveQuadratic::constant(1, 1.0)};
  CHECK(std::abs(bl_inequality_check(coords, ones).value()) < 1e-13);

  // Product functions on coordinate projections: Fubini equality.
  const PositiveFamily f{PositiveQuadratic::random(1, 3), PositiveQuadratic::random(1, 4)};
  CHECK(std::abs(bl_inequality_check(coords, f).value()) < 1e-12);

  // Identity datum: equality for any f.
  const auto id = identity_datum(2);
  CHECK(std::abs(bl_inequality_check(id, {PositiveQuadratic::random(2, 5)}).value()) < 1e-12);

  const auto d = rotated_datum();
  REQUIRE(d.check().ok(1e-10));
  PositiveFamily g;
  for (std::size_t i = 0; i < d.terms.size(); ++i) g.push_back(PositiveQuadratic::random(d.terms[i].range_dim(), 10 + i));
  const auto m = bl_inequality_check(d, g);
  CHECK(m.verdict == Verdict::Pass);
}

TEST_CASE("entropy dual margins") {
  const auto coords = coordinate_datum();
  const PositiveFamily f{PositiveQuadratic::random(1, 6), PositiveQuadratic::random(1, 7)};
  // h equal to the product of the factors: dual equality.
  const auto h = [&](std::span<const double> v) { return f[0](v.subspan(0, 1)) * f[1](v.subspan(1, 1)); };
  CHECK(std::abs(entropy_dual_check(coords, f, h).value()) < 1e-10);

  // Thermal h: Jensen gives a nonnegative margin.
  const auto d = rotated_datum();
  PositiveFamily g;
  for (std::size_t i = 0; i < d.terms.size(); ++i) g.push_back(PositiveQuadratic::random(d.terms[i].range_dim(), 20 + i));
  const auto m = entropy_dual_check(d, g, [](std::span<const double>) { return 1.0; });
  CHECK(m.value() >= -1e-12);
  CHECK(m.verdict == Verdict::Pass);
}

TEST_CASE("positive quadratic Gaussian mean") {
  const auto q = PositiveQuadratic::random(2, 11);
  const auto rule = gauss_hermite_thermal(6);
  const double e = tensor_integrate(rule, 2, [&](std::span<const double> x) { return q(x); });
  CHECK(q.gaussian_mean() == doctest::Approx(e).epsilon(1e-13));
  CHECK(q.a0 >= 0.2);
  CHECK(q.a0 <= 1.2);
}

TEST_CASE("heat profiles") {
  HeatProfile hp{PositiveQuadratic::random(2, 2), Eigen::Vector2d(0.3, -0.2), 0.7};
  // Mass is invariant under the flow.
  const auto rule = gauss_legendre(200);
  for (double t : {0.0, 0.3, 2.0}) {
    const double half = 2.0 + 12.0 * std::sqrt(0.49 + 2.0 * t);
    double mass = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      for (std::size_t j = 0; j < rule.size(); ++j) {
        const double u[2] = {half * rule.nodes[i], half * rule.nodes[j]};
        mass += rule.weights[i] * rule.weights[j] * half * half * hp.at(u, t);
      }
    CHECK(mass == doctest::Approx(hp.mass()).epsilon(1e-10));
  }

  // Constant polynomial factor: explicit Gaussian convolution.
  HeatProfile g{PositiveQuadratic::constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.4), 0.8};
  const double u[1] = {1.1};
  const double s = 0.64 + 2.0 * 0.5;
  CHECK(g.at(u, 0.5) == doctest::Approx(std::sqrt(0.64 / s) * std::exp(-0.49 / (2 * s))).epsilon(1e-14));
}

TEST_CASE("heat flow along a rotation datum") {
  const auto d = rotated_datum();
  REQUIRE(d.dim == 2);
  const std::vector<double> grid{0.01, 0.1, 0.5, 1.0, 5.0, 20.0, 50.0};

  // Gaussian profiles: compare with the closed-form Gaussian integral.
  std::vector<HeatProfile> f;
  std::vector<oracle::GaussFactor> base;
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    const auto n = static_cast<Eigen::Index>(d.terms[i].range_dim());
    f.push_back({PositiveQuadratic::constant(static_cast<std::size_t>(n), 1.0), Eigen::VectorXd::Constant(n, 0.05 * static_cast<double>(i % 4)), 0.6});
  }
  const auto rep = heat_flow_monotonicity_check(d, f, grid);
  CHECK(rep.monotone);
  CHECK(rep.limit_ok);
  CHECK(rep.verdict == Verdict::Pass);
  REQUIRE(rep.rows.size() == grid.size());
  for (std::size_t r = 0; r < grid.size(); ++r) {
    std::vector<oracle::GaussFactor> gf;
    for (std::size_t i = 0; i < d.terms.size(); ++i) {
      const double s = 0.36 + 2.0 * grid[r];
      const double dim_i = static_cast<double>(d.terms[i].range_dim());
      gf.push_back({d.terms[i].B, f[i].center, s, std::pow(0.36 / s, 0.5 * dim_i), d.terms[i].c});
    }
    CHECK(rep.rows[r].lhs == doctest::Approx(oracle::gaussian_product_integral(gf, 2)).epsilon(1e-9));
  }

  // Polynomial profiles are monotone too.
  std::vector<HeatProfile> wide;
  for (const auto& t : d.terms)
    wide.push_back({PositiveQuadratic::random(t.range_dim(), 40), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.range_dim())), 0.8});
  const auto rw = heat_flow_monotonicity_check(d, wide, grid);
  CHECK(rw.monotone);
  CHECK(rw.min_derivative >= -1e-6);
}

TEST_CASE("fixture suite") {
  CHECK(nelson_fixtures().size() == 20);
  const auto board = run_inequality_suite(1);
  for (const auto& e : board.entries) {
    CAPTURE(e.group);
    CAPTURE(e.name);
    CHECK(e.verdict == Verdict::Pass);
  }
  CHECK(board.all_pass());
}
