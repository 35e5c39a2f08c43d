#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kacsim/bl_datum.hpp"
#include "kacsim/quadrature.hpp"

namespace kac {

// Gaussian-weighted integrals use the probability measure exp(-pi |x|^2) dx.

struct TestFunction1D {
  std::string name;
  std::function<double(double)> f;
  bool positive = true;

  double operator()(double x) const { return f(x); }
};

// N_t h(x) = int h(e^{-t} x + sqrt(1 - e^{-2t}) y) exp(-pi y^2) dy, evaluated
// with a Gauss-Hermite rule of the given order (at least 64).
TestFunction1D ou_apply(const TestFunction1D& h, double t, std::size_t order = 96);

double gaussian_mean(const TestFunction1D& h, const QuadratureRule& rule);
// int h log h; zero values contribute 0, negative values throw.
double entropy_functional(const TestFunction1D& h, const QuadratureRule& rule);
double lp_norm(const TestFunction1D& h, double p, const QuadratureRule& rule);

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

// Margins are computed at two quadrature orders (n and 2n). The verdict is
// Inconclusive if they differ by more than `agreement`, otherwise Pass iff the
// finer margin is >= -tolerance.
struct Margin {
  double coarse = 0.0;
  double fine = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> warnings;
  double value() const { return fine; }
};

Margin make_margin(double coarse, double fine, double tolerance = 1e-8, double agreement = 1e-6);

// e^{-2t} S(h) + (1 - e^{-2t}) |h|_1 log |h|_1 - S(N_t h).
Margin entropic_nelson_check(const TestFunction1D& h, double t, std::size_t order = 64);

struct NormContraction {
  double p = 1.0, q = 1.0, t = 0.0;
  double lhs = 0.0;  // |N_t h|_q
  double rhs = 0.0;  // |h|_p
  bool admissible = false;  // (p - 1) >= e^{-2t} (q - 1)
};
NormContraction nelson_norm_check(const TestFunction1D& h, double p, double q, double t, std::size_t order = 96);

// Positive polynomial a0 + sum_j (alpha_j . x + beta_j)^2 on R^dim.
struct PositiveQuadratic {
  std::size_t dim = 1;
  double a0 = 1.0;
  std::vector<Eigen::VectorXd> alpha;
  std::vector<double> beta;

  double operator()(std::span<const double> x) const;
  // Closed form of the Gaussian average.
  double gaussian_mean() const;

  static PositiveQuadratic constant(std::size_t dim, double value);
  // a0 in [0.2, 1.2], two squares with coefficients in [-1, 1].
  static PositiveQuadratic random(std::size_t dim, std::uint64_t seed);
};

using PositiveFamily = std::vector<PositiveQuadratic>;

// Ambient dimension is capped at 3.
//   prod (int f_i)^{c_i} - int prod f_i^{c_i}(B_i v)
Margin bl_inequality_check(const BLDatum& datum, const PositiveFamily& f, std::size_t order = 32);

//   S(h) - sum c_i [ int h log f_i(B_i v) - log int f_i ]
// h is normalized internally to Gaussian mean 1. Values of f_i below 1e-300
// are floored there with a warning.
Margin entropy_dual_check(const BLDatum& datum, const PositiveFamily& f,
                          const std::function<double(std::span<const double>)>& h, std::size_t order = 32);

// Lebesgue-normalized profile (a0 + sum_j (alpha_j . u + beta_j)^2) exp(-|u - center|^2 / (2 sigma^2)).
// Its heat flow with kernel (4 pi t)^{-d/2} exp(-|x|^2 / 4t) has a closed form.
struct HeatProfile {
  PositiveQuadratic poly;
  Eigen::VectorXd center;
  double sigma = 1.0;

  // Value after heat flow for time t (t = 0 gives the profile itself).
  double at(std::span<const double> u, double t) const;
  // Lebesgue integral, invariant under the flow.
  double mass() const;
};

struct HeatFlowRow {
  double t = 0.0;
  double lhs = 0.0;
  double lhs_fine = 0.0;
  double derivative = 0.0;  // forward difference, relative to rhs
};

struct HeatFlowReport {
  std::vector<HeatFlowRow> rows;
  double rhs = 0.0;
  double min_derivative = 0.0;
  double limit_relative_gap = 0.0;  // |lhs(T) - rhs| / rhs
  double max_order_gap = 0.0;
  bool monotone = false;
  bool limit_ok = false;
  Verdict verdict = Verdict::Inconclusive;
};

// Lebesgue form int prod f_i^{c_i}(B_i v, t) dv along the heat flow, for
// ambient dimension <= 2. Monotone iff every forward difference divided by
// rhs is >= -1e-6; the final time must bring lhs within 2% of rhs.
HeatFlowReport heat_flow_monotonicity_check(const BLDatum& datum, const std::vector<HeatProfile>& f,
                                            const std::vector<double>& t_grid, std::size_t order = 48);

struct ScoreEntry {
  std::string group;
  std::string name;
  double margin = 0.0;
  double margin_coarse = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

struct Scoreboard {
  std::vector<ScoreEntry> entries;
  std::size_t passed = 0, failed = 0, inconclusive = 0;
  bool all_pass() const { return failed == 0 && inconclusive == 0; }
  void add(ScoreEntry e);
};

// The twenty one-dimensional fixtures used for the Nelson checks.
std::vector<TestFunction1D> nelson_fixtures();

// Runs the fixture suite: Nelson margins, Brascamp-Lieb and dual margins on
// enumerated data, and the heat-flow monotonicity table.
Scoreboard run_inequality_suite(std::uint64_t seed = 1);

}  // namespace kac
