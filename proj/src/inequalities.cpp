#include "kacsim/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "kacsim/discretization.hpp"
#include "kacsim/errors.hpp"
#include "kacsim/params.hpp"
#include "kacsim/rng.hpp"
#include "kacsim/rotation_words.hpp"

namespace kac {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLogFloor = 1e-300;

double safe_log(double x, bool& floored) {
  if (x < kLogFloor) {
    floored = true;
    return std::log(kLogFloor);
  }
  return std::log(x);
}

void check_family(const BLDatum& datum, std::size_t n_functions, std::size_t max_dim) {
  if (datum.dim == 0 || datum.dim > max_dim)
    throw InvalidInput("ambient dimension must be between 1 and " + std::to_string(max_dim));
  if (n_functions != datum.terms.size()) throw InvalidInput("need one function per datum term");
}

// Scratch buffers holding B_i v for every term.
struct Projector {
  const BLDatum& datum;
  std::vector<VectorXd> images;

  explicit Projector(const BLDatum& d) : datum(d) {
    for (const auto& t : d.terms) images.emplace_back(t.B.rows());
  }
  void project(std::span<const double> v) {
    const Eigen::Map<const VectorXd> vv(v.data(), static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < images.size(); ++i) images[i].noalias() = datum.terms[i].B * vv;
  }
  std::span<const double> image(std::size_t i) const {
    return {images[i].data(), static_cast<std::size_t>(images[i].size())};
  }
};

double bl_lhs(const BLDatum& datum, const PositiveFamily& f, std::size_t order) {
  Projector proj(datum);
  return tensor_integrate(gauss_hermite_thermal(order), datum.dim, [&](std::span<const double> v) {
    proj.project(v);
    double log_sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) log_sum += datum.terms[i].c * std::log(f[i](proj.image(i)));
    return std::exp(log_sum);
  });
}

struct DualParts {
  double value = 0.0;
  bool floored = false;
};

DualParts dual_margin(const BLDatum& datum, const PositiveFamily& f,
                      const std::function<double(std::span<const double>)>& h, std::size_t order) {
  const QuadratureRule rule = gauss_hermite_thermal(order);
  const double z = tensor_integrate(rule, datum.dim, h);
  if (!(z > 0.0) || !std::isfinite(z)) throw InvalidInput("h must have positive finite Gaussian mass");
  Projector proj(datum);
  DualParts out;
  const double entropy = tensor_integrate(rule, datum.dim, [&](std::span<const double> v) {
    const double hv = h(v) / z;
    if (hv < 0.0) throw InvalidInput("h must be nonnegative");
    return hv > 0.0 ? hv * std::log(hv) : 0.0;
  });
  const double cross = tensor_integrate(rule, datum.dim, [&](std::span<const double> v) {
    const double hv = h(v) / z;
    if (hv == 0.0) return 0.0;
    proj.project(v);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += datum.terms[i].c * safe_log(f[i](proj.image(i)), out.floored);
    return hv * s;
  });
  double log_means = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) log_means += datum.terms[i].c * std::log(f[i].gaussian_mean());
  out.value = entropy - (cross - log_means);
  return out;
}

struct HeatTerm {
  double c;
  const MatrixXd* B;
  const HeatProfile* f;
};

// Lebesgue integral of prod f_i^{c_i}(B_i v, t), splitting off the product of
// the Gaussian factors and integrating the rest against it.
double heat_lhs(const BLDatum& datum, const std::vector<HeatProfile>& f, double t, std::size_t order) {
  const Index m = static_cast<Index>(datum.dim);
  MatrixXd Q = MatrixXd::Zero(m, m);
  VectorXd b = VectorXd::Zero(m);
  double cc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& term = datum.terms[i];
    const double s = f[i].sigma * f[i].sigma + 2.0 * t;
    Q += term.c * term.B.transpose() * term.B / s;
    b += term.c * term.B.transpose() * f[i].center / s;
    cc += term.c * f[i].center.squaredNorm() / s;
  }
  Eigen::LLT<MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) throw NumericalError("heat-flow precision matrix is not positive definite");
  const VectorXd mu = llt.solve(b);
  const double log_k = -0.5 * (cc - mu.dot(b));
  const MatrixXd L = llt.matrixL();
  const MatrixXd T = L.transpose().triangularView<Eigen::Upper>().solve(MatrixXd::Identity(m, m));
  double log_det = 0.0;
  for (Index a = 0; a < m; ++a) log_det += 2.0 * std::log(L(a, a));

  // Standard normal rule from the thermal one.
  QuadratureRule rule = gauss_hermite_thermal(order);
  const double scale = std::sqrt(2.0 * std::numbers::pi);
  for (auto& x : rule.nodes) x *= scale;

  VectorXd v(m), u;
  const double expectation = tensor_integrate(rule, datum.dim, [&](std::span<const double> z) {
    const Eigen::Map<const VectorXd> zz(z.data(), m);
    v = mu + T * zz;
    double log_r = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      u = datum.terms[i].B * v;
      const auto& p = f[i];
      const double s2 = p.sigma * p.sigma;
      const std::size_t d = p.poly.dim;
      double pref = 1.0;
      double poly = p.poly.a0;
      if (t > 0.0) {
        const double vstar = 2.0 * t * s2 / (2.0 * t + s2);
        const VectorXd mm = (s2 * u + 2.0 * t * p.center) / (s2 + 2.0 * t);
        pref = std::pow(s2 / (s2 + 2.0 * t), 0.5 * static_cast<double>(d));
        for (std::size_t j = 0; j < p.poly.alpha.size(); ++j) {
          const double lin = p.poly.alpha[j].dot(mm) + p.poly.beta[j];
          poly += lin * lin + vstar * p.poly.alpha[j].squaredNorm();
        }
      } else {
        poly = p.poly(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
      }
      log_r += datum.terms[i].c * std::log(pref * poly);
    }
    return std::exp(log_r);
  });
  const double log_norm = 0.5 * static_cast<double>(m) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
  return std::exp(log_norm + log_k) * expectation;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

TestFunction1D ou_apply(const TestFunction1D& h, double t, std::size_t order) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("OU time must be finite and nonnegative");
  if (order < 64) throw InvalidInput("OU quadrature order must be at least 64");
  if (t == 0.0) return h;
  auto rule = std::make_shared<const QuadratureRule>(gauss_hermite_thermal(order));
  const double a = std::exp(-t);
  const double s = std::sqrt(-std::expm1(-2.0 * t));
  auto inner = h.f;
  TestFunction1D out;
  out.name = "N_t(" + h.name + ")";
  out.positive = h.positive;
  out.f = [rule, inner, a, s](double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule->size(); ++i) acc += rule->weights[i] * inner(a * x + s * rule->nodes[i]);
    if (!std::isfinite(acc)) throw NumericalError("OU quadrature overflow");
    return acc;
  };
  return out;
}

double gaussian_mean(const TestFunction1D& h, const QuadratureRule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * h(rule.nodes[i]);
  return s;
}

double entropy_functional(const TestFunction1D& h, const QuadratureRule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = h(rule.nodes[i]);
    if (v < 0.0) throw InvalidInput("entropy of a function with negative values");
    if (v > 0.0) s += rule.weights[i] * v * std::log(v);
  }
  return s;
}

double lp_norm(const TestFunction1D& h, double p, const QuadratureRule& rule) {
  if (!(p >= 1.0)) throw InvalidInput("L^p norm needs p >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * std::pow(std::abs(h(rule.nodes[i])), p);
  return std::pow(s, 1.0 / p);
}

Margin make_margin(double coarse, double fine, double tolerance, double agreement) {
  Margin m;
  m.coarse = coarse;
  m.fine = fine;
  if (!std::isfinite(coarse) || !std::isfinite(fine) || std::abs(coarse - fine) > agreement)
    m.verdict = Verdict::Inconclusive;
  else
    m.verdict = fine >= -tolerance ? Verdict::Pass : Verdict::Fail;
  return m;
}

Margin entropic_nelson_check(const TestFunction1D& h, double t, std::size_t order) {
  auto eval = [&](std::size_t n) {
    const QuadratureRule rule = gauss_hermite_thermal(n);
    const double decay = std::exp(-2.0 * t);
    const double norm1 = gaussian_mean(h, rule);
    const double s_h = entropy_functional(h, rule);
    const double s_nt = entropy_functional(ou_apply(h, t, std::max<std::size_t>(96, 3 * n / 2)), rule);
    const double mass_term = norm1 > 0.0 ? norm1 * std::log(norm1) : 0.0;
    return decay * s_h + (1.0 - decay) * mass_term - s_nt;
  };
  return make_margin(eval(order), eval(2 * order));
}

NormContraction nelson_norm_check(const TestFunction1D& h, double p, double q, double t, std::size_t order) {
  const QuadratureRule rule = gauss_hermite_thermal(order);
  NormContraction r;
  r.p = p;
  r.q = q;
  r.t = t;
  r.admissible = (p - 1.0) >= std::exp(-2.0 * t) * (q - 1.0);
  r.lhs = lp_norm(ou_apply(h, t, std::max<std::size_t>(order, 64)), q, rule);
  r.rhs = lp_norm(h, p, rule);
  return r;
}

double PositiveQuadratic::operator()(std::span<const double> x) const {
  double v = a0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    double lin = beta[j];
    for (std::size_t a = 0; a < dim; ++a) lin += alpha[j][static_cast<Index>(a)] * x[a];
    v += lin * lin;
  }
  return v;
}

double PositiveQuadratic::gaussian_mean() const {
  double v = a0;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    v += beta[j] * beta[j] + alpha[j].squaredNorm() / (2.0 * std::numbers::pi);
  return v;
}

PositiveQuadratic PositiveQuadratic::constant(std::size_t dim, double value) {
  PositiveQuadratic p;
  p.dim = dim;
  p.a0 = value;
  return p;
}

PositiveQuadratic PositiveQuadratic::random(std::size_t dim, std::uint64_t seed) {
  RngStream rng(seed);
  PositiveQuadratic p;
  p.dim = dim;
  p.a0 = 0.2 + rng.uniform();
  for (int j = 0; j < 2; ++j) {
    VectorXd a(static_cast<Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) a[static_cast<Index>(i)] = 2.0 * rng.uniform() - 1.0;
    p.alpha.push_back(a);
    p.beta.push_back(2.0 * rng.uniform() - 1.0);
  }
  return p;
}

Margin bl_inequality_check(const BLDatum& datum, const PositiveFamily& f, std::size_t order) {
  check_family(datum, f.size(), 3);
  double log_rhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].dim != datum.terms[i].range_dim()) throw InvalidInput("function dimension does not match its map");
    log_rhs += datum.terms[i].c * std::log(f[i].gaussian_mean());
  }
  const double rhs = std::exp(log_rhs);
  return make_margin(rhs - bl_lhs(datum, f, order), rhs - bl_lhs(datum, f, 2 * order));
}

Margin entropy_dual_check(const BLDatum& datum, const PositiveFamily& f,
                          const std::function<double(std::span<const double>)>& h, std::size_t order) {
  check_family(datum, f.size(), 3);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i].dim != datum.terms[i].range_dim()) throw InvalidInput("function dimension does not match its map");
  const DualParts coarse = dual_margin(datum, f, h, order);
  const DualParts fine = dual_margin(datum, f, h, 2 * order);
  Margin m = make_margin(coarse.value, fine.value);
  if (coarse.floored || fine.floored) m.warnings.push_back("log argument floored at 1e-300");
  return m;
}

double HeatProfile::at(std::span<const double> u, double t) const {
  const std::size_t d = poly.dim;
  const double s2 = sigma * sigma;
  const Eigen::Map<const VectorXd> uu(u.data(), static_cast<Index>(d));
  const double s = s2 + 2.0 * t;
  const double gauss = std::exp(-(uu - center).squaredNorm() / (2.0 * s));
  if (t == 0.0) return poly(u) * gauss;
  const double vstar = 2.0 * t * s2 / s;
  const VectorXd mm = (s2 * uu + 2.0 * t * center) / s;
  double p = poly.a0;
  for (std::size_t j = 0; j < poly.alpha.size(); ++j) {
    const double lin = poly.alpha[j].dot(mm) + poly.beta[j];
    p += lin * lin + vstar * poly.alpha[j].squaredNorm();
  }
  return std::pow(s2 / s, 0.5 * static_cast<double>(d)) * gauss * p;
}

double HeatProfile::mass() const {
  const double s2 = sigma * sigma;
  double p = poly.a0;
  for (std::size_t j = 0; j < poly.alpha.size(); ++j) {
    const double lin = poly.alpha[j].dot(center) + poly.beta[j];
    p += lin * lin + s2 * poly.alpha[j].squaredNorm();
  }
  return std::pow(2.0 * std::numbers::pi * s2, 0.5 * static_cast<double>(poly.dim)) * p;
}

HeatFlowReport heat_flow_monotonicity_check(const BLDatum& datum, const std::vector<HeatProfile>& f,
                                            const std::vector<double>& t_grid, std::size_t order) {
  check_family(datum, f.size(), 2);
  if (t_grid.empty()) throw InvalidInput("empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && t_grid[i] <= t_grid[i - 1]))
      throw InvalidInput("time grid must be positive and increasing");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].poly.dim != datum.terms[i].range_dim() || static_cast<std::size_t>(f[i].center.size()) != f[i].poly.dim)
      throw InvalidInput("profile dimension does not match its map");
    if (!(f[i].sigma > 0.0)) throw InvalidInput("profile width must be positive");
  }
  HeatFlowReport r;
  double log_rhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) log_rhs += datum.terms[i].c * std::log(f[i].mass());
  r.rhs = std::exp(log_rhs);
  for (double t : t_grid) {
    HeatFlowRow row;
    row.t = t;
    row.lhs = heat_lhs(datum, f, t, order);
    row.lhs_fine = heat_lhs(datum, f, t, 2 * order);
    r.max_order_gap = std::max(r.max_order_gap, std::abs(row.lhs - row.lhs_fine) / r.rhs);
    r.rows.push_back(row);
  }
  r.min_derivative = 0.0;
  for (std::size_t i = 0; i + 1 < r.rows.size(); ++i) {
    auto& row = r.rows[i];
    row.derivative = (r.rows[i + 1].lhs_fine - row.lhs_fine) / ((r.rows[i + 1].t - row.t) * r.rhs);
    r.min_derivative = i == 0 ? row.derivative : std::min(r.min_derivative, row.derivative);
  }
  r.monotone = r.min_derivative >= -1e-6;
  r.limit_relative_gap = std::abs(r.rows.back().lhs_fine - r.rhs) / r.rhs;
  r.limit_ok = r.limit_relative_gap <= 0.02;
  if (r.max_order_gap > 1e-6)
    r.verdict = Verdict::Inconclusive;
  else
    r.verdict = r.monotone && r.limit_ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

void Scoreboard::add(ScoreEntry e) {
  switch (e.verdict) {
    case Verdict::Pass: ++passed; break;
    case Verdict::Fail: ++failed; break;
    case Verdict::Inconclusive: ++inconclusive; break;
  }
  entries.push_back(std::move(e));
}

std::vector<TestFunction1D> nelson_fixtures() {
  auto fx = [](std::string name, std::function<double(double)> f) { return TestFunction1D{std::move(name), std::move(f), true}; };
  return {
      fx("one", [](double) { return 1.0; }),
      fx("constant_2.5", [](double) { return 2.5; }),
      fx("1+x^2", [](double x) { return 1.0 + x * x; }),
      fx("0.2+x^2", [](double x) { return 0.2 + x * x; }),
      fx("(x-0.5)^2+0.1", [](double x) { return (x - 0.5) * (x - 0.5) + 0.1; }),
      fx("1+x^4", [](double x) { return 1.0 + x * x * x * x; }),
      fx("0.5+(x^2-0.3)^2", [](double x) { return 0.5 + (x * x - 0.3) * (x * x - 0.3); }),
      fx("1+0.9cos2x", [](double x) { return 1.0 + 0.9 * std::cos(2.0 * x); }),
      fx("1+0.5sin3x", [](double x) { return 1.0 + 0.5 * std::sin(3.0 * x); }),
      fx("2+sinx+0.5cos5x", [](double x) { return 2.0 + std::sin(x) + 0.5 * std::cos(5.0 * x); }),
      fx("1+0.8tanhx", [](double x) { return 1.0 + 0.8 * std::tanh(x); }),
      fx("1/(1+x^2)", [](double x) { return 1.0 / (1.0 + x * x); }),
      fx("exp(sinx)", [](double x) { return std::exp(std::sin(x)); }),
      fx("1+3x^2+x^6", [](double x) { return 1.0 + 3.0 * x * x + std::pow(x, 6); }),
      fx("logistic3x+0.05", [](double x) { return 1.0 / (1.0 + std::exp(-3.0 * x)) + 0.05; }),
      fx("3+2cosxcos2x", [](double x) { return 3.0 + 2.0 * std::cos(x) * std::cos(2.0 * x); }),
      fx("(1+x^2)^1.5", [](double x) { return std::pow(1.0 + x * x, 1.5); }),
      fx("0.1+x^2exp(-x^2)", [](double x) { return 0.1 + x * x * std::exp(-x * x); }),
      fx("1+5exp(-4(x-1)^2)", [](double x) { return 1.0 + 5.0 * std::exp(-4.0 * (x - 1.0) * (x - 1.0)); }),
      fx("1+0.3x^3+x^4", [](double x) { return 1.0 + 0.3 * x * x * x + x * x * x * x; }),
  };
}

namespace {

struct NamedDatum {
  std::string name;
  BLDatum datum;
};

std::vector<NamedDatum> suite_data() {
  GeneratorParams p1{2, 2, 1.0, 1.0, 1.0, 1};
  GeneratorParams p2{2, 1, 1.0, 1.0, 1.0, 1};
  GeneratorParams p3{3, 1, 1.0, 1.0, 1.0, 1};
  GeneratorParams p4{1, 2, 1.0, 1.0, 1.0, 3};
  const AngleAlphabet nu1 = alphabet_from(build_nu_k(AngleDistribution::uniform(), 1));
  AngleAlphabet half_pi;
  half_pi.thetas = {std::numbers::pi / 2.0, -std::numbers::pi / 2.0};
  half_pi.weights = {0.5, 0.5};
  const AngleAlphabet sphere = alphabet_from(build_sphere_quadrature(2, 2));
  return {
      {"k0_M2N2", build_bl_datum(0, p1, nu1)},
      {"k1_M2N2_nu1", build_bl_datum(1, p1, nu1)},
      {"k1_M2N1_half_pi", build_bl_datum(1, p2, half_pi)},
      {"k1_M3N1_nu1", build_bl_datum(1, p3, nu1)},
      {"k1_d3_M1N2_sphere", build_bl_datum(1, p4, sphere)},
  };
}

PositiveFamily random_family(const BLDatum& datum, std::uint64_t seed) {
  PositiveFamily f;
  for (std::size_t i = 0; i < datum.terms.size(); ++i)
    f.push_back(PositiveQuadratic::random(datum.terms[i].range_dim(), stream_key(seed, i)));
  return f;
}

ScoreEntry entry(std::string group, std::string name, const Margin& m) {
  return {std::move(group), std::move(name), m.fine, m.coarse, m.verdict};
}

}  // namespace

Scoreboard run_inequality_suite(std::uint64_t seed) {
  Scoreboard board;
  for (const auto& h : nelson_fixtures())
    for (double t : {0.1, 0.5, 2.0})
      board.add(entry("nelson", h.name + "@t=" + std::to_string(t).substr(0, 3), entropic_nelson_check(h, t)));

  const auto data = suite_data();
  for (std::size_t d = 0; d < data.size(); ++d) {
    const auto& [name, datum] = data[d];
    const auto rep = datum.check();
    board.add({"datum", name, -rep.frame_deviation, -rep.trace_deviation,
               rep.ok() ? Verdict::Pass : Verdict::Fail});
    for (std::uint64_t s = 0; s < 3; ++s) {
      const std::uint64_t key = stream_key(seed, 100 * d + s);
      const PositiveFamily f = random_family(datum, key);
      board.add(entry("brascamp_lieb", name + "#" + std::to_string(s), bl_inequality_check(datum, f)));
      const PositiveQuadratic hq = PositiveQuadratic::random(datum.dim, splitmix64(key));
      board.add(entry("entropy_dual", name + "#" + std::to_string(s),
                      entropy_dual_check(datum, f, [&](std::span<const double> v) { return hq(v); })));
      if (s == 0)
        board.add(entry("entropy_dual", name + "#thermal",
                        entropy_dual_check(datum, f, [](std::span<const double>) { return 1.0; })));
    }
  }

  const BLDatum& flow_datum = data[1].datum;
  std::vector<HeatProfile> profiles;
  for (std::size_t i = 0; i < flow_datum.terms.size(); ++i) {
    RngStream rng(stream_key(seed ^ 0x4ea7, i));
    HeatProfile hp;
    const std::size_t d = flow_datum.terms[i].range_dim();
    hp.poly = PositiveQuadratic::random(d, rng.engine()());
    hp.center = VectorXd(static_cast<Index>(d));
    for (std::size_t a = 0; a < d; ++a) hp.center[static_cast<Index>(a)] = rng.uniform() - 0.5;
    hp.sigma = 0.5 + 0.5 * rng.uniform();
    profiles.push_back(std::move(hp));
  }
  const auto flow = heat_flow_monotonicity_check(flow_datum, profiles,
                                                 {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50});
  board.add({"heat_flow", data[1].name + "_monotone", flow.min_derivative, flow.min_derivative,
             flow.max_order_gap > 1e-6 ? Verdict::Inconclusive : (flow.monotone ? Verdict::Pass : Verdict::Fail)});
  board.add({"heat_flow", data[1].name + "_limit", 0.02 - flow.limit_relative_gap, 0.02 - flow.limit_relative_gap,
             flow.limit_ok ? Verdict::Pass : Verdict::Fail});
  return board;
}

}  // namespace kac
