#include "kacsim/angle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kacsim/errors.hpp"

namespace kac {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Integral of the linear interpolant through (a, ya), (b, yb) against
// exp(-i m theta), in closed form.
std::complex<double> linear_segment_fourier(double a, double b, double ya, double yb, int m) {
  const double h = b - a;
  if (m == 0) return {0.5 * h * (ya + yb), 0.0};
  const double slope = (yb - ya) / h;
  const double intercept = ya - slope * a;
  const double md = static_cast<double>(m);
  const std::complex<double> I(0.0, 1.0);
  auto primitive = [&](double x) {
    return std::exp(-I * md * x) * ((intercept + slope * x) / (-I * md) + slope / (md * md));
  };
  return primitive(b) - primitive(a);
}

}  // namespace

AngleDistribution::AngleDistribution(Representation rep) : rep_(std::move(rep)) {
  validate();
  const std::complex<double> c2 = fourier_coefficient(2);
  const double m = mass();
  // integral cos(2 theta) = 2pi Re c2, integral sin(2 theta) = -2pi Im c2.
  sin2_moment_ = 0.5 * (m - 2.0 * kPi * c2.real());
  sincos_moment_ = -kPi * c2.imag();
  if (std::abs(m - 1.0) > kTolerance)
    throw InvalidInput("angle distribution has total mass " + std::to_string(m) + ", expected 1");
  if (std::abs(sincos_moment_) > kTolerance)
    throw InvalidInput("angle distribution violates the zero sin*cos moment condition (moment = " +
                       std::to_string(sincos_moment_) + ")");
  build_sampler();
}

AngleDistribution AngleDistribution::half_pi_atoms() {
  return atoms({{kPi / 2.0, 0.5}, {-kPi / 2.0, 0.5}});
}

std::string AngleDistribution::type_name() const {
  return std::visit(overloaded{[](const Uniform&) { return std::string("uniform"); },
                               [](const Atoms&) { return std::string("atoms"); },
                               [](const DensityTable&) { return std::string("density_table"); },
                               [](const Trigonometric&) { return std::string("trigonometric"); }},
                    rep_);
}

void AngleDistribution::validate() const {
  std::visit(
      overloaded{
          [](const Uniform&) {},
          [](const Atoms& a) {
            if (a.atoms.empty()) throw InvalidInput("atomic angle distribution has no atoms");
            for (const auto& [theta, p] : a.atoms) {
              if (!std::isfinite(theta) || !std::isfinite(p) || p < 0.0)
                throw InvalidInput("atom weights must be finite and nonnegative");
              if (theta < -kPi - 1e-12 || theta > kPi + 1e-12)
                throw InvalidInput("atom angles must lie in [-pi, pi]");
            }
          },
          [](const DensityTable& t) {
            if (t.thetas.size() < 2 || t.thetas.size() != t.values.size())
              throw InvalidInput("density table needs matching thetas/values with >= 2 knots");
            if (std::abs(t.thetas.front() + kPi) > 1e-9 || std::abs(t.thetas.back() - kPi) > 1e-9)
              throw InvalidInput("density table knots must span [-pi, pi]");
            for (std::size_t i = 1; i < t.thetas.size(); ++i)
              if (!(t.thetas[i] > t.thetas[i - 1]))
                throw InvalidInput("density table knots must be strictly increasing");
            for (double v : t.values)
              if (!std::isfinite(v) || v < 0.0)
                throw InvalidInput("density table values must be finite and nonnegative");
          },
          [](const Trigonometric& t) {
            for (double c : t.cos_coef)
              if (!std::isfinite(c)) throw InvalidInput("non-finite Fourier coefficient");
            for (double c : t.sin_coef)
              if (!std::isfinite(c)) throw InvalidInput("non-finite Fourier coefficient");
          }},
      rep_);
  if (std::holds_alternative<Trigonometric>(rep_)) {
    const int grid = 8192;
    for (int i = 0; i < grid; ++i) {
      const double theta = -kPi + 2.0 * kPi * i / grid;
      if (density(theta) < -1e-14) throw InvalidInput("trigonometric density takes negative values");
    }
  }
}

std::complex<double> AngleDistribution::fourier_coefficient(int m) const {
  const double inv2pi = 1.0 / (2.0 * kPi);
  return std::visit(
      overloaded{
          [&](const Uniform&) { return std::complex<double>(m == 0 ? inv2pi : 0.0, 0.0); },
          [&](const Atoms& a) {
            std::complex<double> s = 0.0;
            for (const auto& [theta, p] : a.atoms)
              s += p * std::exp(std::complex<double>(0.0, -static_cast<double>(m) * theta));
            return s * inv2pi;
          },
          [&](const DensityTable& t) {
            std::complex<double> s = 0.0;
            for (std::size_t i = 1; i < t.thetas.size(); ++i)
              s += linear_segment_fourier(t.thetas[i - 1], t.thetas[i], t.values[i - 1], t.values[i], m);
            return s * inv2pi;
          },
          [&](const Trigonometric& t) {
            if (m == 0) return std::complex<double>(inv2pi, 0.0);
            const std::size_t am = static_cast<std::size_t>(std::abs(m));
            const double c = am <= t.cos_coef.size() ? t.cos_coef[am - 1] : 0.0;
            const double s = am <= t.sin_coef.size() ? t.sin_coef[am - 1] : 0.0;
            // cos -> (e + e*)/2, sin -> (e - e*)/(2i).
            const std::complex<double> pos(c / 2.0, -s / 2.0);
            return (m > 0 ? pos : std::conj(pos)) * inv2pi;
          }},
      rep_);
}

double AngleDistribution::mass() const { return 2.0 * kPi * fourier_coefficient(0).real(); }

double AngleDistribution::density(double theta) const {
  return std::visit(
      overloaded{[](const Uniform&) { return 1.0 / (2.0 * kPi); },
                 [](const Atoms&) -> double {
                   throw InvalidInput("atomic angle distribution has no density");
                 },
                 [&](const DensityTable& t) {
                   if (theta <= t.thetas.front()) return t.values.front();
                   if (theta >= t.thetas.back()) return t.values.back();
                   const auto it = std::upper_bound(t.thetas.begin(), t.thetas.end(), theta);
                   const std::size_t i = static_cast<std::size_t>(it - t.thetas.begin());
                   const double w = (theta - t.thetas[i - 1]) / (t.thetas[i] - t.thetas[i - 1]);
                   return (1.0 - w) * t.values[i - 1] + w * t.values[i];
                 },
                 [&](const Trigonometric& t) {
                   double s = 1.0;
                   for (std::size_t m = 1; m <= t.cos_coef.size(); ++m)
                     s += t.cos_coef[m - 1] * std::cos(static_cast<double>(m) * theta);
                   for (std::size_t m = 1; m <= t.sin_coef.size(); ++m)
                     s += t.sin_coef[m - 1] * std::sin(static_cast<double>(m) * theta);
                   return s / (2.0 * kPi);
                 }},
      rep_);
}

void AngleDistribution::build_sampler() {
  if (is_uniform()) return;
  auto cdf = std::make_shared<std::vector<double>>();
  if (const auto* a = std::get_if<Atoms>(&rep_)) {
    double acc = 0.0;
    for (const auto& atom : a->atoms) cdf->push_back(acc += atom.second);
    cdf->back() = 1.0;
  } else {
    const int n = kInverseCdfKnots;
    const double h = 2.0 * kPi / n;
    cdf->resize(static_cast<std::size_t>(n) + 1);
    (*cdf)[0] = 0.0;
    double prev = density(-kPi);
    for (int i = 1; i <= n; ++i) {
      const double cur = density(-kPi + h * i);
      (*cdf)[static_cast<std::size_t>(i)] = (*cdf)[static_cast<std::size_t>(i - 1)] + 0.5 * h * (prev + cur);
      prev = cur;
    }
    const double total = cdf->back();
    for (double& c : *cdf) c /= total;
  }
  cdf_ = std::move(cdf);
}

double AngleDistribution::sample(RngStream& rng) const {
  const double u = rng.uniform();
  if (is_uniform()) return -kPi + 2.0 * kPi * u;
  const auto& cdf = *cdf_;
  if (const auto* a = std::get_if<Atoms>(&rep_)) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx = std::min(static_cast<std::size_t>(it - cdf.begin()), a->atoms.size() - 1);
    return a->atoms[idx].first;
  }
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  if (i == 0) i = 1;
  if (i >= cdf.size()) i = cdf.size() - 1;
  const double h = 2.0 * kPi / kInverseCdfKnots;
  const double lo = cdf[i - 1], hi = cdf[i];
  const double w = hi > lo ? (u - lo) / (hi - lo) : 0.5;
  return -kPi + h * (static_cast<double>(i - 1) + w);
}

}  // namespace kac
