#include "kacsim/moments.hpp"

#include <cmath>

#include "kacsim/collision.hpp"

namespace kac {

MomentPair PMatrix::apply(const MomentPair& m) const {
  const Eigen::Vector2d out = P * Eigen::Vector2d(m.m1, m.m2);
  return {out(0), out(1)};
}

PMatrix make_p_matrix(const GeneratorParams& params, double mu_nu) {
  const double M = static_cast<double>(params.M), N = static_cast<double>(params.N);
  const double L = params.Lambda();
  const double a = L > 0.0 ? mu_nu / (L * N) : 0.0;
  PMatrix out;
  Eigen::Matrix2d G;
  G << N, -N, -M, M;
  out.P = Eigen::Matrix2d::Identity() - a * G;
  out.ell1 = 1.0;
  out.ell2 = 1.0 - a * (M + N);
  out.v1 = Eigen::Vector2d(1.0, 1.0);
  out.v2 = Eigen::Vector2d(N, -M) / (M + N);
  return out;
}

PMatrix make_p_matrix(const GeneratorParams& params, const AngleDistribution& rho) {
  return make_p_matrix(params, mu_rho(params, rho));
}

double c_km(unsigned k, const GeneratorParams& params, double mu_nu) {
  const double M = static_cast<double>(params.M), N = static_cast<double>(params.N);
  const double L = params.Lambda();
  const double ell2 = L > 0.0 ? 1.0 - mu_nu * (N + M) / (N * L) : 1.0;
  return M / (N + M) + N / (N + M) * std::pow(ell2, static_cast<double>(k));
}

double c_km(unsigned k, const GeneratorParams& params, const AngleDistribution& rho) {
  return c_km(k, params, mu_rho(params, rho));
}

double DecayEnvelope::operator()(double t) const {
  return system_weight + reservoir_weight * std::exp(-rate * t);
}

DecayEnvelope make_envelope(const GeneratorParams& params, const AngleDistribution& rho) {
  const double M = static_cast<double>(params.M), N = static_cast<double>(params.N);
  return {M / (N + M), N / (N + M), mu_rho(params, rho) * (N + M) / N};
}

double envelope(double t, const GeneratorParams& params, const AngleDistribution& rho) {
  return make_envelope(params, rho)(t);
}

double classical_kac_rate(const GeneratorParams& params, const AngleDistribution& rho) {
  const double n = static_cast<double>(params.M + params.N);
  return rho.sin2_moment() * 2.0 * n / (n - 1.0);
}

std::vector<double> poisson_weights(double lambda_t, double tail) {
  std::vector<double> w;
  if (lambda_t <= 0.0) return {1.0};
  for (std::size_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    const double logw = -lambda_t + kd * std::log(lambda_t) - std::lgamma(kd + 1.0);
    w.push_back(std::exp(logw));
    const double r = lambda_t / (kd + 1.0);
    if (r < 1.0 && w.back() * r / (1.0 - r) < tail) break;
  }
  return w;
}

PoissonSum envelope_poisson_sum(double t, const GeneratorParams& params, const AngleDistribution& rho) {
  const double mu_nu = mu_rho(params, rho);
  const auto w = poisson_weights(params.Lambda() * t);
  PoissonSum out;
  out.terms = w.size();
  for (std::size_t k = 0; k < w.size(); ++k) out.value += w[k] * c_km(static_cast<unsigned>(k), params, mu_nu);
  return out;
}

MomentPair propagate_moments(const MomentPair& m0, double t, const GeneratorParams& params,
                             const AngleDistribution& rho) {
  const double M = static_cast<double>(params.M), N = static_cast<double>(params.N);
  const double mu_nu = mu_rho(params, rho);
  const double eq = (M * m0.m1 + N * m0.m2) / (M + N);
  const double decay = std::exp(-t * mu_nu * (M + N) / N);
  const double gap = m0.m1 - m0.m2;
  return {eq + gap * (N / (M + N)) * decay, eq - gap * (M / (M + N)) * decay};
}

MomentPair propagate_moments_poisson(const MomentPair& m0, double t, const GeneratorParams& params,
                                     const AngleDistribution& rho) {
  const PMatrix pm = make_p_matrix(params, rho);
  const auto w = poisson_weights(params.Lambda() * t);
  Eigen::Vector2d cur(m0.m1, m0.m2), acc = Eigen::Vector2d::Zero();
  for (double wk : w) {
    acc += wk * cur;
    cur = pm.P * cur;
  }
  return {acc(0), acc(1)};
}

}  // namespace kac
