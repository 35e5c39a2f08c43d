#pragma once

// Independent reference computations used by the unit tests. Nothing here
// calls into the library beyond plain data types.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

struct Rates {
  std::size_t M, N;
  double lambda_S, lambda_R, mu;
};

// Per-pair rates read off the generator: lambda_S/(M-1) inside the system,
// lambda_R/(N-1) inside the reservoir, mu/N across. Returns pair -> rate / total.
inline std::map<std::pair<std::size_t, std::size_t>, double> pair_weights(const Rates& r) {
  std::map<std::pair<std::size_t, std::size_t>, double> rate;
  const std::size_t n = r.M + r.N;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double q;
      if (j < r.M)
        q = r.lambda_S / static_cast<double>(r.M - 1);
      else if (i >= r.M)
        q = r.lambda_R / static_cast<double>(r.N - 1);
      else
        q = r.mu / static_cast<double>(r.N);
      rate[{i, j}] = q;
      total += q;
    }
  for (auto& [k, v] : rate) v /= total;
  return rate;
}

inline double total_rate(const Rates& r) {
  double total = 0.0;
  const std::size_t n = r.M + r.N;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j < r.M)
        total += r.lambda_S / static_cast<double>(r.M - 1);
      else if (i >= r.M)
        total += r.lambda_R / static_cast<double>(r.N - 1);
      else
        total += r.mu / static_cast<double>(r.N);
    }
  return total;
}

// Dense matrix of v -> r_{ij}(theta)^{-1} v.
inline Eigen::MatrixXd inverse_rotation(std::size_t n, std::size_t i, std::size_t j, double theta) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
  R(a, a) = std::cos(theta);
  R(a, b) = -std::sin(theta);
  R(b, a) = std::sin(theta);
  R(b, b) = std::cos(theta);
  return R;
}

// Brute-force average of A A^T over all words of length k built from the
// given pair weights and angle atoms (d = 1), A the top-left M x M block of
// r_k^{-1} ... r_1^{-1}.
inline Eigen::MatrixXd enumerated_z(std::size_t k, const Rates& r, const std::vector<std::pair<double, double>>& atoms) {
  const auto w = pair_weights(r);
  const std::size_t n = r.M + r.N;
  std::vector<std::tuple<std::size_t, std::size_t, double, double>> letters;
  for (const auto& [p, pw] : w)
    for (const auto& [th, aw] : atoms) letters.emplace_back(p.first, p.second, th, pw * aw);
  const auto m = static_cast<Eigen::Index>(r.M);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(m, m);
  std::function<void(std::size_t, const Eigen::MatrixXd&, double)> rec = [&](std::size_t depth, const Eigen::MatrixXd& W,
                                                                              double weight) {
    if (depth == k) {
      const Eigen::MatrixXd A = W.topLeftCorner(m, m);
      Z += weight * A * A.transpose();
      return;
    }
    for (const auto& [i, j, th, lw] : letters) rec(depth + 1, inverse_rotation(n, i, j, th) * W, weight * lw);
  };
  rec(0, Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), 1.0);
  return Z;
}

// e^{-x} sum_k x^k / k! P^k m0 by direct recursion, for moderate x.
inline Eigen::Vector2d poisson_matrix_sum(const Eigen::Matrix2d& P, const Eigen::Vector2d& m0, double x,
                                          int terms = 400) {
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  Eigen::Vector2d pk = m0;
  double coeff = std::exp(-x);
  for (int k = 0; k < terms; ++k) {
    acc += coeff * pk;
    pk = P * pk;
    coeff *= x / static_cast<double>(k + 1);
  }
  return acc;
}

// Relative entropy of N(b, s I_n) with respect to exp(-pi |v|^2).
inline double gaussian_kl(std::size_t n, double s, double mean_sq) {
  const double x = 2.0 * std::numbers::pi * s;
  return 0.5 * static_cast<double>(n) * (x - 1.0 - std::log(x)) + std::numbers::pi * mean_sq;
}

// The same in one dimension by composite Simpson integration of f log(f/g).
inline double gaussian_kl_quadrature(double s, double b) {
  const double L = b + 20.0 * std::sqrt(s) + 5.0;
  const int n = 200000;
  const double h = 2.0 * L / n;
  auto f = [&](double x) { return std::exp(-(x - b) * (x - b) / (2 * s)) / std::sqrt(2 * std::numbers::pi * s); };
  auto integrand = [&](double x) {
    const double fx = f(x);
    if (fx < 1e-300) return 0.0;
    return fx * (std::log(fx) + std::numbers::pi * x * x);
  };
  double acc = integrand(-L) + integrand(L);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(-L + i * h);
  return acc * h / 3.0;
}

// Lebesgue integral of prod_i (a_i exp(-|B_i v - c_i|^2 / (2 s_i)))^{w_i} over R^m.
struct GaussFactor {
  Eigen::MatrixXd B;
  Eigen::VectorXd c;
  double s, a, w;
};
inline double gaussian_product_integral(const std::vector<GaussFactor>& f, std::size_t m) {
  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(mm, mm);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mm);
  double cc = 0.0, log_amp = 0.0;
  for (const auto& g : f) {
    Q += g.w * g.B.transpose() * g.B / g.s;
    b += g.w * g.B.transpose() * g.c / g.s;
    cc += g.w * g.c.squaredNorm() / g.s;
    log_amp += g.w * std::log(g.a);
  }
  const Eigen::VectorXd mu = Q.ldlt().solve(b);
  const double expo = -0.5 * (cc - mu.dot(b));
  return std::exp(log_amp + expo) * std::pow(2 * std::numbers::pi, 0.5 * static_cast<double>(m)) /
         std::sqrt(Q.determinant());
}

}  // namespace oracle
