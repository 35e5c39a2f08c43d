#include "kacsim/params.hpp"

#include <cmath>
#include <string>

#include "kacsim/errors.hpp"

namespace kac {

const char* to_string(PairKind kind) {
  switch (kind) {
    case PairKind::SystemSystem:
      return "system-system";
    case PairKind::ReservoirReservoir:
      return "reservoir-reservoir";
    case PairKind::Cross:
      return "cross";
  }
  return "?";
}

void GeneratorParams::validate() const {
  if (M < 1 || N < 1) throw InvalidInput("particle counts M and N must be positive");
  if (dimension != 1 && dimension != 3) throw InvalidInput("dimension must be 1 or 3");
  auto check_rate = [](double r, const char* name) {
    if (!std::isfinite(r) || r < 0.0)
      throw InvalidInput(std::string("rate ") + name + " must be finite and nonnegative");
  };
  check_rate(lambda_S, "lambda_S");
  check_rate(lambda_R, "lambda_R");
  check_rate(mu, "mu");
}

std::size_t GeneratorParams::pair_count(PairKind kind) const {
  switch (kind) {
    case PairKind::SystemSystem:
      return M * (M - 1) / 2;
    case PairKind::ReservoirReservoir:
      return N * (N - 1) / 2;
    case PairKind::Cross:
      return M * N;
  }
  return 0;
}

double GeneratorParams::kind_rate(PairKind kind) const {
  switch (kind) {
    case PairKind::SystemSystem:
      return M >= 2 ? lambda_S * static_cast<double>(M) / 2.0 : 0.0;
    case PairKind::ReservoirReservoir:
      return N >= 2 ? lambda_R * static_cast<double>(N) / 2.0 : 0.0;
    case PairKind::Cross:
      return mu * static_cast<double>(M);
  }
  return 0.0;
}

double GeneratorParams::Lambda() const {
  return kind_rate(PairKind::SystemSystem) + kind_rate(PairKind::ReservoirReservoir) +
         kind_rate(PairKind::Cross);
}

double GeneratorParams::pair_weight(PairKind kind) const {
  const double L = Lambda();
  const std::size_t count = pair_count(kind);
  if (L <= 0.0 || count == 0) return 0.0;
  switch (kind) {
    case PairKind::SystemSystem:
      return lambda_S / (L * static_cast<double>(M - 1));
    case PairKind::ReservoirReservoir:
      return lambda_R / (L * static_cast<double>(N - 1));
    case PairKind::Cross:
      return mu / (L * static_cast<double>(N));
  }
  return 0.0;
}

std::array<double, 3> GeneratorParams::kind_probabilities() const {
  const double L = Lambda();
  if (L <= 0.0) return {0.0, 0.0, 0.0};
  return {kind_rate(PairKind::SystemSystem) / L, kind_rate(PairKind::ReservoirReservoir) / L,
          kind_rate(PairKind::Cross) / L};
}

GeneratorParams classical_kac_preset(std::size_t M, std::size_t N, int dimension) {
  GeneratorParams p;
  p.M = M;
  p.N = N;
  p.dimension = dimension;
  const double denom = static_cast<double>(N + M - 1);
  p.lambda_S = 2.0 * static_cast<double>(M - 1) / denom;
  p.lambda_R = 2.0 * static_cast<double>(N - 1) / denom;
  p.mu = 2.0 * static_cast<double>(N) / denom;
  return p;
}

PairKind classify_pair(std::size_t i, std::size_t j, std::size_t M) {
  if (j < M) return PairKind::SystemSystem;
  if (i >= M) return PairKind::ReservoirReservoir;
  return PairKind::Cross;
}

namespace {

// r-th pair (a < b) among n elements in lexicographic order.
std::pair<std::size_t, std::size_t> unrank_pair(std::size_t r, std::size_t n) {
  std::size_t a = 0;
  std::size_t row = n - 1;
  while (r >= row) {
    r -= row;
    ++a;
    --row;
  }
  return {a, a + 1 + r};
}

}  // namespace

PairIndex pair_of_kind(PairKind kind, std::size_t r, std::size_t M, std::size_t N) {
  switch (kind) {
    case PairKind::SystemSystem: {
      auto [a, b] = unrank_pair(r, M);
      return {a, b, kind};
    }
    case PairKind::ReservoirReservoir: {
      auto [a, b] = unrank_pair(r, N);
      return {M + a, M + b, kind};
    }
    case PairKind::Cross:
      return {r / N, M + r % N, kind};
  }
  return {};
}

std::vector<PairIndex> all_pairs(std::size_t M, std::size_t N) {
  std::vector<PairIndex> out;
  const std::size_t n = M + N;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back({i, j, classify_pair(i, j, M)});
  return out;
}

}  // namespace kac
