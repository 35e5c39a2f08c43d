#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace kac {

enum class PairKind { SystemSystem = 0, ReservoirReservoir = 1, Cross = 2 };

const char* to_string(PairKind kind);

// Particle pair with 0-based indices i < j. Indices below M are system
// particles, the rest belong to the reservoir.
struct PairIndex {
  std::size_t i = 0;
  std::size_t j = 0;
  PairKind kind = PairKind::Cross;

  bool operator==(const PairIndex&) const = default;
};

// Rates and sizes of the coupled system/reservoir generator.
//
// The total jump rate is the sum of the three kind totals
//   lambda_S * M / 2,  lambda_R * N / 2,  mu * M.
// A kind without any pair (M = 1 or N = 1) contributes zero, whatever its rate.
struct GeneratorParams {
  std::size_t M = 1;
  std::size_t N = 1;
  double lambda_S = 0.0;
  double lambda_R = 0.0;
  double mu = 0.0;
  int dimension = 1;

  // Throws InvalidInput on negative or non-finite rates, zero counts, or a
  // dimension other than 1 or 3.
  void validate() const;

  std::size_t particles() const { return M + N; }
  std::size_t system_coords() const { return static_cast<std::size_t>(dimension) * M; }
  std::size_t reservoir_coords() const { return static_cast<std::size_t>(dimension) * N; }

  std::size_t pair_count(PairKind kind) const;
  // Total rate of jumps of one kind.
  double kind_rate(PairKind kind) const;
  double Lambda() const;
  // Normalized per-pair weight lambda_alpha for a pair of the given kind.
  double pair_weight(PairKind kind) const;
  // Kind probabilities (SystemSystem, ReservoirReservoir, Cross).
  std::array<double, 3> kind_probabilities() const;
};

// Standard Kac model on M + N particles with all pairs colliding at the same
// rate, split into system and reservoir.
GeneratorParams classical_kac_preset(std::size_t M, std::size_t N, int dimension = 1);

PairKind classify_pair(std::size_t i, std::size_t j, std::size_t M);

// The r-th pair (0-based) of a kind, in lexicographic order.
PairIndex pair_of_kind(PairKind kind, std::size_t r, std::size_t M, std::size_t N);

// All pairs in lexicographic (i, j) order.
std::vector<PairIndex> all_pairs(std::size_t M, std::size_t N);

}  // namespace kac
