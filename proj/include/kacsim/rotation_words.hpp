#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kacsim/angle.hpp"
#include "kacsim/bl_datum.hpp"
#include "kacsim/collision.hpp"
#include "kacsim/discretization.hpp"
#include "kacsim/params.hpp"
#include "kacsim/rng.hpp"

namespace kac {

// Product r_1 r_2 ... r_k of collision maps on R^{d(M+N)}, kept in both the
// abstract form and as realized matrices. `forward` is the product itself and
// `inverse` its inverse, which is what the initial datum is evaluated at.
struct RotationWord {
  GeneratorParams params;
  std::vector<PairIndex> pairs;
  std::vector<double> thetas;  // d = 1
  std::vector<Vec3> omegas;    // d = 3
  Eigen::MatrixXd forward;
  Eigen::MatrixXd inverse;

  std::size_t length() const { return pairs.size(); }
  // max |W W^T - I| over both realized matrices.
  double gram_deviation() const;
};

RotationWord identity_word(const GeneratorParams& params);
// Appends one collision to the right of the product.
void append_rotation(RotationWord& word, const PairIndex& pair, double theta);
void append_collision(RotationWord& word, const PairIndex& pair, const Vec3& omega);

// Pairs i.i.d. with law lambda_alpha; angles i.i.d. rho in d = 1, directions
// uniform on the sphere in d = 3.
RotationWord sample_word(std::size_t k, const GeneratorParams& params, const AngleDistribution& rho,
                         RngStream& rng);

// Blocks of the inverse word matrix, system coordinates first.
struct BlockDecomposition {
  Eigen::MatrixXd A, B, C, D;

  // max |A A^T + B B^T - I|.
  double row_block_deviation() const;
};

// A = U diag(gamma) V^T with gamma sorted in decreasing order.
struct SingularSpectrum {
  Eigen::VectorXd gamma;
  Eigen::MatrixXd U, V;
  // Largest amount by which a raw singular value exceeded 1 before clamping.
  double overshoot = 0.0;

  double reconstruction_error(const Eigen::MatrixXd& A) const;
};

// Singular values above 1 by at most this much are clamped to 1.
inline constexpr double kGammaClamp = 1e-10;

struct WordDecomposition {
  BlockDecomposition blocks;
  SingularSpectrum spectrum;
};

// Throws NumericalError, with the matrix in the message, if the SVD yields
// non-finite output or a singular value above 1 + kGammaClamp.
WordDecomposition decompose(const RotationWord& word);

// Weights prod_{i not in sigma} gamma_i^2 prod_{j in sigma} (1 - gamma_j^2),
// indexed by the bitmask of sigma. Requires gamma.size() <= 20.
std::vector<double> sigma_weights(const Eigen::VectorXd& gamma);

struct SigmaCollapse {
  double total = 0.0;        // should be 1
  Eigen::VectorXd diagonal;  // sum_sigma w_sigma P_{sigma^c}^T P_{sigma^c}, should be gamma^2
};
SigmaCollapse sigma_collapse(const Eigen::VectorXd& gamma);

struct WordChecks {
  double gram = 0.0;
  double row_block = 0.0;
  double gamma_below = 0.0;   // max(0, -min gamma)
  double gamma_above = 0.0;   // overshoot before clamping
  double reconstruction = 0.0;
  double sigma_total = 0.0;   // |sum_sigma w_sigma - 1|
  double sigma_projector = 0.0;
  double max_deviation() const;
};
WordChecks check_word(const RotationWord& word);

struct SumRuleEstimate {
  std::size_t k = 0;
  std::size_t n_words = 0;
  double c_km = 0.0;
  Eigen::MatrixXd Z_hat;
  Eigen::MatrixXd se;
  double diag_mean = 0.0;
  double max_diag_deviation = 0.0;
  double max_offdiag = 0.0;
  double max_se = 0.0;
  // Largest |Z_hat - C I| / max(se, floor) over the entries.
  double max_z_score = 0.0;
  bool pass = false;
};

// Rounding floor for per-entry standard errors; entries that are identical
// across words (e.g. k = 0) have a sample SE of zero.
inline constexpr double kSumRuleSeFloor = 1e-12;

// Averages A A^T over n_words sampled words; word w uses
// RngStream::for_stream(seed, w). Passes iff every entry is within 4 SE of
// C_{k,M} I. The result does not depend on the worker count.
SumRuleEstimate mc_sum_rule(std::size_t k, const GeneratorParams& params, const AngleDistribution& rho,
                            std::size_t n_words, std::uint64_t seed, unsigned workers = 1);

using VectorFunction = std::function<double(std::span<const double>)>;

struct MarginalCheck {
  double residual = 0.0;
  double order_difference = 0.0;  // |residual(order) - residual(2 order)| proxy
  bool order_too_low = false;
};

// max over v in `points` of
//   | int h(A v + B w) dgamma(w) - int h(A v + (I - A A^T)^{1/2} u) dgamma(u) |
// with Gauss-Hermite tensor rules for exp(-pi |x|^2). Both sides are also
// evaluated at twice the order; a change above 1e-10 flags the order as too low.
MarginalCheck gaussian_marginal_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const VectorFunction& h,
                                      std::size_t order, std::span<const Eigen::VectorXd> points);

// Finite parameter alphabet for enumerating words.
struct AngleAlphabet {
  std::vector<double> thetas;   // d = 1
  std::vector<Vec3> omegas;     // d = 3
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

AngleAlphabet alphabet_from(const DiscreteAngleMeasure& nu);
AngleAlphabet alphabet_from(const SphereQuadrature& sphere);

inline constexpr std::size_t kMaxDatumTerms = 1'000'000;

// Enumerates every word of length k over the alphabet, and for each subset
// sigma with nonempty complement adds the map P_{sigma^c} U^T with weight
// lambda_{alpha_1} ... nu(theta_1) ... prod gamma^2 prod (1 - gamma^2) / C_{k,M}.
// Throws InvalidInput if more than kMaxDatumTerms terms would be produced.
BLDatum build_bl_datum(std::size_t k, const GeneratorParams& params, const AngleAlphabet& alphabet);

}  // namespace kac
