#include "kacsim/rotation_words.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <string>
#include <thread>

#include "kacsim/errors.hpp"
#include "kacsim/moments.hpp"
#include "kacsim/quadrature.hpp"

namespace kac {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index coord_dim(const GeneratorParams& p) { return static_cast<Index>(p.dimension * p.particles()); }

// W <- r^{-1} W on rows, P <- P r on columns.
void rotate_inverse_rows(MatrixXd& W, Index i, Index j, double c, double s) {
  const Eigen::RowVectorXd ri = W.row(i);
  const Eigen::RowVectorXd rj = W.row(j);
  W.row(i) = c * ri - s * rj;
  W.row(j) = s * ri + c * rj;
}

void rotate_forward_cols(MatrixXd& P, Index i, Index j, double c, double s) {
  const VectorXd ci = P.col(i);
  const VectorXd cj = P.col(j);
  P.col(i) = c * ci - s * cj;
  P.col(j) = s * ci + c * cj;
}

// The 3D collision map is a symmetric involution, so rows and columns update alike.
void collide_rows(MatrixXd& W, Index bi, Index bj, const Vec3& w) {
  const Index n = W.cols();
  for (Index col = 0; col < n; ++col) {
    double dot = 0.0;
    for (Index a = 0; a < 3; ++a) dot += w[a] * (W(bi + a, col) - W(bj + a, col));
    for (Index a = 0; a < 3; ++a) {
      W(bi + a, col) -= w[a] * dot;
      W(bj + a, col) += w[a] * dot;
    }
  }
}

void collide_cols(MatrixXd& P, Index bi, Index bj, const Vec3& w) {
  const Index n = P.rows();
  for (Index row = 0; row < n; ++row) {
    double dot = 0.0;
    for (Index a = 0; a < 3; ++a) dot += w[a] * (P(row, bi + a) - P(row, bj + a));
    for (Index a = 0; a < 3; ++a) {
      P(row, bi + a) -= w[a] * dot;
      P(row, bj + a) += w[a] * dot;
    }
  }
}

double gram_of(const MatrixXd& W) {
  return (W * W.transpose() - MatrixXd::Identity(W.rows(), W.rows())).cwiseAbs().maxCoeff();
}

std::string dump(const MatrixXd& m) {
  std::ostringstream os;
  os.precision(17);
  os << m;
  return os.str();
}

MatrixXd psd_sqrt(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double marginal_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& S, const VectorFunction& h,
                         const QuadratureRule& rule, std::span<const VectorXd> points, std::vector<double>& lhs_out) {
  const Index m = A.rows();
  VectorXd x(m);
  double residual = 0.0;
  lhs_out.clear();
  for (const auto& v : points) {
    const VectorXd Av = A * v;
    const double lhs = tensor_integrate(rule, static_cast<std::size_t>(B.cols()), [&](std::span<const double> w) {
      x = Av;
      for (Index c = 0; c < B.cols(); ++c) x += B.col(c) * w[static_cast<std::size_t>(c)];
      return h(std::span<const double>(x.data(), static_cast<std::size_t>(m)));
    });
    const double rhs = tensor_integrate(rule, static_cast<std::size_t>(m), [&](std::span<const double> u) {
      x = Av;
      for (Index c = 0; c < m; ++c) x += S.col(c) * u[static_cast<std::size_t>(c)];
      return h(std::span<const double>(x.data(), static_cast<std::size_t>(m)));
    });
    lhs_out.push_back(lhs);
    lhs_out.push_back(rhs);
    residual = std::max(residual, std::abs(lhs - rhs));
  }
  return residual;
}

}  // namespace

double RotationWord::gram_deviation() const { return std::max(gram_of(forward), gram_of(inverse)); }

RotationWord identity_word(const GeneratorParams& params) {
  params.validate();
  RotationWord w;
  w.params = params;
  const Index n = coord_dim(params);
  w.forward = MatrixXd::Identity(n, n);
  w.inverse = MatrixXd::Identity(n, n);
  return w;
}

void append_rotation(RotationWord& word, const PairIndex& pair, double theta) {
  if (word.params.dimension != 1) throw InvalidInput("angle rotations need dimension 1");
  const double c = std::cos(theta), s = std::sin(theta);
  const Index i = static_cast<Index>(pair.i), j = static_cast<Index>(pair.j);
  rotate_forward_cols(word.forward, i, j, c, s);
  rotate_inverse_rows(word.inverse, i, j, c, s);
  word.pairs.push_back(pair);
  word.thetas.push_back(theta);
}

void append_collision(RotationWord& word, const PairIndex& pair, const Vec3& omega) {
  if (word.params.dimension != 3) throw InvalidInput("omega collisions need dimension 3");
  const double norm = std::sqrt(omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]);
  if (std::abs(norm - 1.0) > 1e-14) throw InvalidInput("collision direction must be a unit vector");
  const Index bi = static_cast<Index>(3 * pair.i), bj = static_cast<Index>(3 * pair.j);
  collide_cols(word.forward, bi, bj, omega);
  collide_rows(word.inverse, bi, bj, omega);
  word.pairs.push_back(pair);
  word.omegas.push_back(omega);
}

RotationWord sample_word(std::size_t k, const GeneratorParams& params, const AngleDistribution& rho,
                         RngStream& rng) {
  RotationWord w = identity_word(params);
  for (std::size_t l = 0; l < k; ++l) {
    const PairIndex pair = sample_pair(params, rng);
    if (params.dimension == 1)
      append_rotation(w, pair, rho.sample(rng));
    else
      append_collision(w, pair, sample_unit_sphere(rng));
  }
  return w;
}

double BlockDecomposition::row_block_deviation() const {
  const MatrixXd g = A * A.transpose() + B * B.transpose();
  return (g - MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double SingularSpectrum::reconstruction_error(const MatrixXd& A) const {
  return (U * gamma.asDiagonal() * V.transpose() - A).cwiseAbs().maxCoeff();
}

WordDecomposition decompose(const RotationWord& word) {
  const Index m = static_cast<Index>(word.params.system_coords());
  const Index n = static_cast<Index>(word.params.reservoir_coords());
  WordDecomposition out;
  const MatrixXd& W = word.inverse;
  out.blocks.A = W.topLeftCorner(m, m);
  out.blocks.B = W.topRightCorner(m, n);
  out.blocks.C = W.bottomLeftCorner(n, m);
  out.blocks.D = W.bottomRightCorner(n, n);

  Eigen::JacobiSVD<MatrixXd> svd(out.blocks.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  auto& sp = out.spectrum;
  sp.gamma = svd.singularValues();
  sp.U = svd.matrixU();
  sp.V = svd.matrixV();
  if (!sp.gamma.allFinite() || !sp.U.allFinite() || !sp.V.allFinite())
    throw NumericalError("SVD of the system block failed; A =\n" + dump(out.blocks.A));
  sp.overshoot = std::max(0.0, sp.gamma.maxCoeff() - 1.0);
  if (sp.overshoot > kGammaClamp)
    throw NumericalError("singular value above 1 by " + std::to_string(sp.overshoot) + "; A =\n" +
                         dump(out.blocks.A));
  sp.gamma = sp.gamma.cwiseMin(1.0);
  return out;
}

std::vector<double> sigma_weights(const VectorXd& gamma) {
  const std::size_t n = static_cast<std::size_t>(gamma.size());
  if (n > 20) throw InvalidInput("subset enumeration limited to 20 coordinates");
  std::vector<double> w(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < w.size(); ++mask) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g2 = gamma[static_cast<Index>(i)] * gamma[static_cast<Index>(i)];
      p *= (mask >> i & 1U) ? (1.0 - g2) : g2;
    }
    w[mask] = p;
  }
  return w;
}

SigmaCollapse sigma_collapse(const VectorXd& gamma) {
  const auto w = sigma_weights(gamma);
  SigmaCollapse out;
  out.diagonal = VectorXd::Zero(gamma.size());
  for (std::size_t mask = 0; mask < w.size(); ++mask) {
    out.total += w[mask];
    for (Index i = 0; i < gamma.size(); ++i)
      if (!(mask >> i & 1U)) out.diagonal[i] += w[mask];
  }
  return out;
}

double WordChecks::max_deviation() const {
  return std::max({gram, row_block, gamma_below, gamma_above, reconstruction, sigma_total, sigma_projector});
}

WordChecks check_word(const RotationWord& word) {
  WordChecks c;
  c.gram = word.gram_deviation();
  const auto d = decompose(word);
  c.row_block = d.blocks.row_block_deviation();
  c.gamma_below = std::max(0.0, -d.spectrum.gamma.minCoeff());
  c.gamma_above = d.spectrum.overshoot;
  c.reconstruction = d.spectrum.reconstruction_error(d.blocks.A);
  if (d.spectrum.gamma.size() <= 20) {
    const auto s = sigma_collapse(d.spectrum.gamma);
    c.sigma_total = std::abs(s.total - 1.0);
    c.sigma_projector = (s.diagonal - d.spectrum.gamma.cwiseAbs2()).cwiseAbs().maxCoeff();
  }
  return c;
}

SumRuleEstimate mc_sum_rule(std::size_t k, const GeneratorParams& params, const AngleDistribution& rho,
                            std::size_t n_words, std::uint64_t seed, unsigned workers) {
  params.validate();
  if (n_words < 1) throw InvalidInput("n_words must be at least 1");
  const Index m = static_cast<Index>(params.system_coords());
  constexpr std::size_t kChunk = 1024;
  const std::size_t n_chunks = (n_words + kChunk - 1) / kChunk;
  struct Partial {
    MatrixXd sum, sum_sq;
  };
  std::vector<Partial> partials(n_chunks);
  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (;;) {
      const std::size_t c = cursor.fetch_add(1);
      if (c >= n_chunks) return;
      Partial p{MatrixXd::Zero(m, m), MatrixXd::Zero(m, m)};
      const std::size_t end = std::min(n_words, (c + 1) * kChunk);
      for (std::size_t w = c * kChunk; w < end; ++w) {
        RngStream rng = RngStream::for_stream(seed, w);
        const RotationWord word = sample_word(k, params, rho, rng);
        const MatrixXd A = word.inverse.topLeftCorner(m, m);
        const MatrixXd z = A * A.transpose();
        p.sum += z;
        p.sum_sq += z.cwiseAbs2();
      }
      partials[c] = std::move(p);
    }
  };
  const unsigned n_threads = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }

  MatrixXd sum = MatrixXd::Zero(m, m), sum_sq = MatrixXd::Zero(m, m);
  for (const auto& p : partials) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  SumRuleEstimate est;
  est.k = k;
  est.n_words = n_words;
  est.c_km = c_km(static_cast<unsigned>(k), params, rho);
  const double n = static_cast<double>(n_words);
  est.Z_hat = sum / n;
  est.se = MatrixXd::Zero(m, m);
  if (n_words > 1) {
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b) {
        const double var = std::max(0.0, (sum_sq(a, b) - n * est.Z_hat(a, b) * est.Z_hat(a, b)) / (n - 1.0));
        est.se(a, b) = std::sqrt(var / n);
      }
  }
  est.diag_mean = est.Z_hat.diagonal().mean();
  est.max_se = est.se.maxCoeff();
  est.pass = true;
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) {
      const double target = a == b ? est.c_km : 0.0;
      const double dev = std::abs(est.Z_hat(a, b) - target);
      if (a == b)
        est.max_diag_deviation = std::max(est.max_diag_deviation, dev);
      else
        est.max_offdiag = std::max(est.max_offdiag, dev);
      const double z = dev / std::max(est.se(a, b), kSumRuleSeFloor);
      est.max_z_score = std::max(est.max_z_score, z);
      if (z > 4.0) est.pass = false;
    }
  return est;
}

MarginalCheck gaussian_marginal_check(const MatrixXd& A, const MatrixXd& B, const VectorFunction& h,
                                      std::size_t order, std::span<const VectorXd> points) {
  if (A.rows() != A.cols() || B.rows() != A.rows()) throw InvalidInput("block shapes do not match");
  if (A.rows() > 4 || B.cols() > 4) throw InvalidInput("tensor quadrature limited to 4 dimensions per side");
  const MatrixXd G = A * A.transpose() + B * B.transpose();
  if ((G - MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidInput("blocks do not satisfy A A^T + B B^T = I");
  const MatrixXd S = psd_sqrt(MatrixXd::Identity(A.rows(), A.rows()) - A * A.transpose());
  std::vector<double> coarse, fine;
  MarginalCheck out;
  out.residual = marginal_residual(A, B, S, h, gauss_hermite_thermal(order), points, coarse);
  marginal_residual(A, B, S, h, gauss_hermite_thermal(2 * order), points, fine);
  for (std::size_t i = 0; i < coarse.size(); ++i)
    out.order_difference = std::max(out.order_difference, std::abs(coarse[i] - fine[i]));
  out.order_too_low = out.order_difference > 1e-10;
  return out;
}

AngleAlphabet alphabet_from(const DiscreteAngleMeasure& nu) {
  AngleAlphabet a;
  for (std::size_t i = 0; i < nu.thetas.size(); ++i) {
    if (nu.weights[i] <= 0.0) continue;
    a.thetas.push_back(nu.thetas[i]);
    a.weights.push_back(nu.weights[i]);
  }
  return a;
}

AngleAlphabet alphabet_from(const SphereQuadrature& sphere) {
  AngleAlphabet a;
  a.omegas = sphere.nodes;
  a.weights = sphere.weights;
  return a;
}

BLDatum build_bl_datum(std::size_t k, const GeneratorParams& params, const AngleAlphabet& alphabet) {
  params.validate();
  const bool planar = params.dimension == 1;
  if (alphabet.size() == 0) throw InvalidInput("empty angle alphabet");
  if ((planar ? alphabet.thetas.size() : alphabet.omegas.size()) != alphabet.size())
    throw InvalidInput("angle alphabet does not match the dimension");
  const std::size_t m = params.system_coords();
  if (m > 20) throw InvalidInput("subset enumeration limited to 20 system coordinates");

  struct Letter {
    PairIndex pair;
    std::size_t param;
    double weight;
  };
  std::vector<Letter> letters;
  for (const auto& p : all_pairs(params.M, params.N)) {
    const double lw = params.pair_weight(p.kind);
    if (lw <= 0.0) continue;
    for (std::size_t q = 0; q < alphabet.size(); ++q)
      if (alphabet.weights[q] > 0.0) letters.push_back({p, q, lw * alphabet.weights[q]});
  }

  const double subsets = std::ldexp(1.0, static_cast<int>(m)) - 1.0;
  const double words = std::pow(static_cast<double>(letters.size()), static_cast<double>(k));
  if (words * subsets > static_cast<double>(kMaxDatumTerms))
    throw InvalidInput("datum enumeration would exceed " + std::to_string(kMaxDatumTerms) + " terms");

  double mu_nu = params.mu / 3.0;
  if (planar) {
    double s2 = 0.0;
    for (std::size_t q = 0; q < alphabet.size(); ++q)
      s2 += alphabet.weights[q] * std::sin(alphabet.thetas[q]) * std::sin(alphabet.thetas[q]);
    mu_nu = params.mu * s2;
  }
  const double C = c_km(static_cast<unsigned>(k), params, mu_nu);

  BLDatum datum;
  datum.dim = m;
  std::vector<std::size_t> digits(k, 0);
  const std::size_t n_words = static_cast<std::size_t>(words);
  for (std::size_t w = 0; w < n_words; ++w) {
    RotationWord word = identity_word(params);
    double weight = 1.0;
    for (std::size_t l = 0; l < k; ++l) {
      const Letter& L = letters[digits[l]];
      weight *= L.weight;
      if (planar)
        append_rotation(word, L.pair, alphabet.thetas[L.param]);
      else
        append_collision(word, L.pair, alphabet.omegas[L.param]);
    }
    const auto dec = decompose(word);
    const auto sw = sigma_weights(dec.spectrum.gamma);
    const MatrixXd Ut = dec.spectrum.U.transpose();
    for (std::size_t mask = 0; mask < sw.size(); ++mask) {
      const double c = weight * sw[mask] / C;
      if (c <= 0.0) continue;
      std::vector<Index> keep;
      for (std::size_t i = 0; i < m; ++i)
        if (!(mask >> i & 1U)) keep.push_back(static_cast<Index>(i));
      if (keep.empty()) continue;
      MatrixXd Bm(static_cast<Index>(keep.size()), static_cast<Index>(m));
      for (std::size_t r = 0; r < keep.size(); ++r) Bm.row(static_cast<Index>(r)) = Ut.row(keep[r]);
      datum.terms.push_back({std::move(Bm), c});
    }
    for (std::size_t l = 0; l < k; ++l) {
      if (++digits[l] < letters.size()) break;
      digits[l] = 0;
    }
  }
  return datum;
}

}  // namespace kac
