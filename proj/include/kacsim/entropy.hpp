#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kacsim/angle.hpp"
#include "kacsim/kmc.hpp"
#include "kacsim/params.hpp"

namespace kac {

// n samples of the system marginal at one observation time.
struct SampleCloud {
  std::vector<double> points;  // row-major n x dim
  std::size_t dim = 1;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_traj = 0;

  std::size_t size() const { return dim ? points.size() / dim : 0; }
  // n >= 2 and all entries finite.
  void validate() const;
};

struct KnnOptions {
  std::size_t k = 4;
  std::size_t bootstrap = 50;
  std::uint64_t bootstrap_seed = 0x5eed;
};

struct DifferentialEntropy {
  double value = 0.0;
  double std_error = 0.0;
  std::vector<std::string> warnings;
};

struct EntropyEstimate {
  double value = 0.0;         // nats
  double std_error = 0.0;
  double differential = 0.0;  // estimate of -integral f log f
  double energy_term = 0.0;   // pi * sample mean of |v|^2
  std::string estimator;      // "knn" or "histogram"
  std::size_t k = 0;
  std::size_t bins = 0;
  std::size_t n = 0;
  std::vector<std::string> warnings;
};

// Nearest-neighbor (Kozachenko-Leonenko) estimate
//   psi(n) - psi(k) + log V_dim + (dim / n) sum_i log eps_i,
// eps_i the distance to the k-th neighbor. The standard error is a bootstrap
// over the per-point terms of the sum. Exact duplicates are jittered at 1e-12
// of the sample scale and reported as a warning.
DifferentialEntropy knn_differential_entropy(const SampleCloud& cloud, const KnnOptions& opts = {});

// Plug-in histogram estimate for dim = 1: 256 equal bins over +-6 sample SDs.
DifferentialEntropy histogram_differential_entropy(const SampleCloud& cloud, std::size_t bins = 256,
                                                   std::size_t bootstrap = 50, std::uint64_t seed = 0x5eed);

// S(f | thermal) = -h(f) + pi E|v|^2, both parts from the same samples.
EntropyEstimate relative_entropy_to_thermal(const SampleCloud& cloud, const KnnOptions& opts = {});
EntropyEstimate relative_entropy_histogram(const SampleCloud& cloud, std::size_t bins = 256);

// Closed-form relative entropy of a Gaussian initial law w.r.t. the thermal
// state; throws InvalidInput for custom samplers.
double gaussian_initial_entropy(const InitialCondition& init, const GeneratorParams& params);

struct DecayRow {
  double t = 0.0;
  double s_hat = 0.0;
  double se = 0.0;
  double envelope_times_s0 = 0.0;
  double margin = 0.0;  // bound - s_hat, with bound including 3 SE and bias allowance
  bool pass = false;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double s0 = 0.0;
  double bias_margin = 0.0;
  bool all_pass = true;
  std::vector<std::string> warnings;
};

// Checks S_hat(t) <= D(t) S(f0) + 3 SE + bias_margin row by row.
DecayReport decay_check(const std::vector<double>& t_grid, const std::vector<EntropyEstimate>& estimates,
                        double s0, const GeneratorParams& params, const AngleDistribution& rho,
                        double bias_margin);

// 0.02 nats per system coordinate.
double default_bias_margin(const GeneratorParams& params);

}  // namespace kac
