#include "kacsim/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kacsim/errors.hpp"
#include "kacsim/io.hpp"
#include "kacsim/kdtree.hpp"
#include "kacsim/moments.hpp"
#include "kacsim/rng.hpp"

namespace kac {

namespace {

constexpr double kPi = std::numbers::pi;

double digamma_int(std::size_t n) {
  double s = -std::numbers::egamma_v<double>;
  for (std::size_t j = 1; j < n; ++j) s += 1.0 / static_cast<double>(j);
  return s;
}

double log_unit_ball_volume(std::size_t dim) {
  const double d = static_cast<double>(dim);
  return 0.5 * d * std::log(kPi) - std::lgamma(0.5 * d + 1.0);
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Standard deviation of resampled means of `terms`.
double bootstrap_se(const std::vector<double>& terms, std::size_t resamples, std::uint64_t seed) {
  if (resamples < 2) return 0.0;
  RngStream rng(seed);
  const std::size_t n = terms.size();
  std::vector<double> means;
  means.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += terms[rng.index(n)];
    means.push_back(s / static_cast<double>(n));
  }
  const double m = mean_of(means);
  double v = 0.0;
  for (double x : means) v += (x - m) * (x - m);
  return std::sqrt(v / static_cast<double>(resamples - 1));
}

struct KnnTerms {
  std::vector<double> log_eps;  // dim * log eps_i
  double offset = 0.0;          // psi(n) - psi(k) + log V_dim
  std::vector<std::string> warnings;
  std::vector<double> points;   // possibly jittered copy
};

KnnTerms knn_terms(const SampleCloud& cloud, const KnnOptions& opts) {
  cloud.validate();
  const std::size_t n = cloud.size();
  const std::size_t dim = cloud.dim;
  if (opts.k < 1 || opts.k >= n) throw InvalidInput("knn estimator needs 1 <= k < n");

  KnnTerms out;
  out.points = cloud.points;
  out.offset = digamma_int(n) - digamma_int(opts.k) + log_unit_ball_volume(dim);
  out.log_eps.resize(n);
  for (int attempt = 0; attempt < 2; ++attempt) {
    KdTree tree(out.points, dim);
    bool degenerate = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double eps = tree.kth_neighbor_distance(i, opts.k);
      if (!(eps > 0.0)) {
        degenerate = true;
        break;
      }
      out.log_eps[i] = static_cast<double>(dim) * std::log(eps);
    }
    if (!degenerate) return out;
    if (attempt == 1) throw NumericalError("knn estimator: duplicate points persist after jitter");
    double scale = 0.0;
    for (double x : out.points) scale = std::max(scale, std::abs(x));
    RngStream rng(opts.bootstrap_seed ^ 0x6a177e5ULL);
    for (double& x : out.points) x += 1e-12 * (scale > 0.0 ? scale : 1.0) * rng.normal();
    out.warnings.push_back("duplicate sample points: jittered at 1e-12 scale");
  }
  return out;
}

}  // namespace

void SampleCloud::validate() const {
  if (dim < 1 || points.size() % dim != 0) throw InvalidInput("sample cloud has inconsistent shape");
  if (size() < 2) throw InvalidInput("sample cloud needs at least 2 points");
  for (double x : points)
    if (!std::isfinite(x)) throw InvalidInput("sample cloud contains non-finite entries");
}

DifferentialEntropy knn_differential_entropy(const SampleCloud& cloud, const KnnOptions& opts) {
  KnnTerms terms = knn_terms(cloud, opts);
  DifferentialEntropy out;
  out.value = terms.offset + mean_of(terms.log_eps);
  out.std_error = bootstrap_se(terms.log_eps, opts.bootstrap, opts.bootstrap_seed);
  out.warnings = std::move(terms.warnings);
  return out;
}

EntropyEstimate relative_entropy_to_thermal(const SampleCloud& cloud, const KnnOptions& opts) {
  KnnTerms terms = knn_terms(cloud, opts);
  const std::size_t n = cloud.size();
  const std::size_t dim = cloud.dim;
  std::vector<double> combined(n), energy(n);
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    for (std::size_t a = 0; a < dim; ++a) e += cloud.points[i * dim + a] * cloud.points[i * dim + a];
    energy[i] = kPi * e;
    combined[i] = energy[i] - terms.log_eps[i];
  }
  EntropyEstimate est;
  est.differential = terms.offset + mean_of(terms.log_eps);
  est.energy_term = mean_of(energy);
  est.value = est.energy_term - est.differential;
  est.std_error = bootstrap_se(combined, opts.bootstrap, opts.bootstrap_seed);
  est.estimator = "knn";
  est.k = opts.k;
  est.n = n;
  est.warnings = std::move(terms.warnings);
  return est;
}

namespace {

double histogram_entropy(const std::vector<double>& x, std::size_t bins) {
  const double n = static_cast<double>(x.size());
  const double m = mean_of(x);
  double v = 0.0;
  for (double a : x) v += (a - m) * (a - m);
  const double sd = std::sqrt(v / (n - 1.0));
  if (!(sd > 0.0)) throw NumericalError("histogram estimator: zero sample spread");
  const double lo = m - 6.0 * sd, width = 12.0 * sd / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double a : x) {
    auto b = static_cast<long>(std::floor((a - lo) / width));
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  double h = 0.0;
  for (double c : counts)
    if (c > 0.0) {
      const double p = c / n;
      h -= p * std::log(p / width);
    }
  return h;
}

}  // namespace

DifferentialEntropy histogram_differential_entropy(const SampleCloud& cloud, std::size_t bins,
                                                   std::size_t bootstrap, std::uint64_t seed) {
  cloud.validate();
  if (cloud.dim != 1) throw InvalidInput("histogram estimator is only offered for dimension 1");
  if (bins < 2) throw InvalidInput("histogram estimator needs at least 2 bins");
  DifferentialEntropy out;
  out.value = histogram_entropy(cloud.points, bins);
  if (bootstrap >= 2) {
    RngStream rng(seed);
    const std::size_t n = cloud.points.size();
    std::vector<double> vals, resample(n);
    for (std::size_t b = 0; b < bootstrap; ++b) {
      for (std::size_t i = 0; i < n; ++i) resample[i] = cloud.points[rng.index(n)];
      vals.push_back(histogram_entropy(resample, bins));
    }
    const double m = mean_of(vals);
    double v = 0.0;
    for (double a : vals) v += (a - m) * (a - m);
    out.std_error = std::sqrt(v / static_cast<double>(bootstrap - 1));
  }
  return out;
}

EntropyEstimate relative_entropy_histogram(const SampleCloud& cloud, std::size_t bins) {
  const DifferentialEntropy h = histogram_differential_entropy(cloud, bins);
  EntropyEstimate est;
  std::vector<double> energy;
  for (double x : cloud.points) energy.push_back(kPi * x * x);
  est.energy_term = mean_of(energy);
  est.differential = h.value;
  est.value = est.energy_term - h.value;
  const double se_energy = bootstrap_se(energy, 50, 0x5eed);
  est.std_error = std::sqrt(h.std_error * h.std_error + se_energy * se_energy);
  est.estimator = "histogram";
  est.bins = bins;
  est.n = cloud.size();
  return est;
}

double gaussian_initial_entropy(const InitialCondition& init, const GeneratorParams& params) {
  auto per_coord = [](double s) {
    const double r = 2.0 * kPi * s;
    return 0.5 * (r - 1.0 - std::log(r));
  };
  const double ds = static_cast<double>(params.system_coords());
  switch (init.kind) {
    case InitialCondition::Kind::GaussianProduct:
      return ds * per_coord(init.variance);
    case InitialCondition::Kind::TwoTemperature: {
      const double hot = static_cast<double>(init.n_hot * static_cast<std::size_t>(params.dimension));
      return hot * per_coord(init.hot_variance) + (ds - hot) * per_coord(init.cold_variance);
    }
    case InitialCondition::Kind::ShiftedGaussian: {
      double shift = 0.0;
      for (double m : init.mean) shift += m * m;
      return ds * per_coord(init.variance) + kPi * shift;
    }
    case InitialCondition::Kind::Custom:
      break;
  }
  throw InvalidInput("no closed-form entropy for a custom initial condition; estimate S(f0) from samples");
}

double default_bias_margin(const GeneratorParams& params) {
  return 0.02 * static_cast<double>(params.system_coords());
}

DecayReport decay_check(const std::vector<double>& t_grid, const std::vector<EntropyEstimate>& estimates,
                        double s0, const GeneratorParams& params, const AngleDistribution& rho,
                        double bias_margin) {
  if (t_grid.size() != estimates.size()) throw InvalidInput("decay_check: one estimate per grid time required");
  DecayReport report;
  report.s0 = s0;
  report.bias_margin = bias_margin;
  if (params.N < params.M)
    report.warnings.push_back("N < M: the decay bound is only established for N >= M");
  const DecayEnvelope env = make_envelope(params, rho);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    DecayRow row;
    row.t = t_grid[i];
    row.s_hat = estimates[i].value;
    row.se = estimates[i].std_error;
    row.envelope_times_s0 = env(row.t) * s0;
    row.margin = row.envelope_times_s0 + 3.0 * row.se + bias_margin - row.s_hat;
    row.pass = row.margin >= 0.0;
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace kac
