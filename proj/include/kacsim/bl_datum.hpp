#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace kac {

// One factor of a Brascamp-Lieb datum: B maps R^dim onto H = R^{B.rows()}
// with B B^T = I, weighted by c >= 0.
struct BLTerm {
  Eigen::MatrixXd B;
  double c = 0.0;

  std::size_t range_dim() const { return static_cast<std::size_t>(B.rows()); }
};

struct BLDatumReport {
  double frame_deviation = 0.0;      // max |sum c B^T B - I|
  double trace_deviation = 0.0;      // |sum c d - dim|
  double isometry_deviation = 0.0;   // max over terms of max |B B^T - I|
  double min_weight = 0.0;
  bool ok(double tol = 1e-10) const {
    return frame_deviation <= tol && trace_deviation <= tol && isometry_deviation <= tol && min_weight >= 0.0;
  }
};

struct BLDatum {
  std::size_t dim = 0;
  std::vector<BLTerm> terms;

  BLDatumReport check() const {
    BLDatumReport r;
    Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    double trace = 0.0;
    r.min_weight = terms.empty() ? 0.0 : terms.front().c;
    for (const auto& t : terms) {
      frame += t.c * t.B.transpose() * t.B;
      trace += t.c * static_cast<double>(t.range_dim());
      const Eigen::MatrixXd g = t.B * t.B.transpose() - Eigen::MatrixXd::Identity(t.B.rows(), t.B.rows());
      r.isometry_deviation = std::max(r.isometry_deviation, g.cwiseAbs().maxCoeff());
      r.min_weight = std::min(r.min_weight, t.c);
    }
    if (dim > 0) {
      r.frame_deviation = (frame - Eigen::MatrixXd::Identity(frame.rows(), frame.cols())).cwiseAbs().maxCoeff();
    }
    r.trace_deviation = std::abs(trace - static_cast<double>(dim));
    return r;
  }
};

}  // namespace kac
