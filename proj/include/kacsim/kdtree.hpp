#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kac {

// Static k-d tree over n points in R^dim stored row-major.
class KdTree {
 public:
  KdTree(std::span<const double> points, std::size_t dim);

  std::size_t size() const { return n_; }

  // Euclidean distance from point `index` to its k-th nearest other point.
  double kth_neighbor_distance(std::size_t index, std::size_t k) const;

 private:
  struct Node {
    std::size_t begin, end;  // range in order_
    std::size_t axis;
    double split;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  double coord(std::size_t p, std::size_t a) const { return points_[p * dim_ + a]; }

  std::span<const double> points_;
  std::size_t dim_;
  std::size_t n_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace kac
