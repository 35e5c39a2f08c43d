#include "kacsim/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace kac {

namespace {
constexpr std::size_t kLeafSize = 16;
}

KdTree::KdTree(std::span<const double> points, std::size_t dim)
    : points_(points), dim_(dim), n_(dim ? points.size() / dim : 0), order_(n_) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * n_ / kLeafSize + 2);
  if (n_ > 0) build(0, n_);
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, 0, 0.0});
  if (end - begin <= kLeafSize) return id;

  // Split along the widest extent.
  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t a = 0; a < dim_; ++a) {
    double lo = coord(order_[begin], a), hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = std::min(lo, coord(order_[i], a));
      hi = std::max(hi, coord(order_[i], a));
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = a;
    }
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t x, std::size_t y) { return coord(x, axis) < coord(y, axis); });
  nodes_[static_cast<std::size_t>(id)].axis = axis;
  nodes_[static_cast<std::size_t>(id)].split = coord(order_[mid], axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double KdTree::kth_neighbor_distance(std::size_t index, std::size_t k) const {
  // Max-heap of squared distances to the k best candidates so far.
  std::priority_queue<double> best;
  const double* q = &points_[index * dim_];
  auto bound = [&] { return best.size() < k ? INFINITY : best.top(); };

  std::vector<std::pair<int, double>> stack;  // node, lower bound on squared distance
  stack.reserve(64);
  stack.emplace_back(0, 0.0);
  while (!stack.empty()) {
    auto [id, lb] = stack.back();
    stack.pop_back();
    if (lb >= bound()) continue;
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t p = order_[i];
        if (p == index) continue;
        double d2 = 0.0;
        for (std::size_t a = 0; a < dim_; ++a) {
          const double diff = points_[p * dim_ + a] - q[a];
          d2 += diff * diff;
        }
        if (best.size() < k) {
          best.push(d2);
        } else if (d2 < best.top()) {
          best.pop();
          best.push(d2);
        }
      }
      continue;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    stack.emplace_back(far, std::max(lb, diff * diff));
    stack.emplace_back(near, lb);
  }
  return std::sqrt(best.top());
}

}  // namespace kac
