#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fastron/errors.hpp"

namespace fastron {

// A point in normalized input space; every coordinate lies in [-1, 1].
using InputPoint = std::vector<double>;

bool in_unit_box(std::span<const double> p);

// Dense row-major set of points with a fixed dimension.
class PointSet {
 public:
  explicit PointSet(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> p) {
    require(p.size() == dim_, "point dimension does not match point set");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void clear() { coords_.clear(); }

  // Keeps rows whose indices appear in `keep` (ascending), preserving order.
  void compact(std::span<const std::size_t> keep);

  std::span<const double> raw() const { return coords_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

}  // namespace fastron
