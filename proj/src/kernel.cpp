#include "fastron/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fastron {

double squared_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ContractViolation("kernel arguments differ in dimension (" + std::to_string(x.size()) +
                            " vs " + std::to_string(y.size()) + ")");
  }
  return squared_distance_unchecked(x.data(), y.data(), x.size());
}

double rq_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  require(gamma > 0.0, "kernel width must be positive");
  return rq_from_squared_distance(squared_distance(x, y), gamma);
}

double gaussian_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  require(gamma > 0.0, "kernel width must be positive");
  return std::exp(-gamma * squared_distance(x, y));
}

LazyGramMatrix::LazyGramMatrix(double gamma, std::size_t capacity_hint)
    : gamma_(gamma), capacity_(capacity_hint) {
  require(gamma > 0.0, "kernel width must be positive");
  data_.resize(capacity_ * capacity_);
  computed_.reserve(capacity_);
}

void LazyGramMatrix::reset(std::size_t n) {
  n_ = 0;
  computed_.clear();
  grow_to(n);
}

std::size_t LazyGramMatrix::computed_columns() const {
  return static_cast<std::size_t>(std::count(computed_.begin(), computed_.end(), 1));
}

void LazyGramMatrix::grow_to(std::size_t n) {
  if (n > capacity_) {
    const std::size_t cap = std::max(n, 2 * capacity_);
    std::vector<double> fresh(cap * cap);
    for (std::size_t j = 0; j < n_; ++j) {
      std::copy_n(data_.data() + j * capacity_, n_, fresh.data() + j * cap);
    }
    data_.swap(fresh);
    capacity_ = cap;
    ++reallocations_;
  }
  n_ = n;
  computed_.resize(n, 0);
}

double LazyGramMatrix::eval(const PointSet& points, std::size_t i, std::size_t j) {
  ++kernel_evals_;
  return rq_from_squared_distance(
      squared_distance_unchecked(points[i].data(), points[j].data(), points.dim()), gamma_);
}

void LazyGramMatrix::ensure_column(const PointSet& points, std::size_t j) {
  require(j < n_, "Gram column index out of range");
  require(points.size() == n_, "point set size does not match Gram matrix");
  if (computed_[j]) return;
  double* col = data_.data() + j * capacity_;
  for (std::size_t i = 0; i < n_; ++i) {
    if (i == j) {
      col[i] = 1.0;
    } else if (computed_[i]) {
      col[i] = data_[i * capacity_ + j];  // symmetric entry already known
    } else {
      col[i] = eval(points, i, j);
    }
  }
  computed_[j] = 1;
}

void LazyGramMatrix::complete_and_extend(const PointSet& points, std::size_t old_count) {
  require(old_count == n_, "old point count does not match Gram matrix");
  require(points.size() >= old_count, "extension cannot shrink the matrix");
  const std::size_t total = points.size();
  grow_to(total);
  for (std::size_t j = 0; j < old_count; ++j) {
    double* col = data_.data() + j * capacity_;
    const std::size_t first = computed_[j] ? old_count : 0;
    for (std::size_t i = first; i < total; ++i) {
      if (i == j) {
        col[i] = 1.0;
      } else if (i < old_count && computed_[i]) {
        col[i] = data_[i * capacity_ + j];
      } else {
        col[i] = eval(points, i, j);
      }
    }
    computed_[j] = 1;
  }
}

void LazyGramMatrix::compact(std::span<const std::size_t> keep) {
  for (std::size_t a = 0; a < keep.size(); ++a) {
    const std::size_t src = keep[a];
    require(src < n_ && (a == 0 || src > keep[a - 1]), "compaction indices must ascend");
    computed_[a] = computed_[src];
    if (!computed_[a]) continue;
    const double* from = data_.data() + src * capacity_;
    double* to = data_.data() + a * capacity_;
    for (std::size_t b = 0; b < keep.size(); ++b) to[b] = from[keep[b]];
  }
  n_ = keep.size();
  computed_.resize(n_);
}

}  // namespace fastron
