#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fastron/point_set.hpp"

namespace fastron {

inline double squared_distance_unchecked(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

// Rational quadratic kernel with p = 2, as a function of squared distance.
inline double rq_from_squared_distance(double sq, double gamma) {
  const double t = 1.0 + 0.5 * gamma * sq;
  return 1.0 / (t * t);
}

double squared_distance(std::span<const double> x, std::span<const double> y);

// (1 + gamma/2 * |x-y|^2)^-2
double rq_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// exp(-gamma * |x-y|^2)
double gaussian_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Gram matrix of the rational quadratic kernel, filled one column at a time.
//
// Storage is column-major with a leading dimension equal to the reserved
// capacity, so growing N up to the capacity never moves existing entries.
// Column j is valid (for all current rows) iff column_computed(j).
class LazyGramMatrix {
 public:
  explicit LazyGramMatrix(double gamma = 1.0, std::size_t capacity_hint = 0);

  double gamma() const { return gamma_; }
  std::size_t size() const { return n_; }
  std::size_t capacity() const { return capacity_; }

  // Drops all entries and sizes the matrix to n x n with no column computed.
  void reset(std::size_t n);

  bool column_computed(std::size_t j) const { return computed_[j] != 0; }
  std::size_t computed_columns() const;

  // Computes column j against every point of `points` unless already done.
  void ensure_column(const PointSet& points, std::size_t j);

  // Completes every column of the first `old_count` points over all rows of
  // `points` (old rows followed by new rows) and grows the matrix to
  // points.size(). Columns of the new points stay lazy.
  void complete_and_extend(const PointSet& points, std::size_t old_count);

  // Keeps the rows and columns listed in `keep` (ascending indices).
  void compact(std::span<const std::size_t> keep);

  // Entry (i, j); column j must be computed.
  double operator()(std::size_t i, std::size_t j) const { return data_[j * capacity_ + i]; }
  std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * capacity_, n_};
  }

  std::uint64_t kernel_evaluations() const { return kernel_evals_; }
  std::uint64_t reallocations() const { return reallocations_; }

 private:
  void grow_to(std::size_t n);
  double eval(const PointSet& points, std::size_t i, std::size_t j);

  double gamma_;
  std::size_t n_ = 0;
  std::size_t capacity_ = 0;
  std::vector<double> data_;
  std::vector<unsigned char> computed_;
  std::uint64_t kernel_evals_ = 0;
  std::uint64_t reallocations_ = 0;
};

}  // namespace fastron
