#include "fastron/point_set.hpp"

namespace fastron {

bool in_unit_box(std::span<const double> p) {
  for (double v : p) {
    if (!(v >= -1.0 && v <= 1.0)) return false;
  }
  return true;
}

void PointSet::compact(std::span<const std::size_t> keep) {
  std::size_t out = 0;
  for (std::size_t src : keep) {
    if (src != out) {
      for (std::size_t k = 0; k < dim_; ++k) coords_[out * dim_ + k] = coords_[src * dim_ + k];
    }
    ++out;
  }
  coords_.resize(out * dim_);
}

}  // namespace fastron
