#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "fastron/learner.hpp"
#include "fastron/point_set.hpp"
#include "fastron/random.hpp"

namespace fastron {

struct SamplerParams {
  std::size_t active_max = 500;       // points added per cycle
  std::size_t kappa = 4;              // exploitation samples per support point
  double sigma = 0.0;                 // per-axis std dev; 0 means sqrt(1 / (2 gamma))
  std::uint64_t seed = 0;
  std::size_t initial_samples = 2000; // uniform samples labeled on the first cycle

  double sigma_for(double gamma) const;
};

// Exploitation then exploration: for k = 1..kappa, one Gaussian sample around
// each support point until active_max points exist; the remainder is uniform
// in [-1, 1]^d. Gaussian draws outside the box are redrawn up to 10 times and
// then clamped.
PointSet generate_active_set(const PointSet& support, std::size_t active_max, std::size_t kappa,
                             double sigma, Rng& rng);

using Labeler = std::function<Label(std::span<const double>)>;

struct CycleReport {
  TrainReport train;
  std::uint64_t oracle_calls = 0;
  std::size_t support_count = 0;
  std::size_t active_added = 0;
  bool initial = false;
};

// One pass of the model-update loop. An empty model is seeded with
// `initial_samples` uniform configurations. Otherwise a new active set is
// generated from the current support set, the support points are relabeled
// and the active set is labeled (|S| + active_max oracle calls), and the
// model is retrained. The model is left sparsified and ready for queries.
// The RNG stream is derived from (params.seed, cycle).
CycleReport update_cycle(FastronModel& model, const Labeler& oracle, const SamplerParams& params,
                         std::uint64_t cycle);

}  // namespace fastron
