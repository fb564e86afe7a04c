#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fastron/kernel.hpp"
#include "fastron/point_set.hpp"

namespace fastron {

enum class Label : std::int8_t { kFree = -1, kCollision = 1 };

inline double to_double(Label y) { return static_cast<double>(static_cast<int>(y)); }
inline Label opposite(Label y) { return y == Label::kCollision ? Label::kFree : Label::kCollision; }

struct TrainParams {
  double gamma = 30.0;
  double beta = 1.0;              // conditional bias, >= 1
  std::size_t iter_max = 5000;
  std::size_t max_support = 1500;
  std::uint64_t seed = 0;
  bool record_loss = false;       // fills TrainReport::loss_trace (O(|S|^2) per step)

  void validate() const;
};

enum class StepKind : std::uint8_t { kCorrection, kRemoval };

struct TrainReport {
  std::size_t iterations_used = 0;
  std::size_t corrections = 0;
  std::size_t removals = 0;
  std::size_t final_misclassified = 0;
  bool reverted = false;
  // Training stopped because the support cap blocked a correction and no
  // redundant support point could be removed.
  bool cap_terminated = false;
  // loss_trace[0] is the loss before the first step; loss_trace[k] follows steps[k-1].
  std::vector<double> loss_trace;
  std::vector<StepKind> steps;
};

// Kernel perceptron-style proxy collision model trained by greedy coordinate
// descent on the most negative margin.
//
// Invariants maintained by every mutating operation:
//   * points, labels, weights, hypotheses and the Gram matrix share one size;
//   * every point with a nonzero weight has its Gram column computed;
//   * labels[i] * weights[i] >= 0.
class FastronModel {
 public:
  FastronModel(std::size_t dim, TrainParams params);

  std::size_t dim() const { return points_.dim(); }
  std::size_t size() const { return points_.size(); }
  std::size_t support_count() const { return support_count_; }
  const TrainParams& params() const { return params_; }
  const PointSet& points() const { return points_; }
  std::span<const Label> labels() const { return labels_; }
  std::span<const double> weights() const { return alpha_; }
  std::span<const double> hypotheses() const { return hyp_; }
  const LazyGramMatrix& gram() const { return gram_; }

  // Replaces the data set; weights and hypotheses are zeroed and the Gram
  // matrix is reset. Throws DuplicatePointError on repeated points.
  void set_data(const PointSet& points, std::span<const Label> labels);

  // Runs greedy coordinate descent with conditional bias, redundant support
  // point removal and the support cap, then restores the pre-removal snapshot
  // if it had strictly fewer misclassifications.
  TrainReport train();

  double hypothesis(std::span<const double> q) const;
  // sign(f(q)) with f == 0 mapped to kCollision.
  Label predict(std::span<const double> q) const;

  // 1/2 a^T K a - y^T B a, evaluated over the support set.
  double loss() const;

  // Removes the support point with the largest positive resultant margin.
  bool remove_redundant();

  // Discards every point with zero weight; returns how many were dropped.
  std::size_t sparsify();

  // Appends labeled points. Partially filled Gram columns are completed first
  // and the new hypothesis entries are computed from the current weights.
  void append_points(const PointSet& extra, std::span<const Label> extra_labels);

  // Replaces the labels of the current points. Support points whose label
  // flipped lose their weight so that labels[i] * weights[i] >= 0 still holds.
  void relabel(std::span<const Label> labels);

  // Installs an arbitrary weight vector and recomputes hypotheses eagerly.
  void set_weights(std::span<const double> weights);

  // Conditional bias target for point i: beta for collisions, 1 otherwise.
  double bias(std::size_t i) const { return labels_[i] == Label::kCollision ? params_.beta : 1.0; }
  double margin(std::size_t i) const { return to_double(labels_[i]) * hyp_[i]; }

  std::size_t misclassified_count() const;

 private:
  bool remove_redundant_step();
  void apply_column(std::size_t i, double scale);
  void recount_support();
  void rebuild_query_cache();
  void check_unique(const PointSet& extra) const;

  TrainParams params_;
  PointSet points_;
  std::vector<Label> labels_;
  std::vector<double> alpha_;
  std::vector<double> hyp_;
  LazyGramMatrix gram_;
  std::size_t support_count_ = 0;

  // Support points in dimension-major layout for the query hot path.
  std::vector<double> query_coords_;
  std::vector<double> query_alpha_;
};

// Text model format:
//   fastron v1 d=<d> n=<|S|> gamma=<gamma> beta=<beta>
//   <x_1> ... <x_d> <label> <weight>      (one line per support point)
// Values are written in shortest round-trip decimal form.
void save_model(const FastronModel& model, std::ostream& out);
FastronModel load_model(std::istream& in);

}  // namespace fastron
