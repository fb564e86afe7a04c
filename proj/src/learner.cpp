#include "fastron/learner.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace fastron {
namespace {

// Partial sums run in kLanes independent accumulators so the loop vectorizes
// without reassociation; the summation order is fixed by the lane layout.
// Four kernel terms share one division: a1/x1 + ... + a4/x4 over a common
// denominator. Each x = (1 + gamma/2 |q - s|^2)^2 is >= 1, so the products
// stay far from overflow.
constexpr std::size_t kLanes = 8;

template <std::size_t D>
inline double rq_denominator(const double* coords, std::size_t n, std::size_t j, const double* q,
                             double gamma) {
  double sq = 0.0;
  for (std::size_t k = 0; k < D; ++k) {
    const double t = coords[k * n + j] - q[k];
    sq += t * t;
  }
  const double t = 1.0 + 0.5 * gamma * sq;
  return t * t;
}

template <std::size_t D>
double sum_fixed(const double* coords, const double* alpha, std::size_t n, const double* q,
                 double gamma) {
  double acc[kLanes] = {};
  std::size_t j = 0;
  for (; j + 4 * kLanes <= n; j += 4 * kLanes) {
    double x[4][kLanes];
    for (std::size_t m = 0; m < 4; ++m) {
      for (std::size_t l = 0; l < kLanes; ++l) {
        x[m][l] = rq_denominator<D>(coords, n, j + m * kLanes + l, q, gamma);
      }
    }
    const double* a = alpha + j;
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double p12 = x[0][l] * x[1][l];
      const double p34 = x[2][l] * x[3][l];
      const double num = (a[l] * x[1][l] + a[l + kLanes] * x[0][l]) * p34 +
                         (a[l + 2 * kLanes] * x[3][l] + a[l + 3 * kLanes] * x[2][l]) * p12;
      acc[l] += num / (p12 * p34);
    }
  }
  for (; j + kLanes <= n; j += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      acc[l] += alpha[j + l] / rq_denominator<D>(coords, n, j + l, q, gamma);
    }
  }
  for (; j < n; ++j) acc[j % kLanes] += alpha[j] / rq_denominator<D>(coords, n, j, q, gamma);
  double f = 0.0;
  for (double v : acc) f += v;
  return f;
}

double sum_dynamic(const double* coords, const double* alpha, std::size_t n, std::size_t d,
                   const double* q, double gamma) {
  double acc[kLanes] = {};
  for (std::size_t j = 0; j < n; ++j) {
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = coords[k * n + j] - q[k];
      sq += t * t;
    }
    acc[j % kLanes] += alpha[j] * rq_from_squared_distance(sq, gamma);
  }
  double f = 0.0;
  for (double v : acc) f += v;
  return f;
}

std::vector<std::size_t> lexicographic_order(const PointSet& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto pa = pts[a];
    const auto pb = pts[b];
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  return order;
}

bool same_point(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

void TrainParams::validate() const {
  require(gamma > 0.0, "gamma must be positive");
  require(beta >= 1.0, "beta must be >= 1");
  require(iter_max >= 1, "iter_max must be >= 1");
  require(max_support >= 1, "max_support must be >= 1");
}

FastronModel::FastronModel(std::size_t dim, TrainParams params)
    : params_(params), points_(dim), gram_(params.gamma, 0) {
  require(dim >= 1, "model dimension must be >= 1");
  params_.validate();
}

void FastronModel::check_unique(const PointSet& extra) const {
  PointSet all(dim());
  all.reserve(size() + extra.size());
  for (std::size_t i = 0; i < size(); ++i) all.push_back(points_[i]);
  for (std::size_t i = 0; i < extra.size(); ++i) all.push_back(extra[i]);
  const auto order = lexicographic_order(all);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (same_point(all[order[k - 1]], all[order[k]])) {
      throw DuplicatePointError("duplicate point at indices " + std::to_string(order[k - 1]) +
                                " and " + std::to_string(order[k]));
    }
  }
}

void FastronModel::set_data(const PointSet& points, std::span<const Label> labels) {
  require(points.dim() == dim(), "data dimension does not match model");
  require(points.size() == labels.size(), "one label per point is required");
  PointSet none(dim());
  points_ = none;
  labels_.clear();
  check_unique(points);

  const std::size_t n = points.size();
  points_ = points;
  labels_.assign(labels.begin(), labels.end());
  alpha_.assign(n, 0.0);
  hyp_.assign(n, 0.0);
  gram_ = LazyGramMatrix(params_.gamma, std::max(n, params_.max_support));
  gram_.reset(n);
  support_count_ = 0;
  rebuild_query_cache();
}

std::size_t FastronModel::misclassified_count() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < size(); ++i) c += margin(i) <= 0.0 ? 1 : 0;
  return c;
}

void FastronModel::apply_column(std::size_t i, double scale) {
  const auto col = gram_.column(i);
  for (std::size_t r = 0; r < col.size(); ++r) hyp_[r] += scale * col[r];
}

void FastronModel::recount_support() {
  support_count_ = static_cast<std::size_t>(
      std::count_if(alpha_.begin(), alpha_.end(), [](double a) { return a != 0.0; }));
}

TrainReport FastronModel::train() {
  TrainReport report;
  const std::size_t n = size();
  std::vector<double> alpha_before = alpha_;
  std::vector<double> hyp_before = hyp_;
  if (params_.record_loss) report.loss_trace.push_back(loss());

  for (std::size_t iter = 0; iter < params_.iter_max; ++iter) {
    std::size_t worst = 0;
    double worst_margin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = margin(i);
      if (i == 0 || m < worst_margin) {
        worst = i;
        worst_margin = m;
      }
    }

    if (n > 0 && worst_margin <= 0.0) {
      gram_.ensure_column(points_, worst);
      const bool was_support = alpha_[worst] != 0.0;
      if (was_support || support_count_ < params_.max_support) {
        const double delta = bias(worst) * to_double(labels_[worst]) - hyp_[worst];
        alpha_[worst] += delta;
        apply_column(worst, delta);
        if (!was_support && alpha_[worst] != 0.0) ++support_count_;
        if (was_support && alpha_[worst] == 0.0) --support_count_;
        ++report.corrections;
        report.iterations_used = iter + 1;
        report.steps.push_back(StepKind::kCorrection);
        if (params_.record_loss) report.loss_trace.push_back(loss());
        continue;
      }
      report.cap_terminated = true;
    }

    alpha_before = alpha_;
    hyp_before = hyp_;
    if (remove_redundant_step()) {
      report.cap_terminated = false;
      ++report.removals;
      report.iterations_used = iter + 1;
      report.steps.push_back(StepKind::kRemoval);
      if (params_.record_loss) report.loss_trace.push_back(loss());
      continue;
    }
    break;
  }

  std::size_t before_bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    before_bad += to_double(labels_[i]) * hyp_before[i] <= 0.0 ? 1 : 0;
  }
  if (before_bad < misclassified_count()) {
    alpha_ = std::move(alpha_before);
    hyp_ = std::move(hyp_before);
    recount_support();
    report.reverted = true;
  }
  report.final_misclassified = misclassified_count();
  rebuild_query_cache();
  return report;
}

bool FastronModel::remove_redundant_step() {
  std::size_t best = size();
  double best_margin = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (alpha_[i] == 0.0) continue;
    const double resultant = to_double(labels_[i]) * (hyp_[i] - alpha_[i]);
    if (resultant > 0.0 && (best == size() || resultant > best_margin)) {
      best = i;
      best_margin = resultant;
    }
  }
  if (best == size()) return false;
  apply_column(best, -alpha_[best]);
  alpha_[best] = 0.0;
  --support_count_;
  return true;
}

bool FastronModel::remove_redundant() {
  const bool removed = remove_redundant_step();
  if (removed) rebuild_query_cache();
  return removed;
}

double FastronModel::loss() const {
  double quad = 0.0;
  double lin = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (alpha_[j] == 0.0) continue;
    const auto col = gram_.column(j);
    double kj = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (alpha_[i] != 0.0) kj += col[i] * alpha_[i];
    }
    quad += alpha_[j] * kj;
    lin += bias(j) * to_double(labels_[j]) * alpha_[j];
  }
  return 0.5 * quad - lin;
}

std::size_t FastronModel::sparsify() {
  std::vector<std::size_t> keep;
  keep.reserve(support_count_);
  for (std::size_t i = 0; i < size(); ++i) {
    if (alpha_[i] != 0.0) keep.push_back(i);
  }
  const std::size_t dropped = size() - keep.size();
  if (dropped == 0) return 0;
  points_.compact(keep);
  gram_.compact(keep);
  for (std::size_t a = 0; a < keep.size(); ++a) {
    labels_[a] = labels_[keep[a]];
    alpha_[a] = alpha_[keep[a]];
    hyp_[a] = hyp_[keep[a]];
  }
  labels_.resize(keep.size());
  alpha_.resize(keep.size());
  hyp_.resize(keep.size());
  rebuild_query_cache();
  return dropped;
}

void FastronModel::append_points(const PointSet& extra, std::span<const Label> extra_labels) {
  require(extra.dim() == dim(), "appended points have the wrong dimension");
  require(extra.size() == extra_labels.size(), "one label per appended point is required");
  if (extra.empty()) return;
  check_unique(extra);

  const std::size_t old = size();
  for (std::size_t i = 0; i < extra.size(); ++i) points_.push_back(extra[i]);
  labels_.insert(labels_.end(), extra_labels.begin(), extra_labels.end());
  alpha_.resize(points_.size(), 0.0);
  hyp_.resize(points_.size(), 0.0);
  gram_.complete_and_extend(points_, old);

  for (std::size_t j = 0; j < old; ++j) {
    if (alpha_[j] == 0.0) continue;
    const auto col = gram_.column(j);
    for (std::size_t i = old; i < size(); ++i) hyp_[i] += alpha_[j] * col[i];
  }
}

void FastronModel::relabel(std::span<const Label> labels) {
  require(labels.size() == size(), "one label per point is required");
  for (std::size_t i = 0; i < size(); ++i) {
    if (labels[i] != labels_[i] && alpha_[i] != 0.0) {
      apply_column(i, -alpha_[i]);
      alpha_[i] = 0.0;
    }
    labels_[i] = labels[i];
  }
  recount_support();
  rebuild_query_cache();
}

void FastronModel::set_weights(std::span<const double> weights) {
  require(weights.size() == size(), "one weight per point is required");
  alpha_.assign(weights.begin(), weights.end());
  std::fill(hyp_.begin(), hyp_.end(), 0.0);
  for (std::size_t j = 0; j < size(); ++j) {
    if (alpha_[j] == 0.0) continue;
    gram_.ensure_column(points_, j);
    apply_column(j, alpha_[j]);
  }
  recount_support();
  rebuild_query_cache();
}

void FastronModel::rebuild_query_cache() {
  const std::size_t d = dim();
  const std::size_t s = support_count_;
  // Zero-weight padding to a whole number of 4-lane groups adds exact zeros.
  const std::size_t group = 4 * kLanes;
  const std::size_t padded = (s + group - 1) / group * group;
  query_coords_.assign(padded * d, 0.0);
  query_alpha_.assign(padded, 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (alpha_[i] == 0.0) continue;
    const auto p = points_[i];
    for (std::size_t k = 0; k < d; ++k) query_coords_[k * padded + j] = p[k];
    query_alpha_[j] = alpha_[i];
    ++j;
  }
}

double FastronModel::hypothesis(std::span<const double> q) const {
  require(q.size() == dim(), "query dimension does not match model");
  const std::size_t n = query_alpha_.size();
  const double* c = query_coords_.data();
  const double* a = query_alpha_.data();
  const double g = params_.gamma;
  switch (dim()) {
    case 2: return sum_fixed<2>(c, a, n, q.data(), g);
    case 3: return sum_fixed<3>(c, a, n, q.data(), g);
    case 4: return sum_fixed<4>(c, a, n, q.data(), g);
    default: return sum_dynamic(c, a, n, dim(), q.data(), g);
  }
}

Label FastronModel::predict(std::span<const double> q) const {
  return hypothesis(q) >= 0.0 ? Label::kCollision : Label::kFree;
}

}  // namespace fastron
