#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fastron/kinematics.hpp"
#include "fastron/learner.hpp"
#include "fastron/point_set.hpp"

namespace fastron {

// State validity predicate over input space. Counts its invocations.
class CollisionChecker {
 public:
  virtual ~CollisionChecker() = default;
  bool is_free(std::span<const double> q) {
    ++calls_;
    return check_free(q);
  }
  std::uint64_t calls() const { return calls_; }
  void reset_calls() { calls_ = 0; }

  // Whether the whole segment [a, b] may be certified free. The default is
  // the sampled test; checkers that know their clearance prove the segment.
  virtual bool certify_edge(std::span<const double> a, std::span<const double> b,
                            double resolution);

 protected:
  virtual bool check_free(std::span<const double> q) = 0;
  void count_call() { ++calls_; }

 private:
  std::uint64_t calls_ = 0;
};

class ProxyChecker final : public CollisionChecker {
 public:
  explicit ProxyChecker(const FastronModel& model) : model_(&model) {}

 protected:
  bool check_free(std::span<const double> q) override {
    return model_->predict(q) == Label::kFree;
  }

 private:
  const FastronModel* model_;
};

class OracleChecker final : public CollisionChecker {
 public:
  explicit OracleChecker(CollisionOracle& oracle) : oracle_(&oracle) {}

  // Clearance walk: from a point with clearance c, every configuration that
  // moves the bodies by less than c is free, so the walk advances by c over
  // the chain's motion bound. Exact, so `resolution` is unused.
  bool certify_edge(std::span<const double> a, std::span<const double> b,
                    double resolution) override;

 protected:
  bool check_free(std::span<const double> q) override {
    return oracle_->label(q) == Label::kFree;
  }

 private:
  CollisionOracle* oracle_;
};

class FunctionChecker final : public CollisionChecker {
 public:
  explicit FunctionChecker(std::function<bool(std::span<const double>)> fn) : fn_(std::move(fn)) {}

 protected:
  bool check_free(std::span<const double> q) override { return fn_(q); }

 private:
  std::function<bool(std::span<const double>)> fn_;
};

enum class PlannerKind { kRrt, kRrtConnect };

struct PlannerParams {
  PlannerKind kind = PlannerKind::kRrtConnect;
  double edge_resolution = 0.05;
  double step_size = 0.2;
  double goal_bias = 0.05;
  std::size_t max_iterations = 50000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PlanQuery {
  InputPoint start;
  InputPoint goal;
  PlannerParams params;
};

using Duration = std::chrono::nanoseconds;

struct MotionPlan {
  std::vector<InputPoint> waypoints;
  bool certified = false;
  bool repaired = false;
  Duration planner_time{0};
  Duration verify_time{0};
  Duration repair_time{0};
};

struct PlanResult {
  bool found = false;
  MotionPlan plan;
  std::size_t iterations = 0;
};

// True iff every sample at spacing <= resolution along [a, b], endpoints
// included, is free under `checker`.
bool edge_valid(std::span<const double> a, std::span<const double> b, CollisionChecker& checker,
                double resolution);

// Throws PlanningError if the start or goal is in collision under `checker`.
PlanResult rrt_plan(const PlanQuery& query, CollisionChecker& checker);
PlanResult rrt_connect_plan(const PlanQuery& query, CollisionChecker& checker);
PlanResult plan(const PlanQuery& query, CollisionChecker& checker);

// Indices of edges (waypoint k -> k+1) failing edge_valid under `oracle`.
// A single-waypoint plan has one degenerate edge, index 0.
std::vector<std::size_t> verify_plan(const MotionPlan& plan, CollisionChecker& oracle,
                                     double resolution);

// Like verify_plan, but an edge passes only if checker.certify_edge accepts it.
std::vector<std::size_t> certify_plan(const MotionPlan& plan, CollisionChecker& oracle,
                                      double resolution);

// Excises each run of invalid edges with one waypoint of margin on each side
// and bridges the gap with the planner using `oracle` as the checker. Edges
// still failing certify_plan are repaired again, up to three rounds; after
// that, or if a bridge fails, a full start-to-goal oracle plan is tried. The
// plan is marked certified only if certify_plan accepts it.
PlanResult repair_plan(const MotionPlan& plan, std::span<const std::size_t> invalid,
                       CollisionChecker& oracle, const PlannerParams& params);

// Plans with `planner_checker`, certifies against `oracle` and repairs if
// needed, recording the time spent in each stage.
PlanResult plan_verify_repair(const PlanQuery& query, CollisionChecker& planner_checker,
                              CollisionChecker& oracle);

}  // namespace fastron
