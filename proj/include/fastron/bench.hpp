#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastron/active_sampler.hpp"
#include "fastron/kinematics.hpp"
#include "fastron/learner.hpp"
#include "fastron/planners.hpp"

namespace fastron::bench {

struct RobotConfig {
  enum class Type { kDof2, kDof4, kCustom };
  Type type = Type::kDof2;
  double rod_length = 1.0;
  double radius = 0.05;
  LinkShape link_shape = LinkShape::kCapsule;
  std::vector<RevoluteJoint> custom_joints;
};

struct MotionConfig {
  enum class Mode { kNone, kTranslate, kTeleport };
  Mode mode = Mode::kNone;
  std::size_t steps = 0;
  double speed = 0.02;            // world units per step
  std::size_t teleport_every = 10;
};

struct ObstacleConfig {
  std::size_t count_min = 4;
  std::size_t count_max = 4;
  double size_min = 0.2;          // cube side length
  double size_max = 0.4;
  Vec3 placement_min = Vec3(-1.0, -1.0, 0.0);
  Vec3 placement_max = Vec3(1.0, 1.0, 1.0);
  double base_clearance = 0.2;    // no obstacle within this distance of the base
  std::vector<ConvexBody> fixed;  // placed in addition to random cubes
  MotionConfig motion;
};

struct Region {
  InputPoint lo;
  InputPoint hi;
};

struct PlanningConfig {
  PlannerParams params;
  std::optional<Region> start_region;
  std::optional<Region> goal_region;
  std::size_t endpoint_attempts = 1000;
};

struct EvalConfig {
  std::size_t test_points = 10000;
  std::size_t timing_calls = 100000;
  std::size_t timing_batch = 1000;
};

struct SweepConfig {
  enum class Parameter { kBeta, kGamma, kObstacleCount };
  Parameter parameter = Parameter::kBeta;
  std::vector<double> values;
};

struct Thresholds {
  std::optional<double> min_mean_accuracy;
  std::optional<double> max_support;
  std::optional<double> min_query_speedup;
  std::optional<std::size_t> accuracy_after_step;
  std::optional<double> min_certified_fraction;
  bool exact_oracle_calls = false;
  bool proxy_not_slower = false;
  // metric name ("accuracy", "tpr", "tnr", "support_count") -> +1 for
  // non-decreasing, -1 for non-increasing across sweep values.
  std::vector<std::pair<std::string, int>> trends;
};

struct ScenarioConfig {
  RobotConfig robot;
  ObstacleConfig obstacles;
  TrainParams train;
  SamplerParams sampler;
  PlanningConfig planner;
  EvalConfig eval;
  std::optional<SweepConfig> sweep;
  Thresholds thresholds;
  std::uint64_t base_seed = 0;

  std::size_t dof() const;
};

// Parses and validates a JSON scenario; throws ConfigError with the offending
// key on any schema violation.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

struct Scenario {
  KinematicChain chain;
  Workspace workspace;
};

// Stream tags for mix_seed; every run draws from its own stream.
enum class Stream : std::uint64_t {
  kScenario = 1,
  kTraining = 2,
  kHeldOut = 3,
  kTimingQueries = 4,
  kMotion = 5,
  kEndpoints = 6,
  kPlanner = 7,
  kSampler = 8,
};
std::uint64_t stream_seed(std::uint64_t seed, Stream s, std::uint64_t sub = 0);

KinematicChain build_chain(const RobotConfig& robot);
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

// Moves obstacles for one dynamic step (bounce inside the placement box, or
// teleport every `teleport_every` steps).
void advance_obstacles(const ScenarioConfig& config, Scenario& scenario, std::size_t step,
                       std::uint64_t seed);

struct MetricsRecord {
  std::string run;
  std::string method;
  std::string param;
  std::optional<double> value;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  std::optional<double> accuracy;
  std::optional<double> tpr;
  std::optional<double> tnr;
  std::optional<std::size_t> support_count;
  std::optional<std::uint64_t> oracle_calls;
  std::optional<std::size_t> train_iterations;
  std::optional<std::int64_t> query_time_proxy_ns;
  std::optional<std::int64_t> query_time_oracle_ns;
  std::optional<std::int64_t> update_time_ns;
  std::optional<std::int64_t> plan_time_ns;
  std::optional<std::int64_t> verify_time_ns;
  std::optional<std::int64_t> repair_time_ns;
  std::optional<bool> plan_found;
  std::optional<bool> certified;
  std::optional<bool> repaired;
  std::optional<std::size_t> waypoints;
};

struct Accuracy {
  double accuracy = 0.0;
  std::optional<double> tpr;
  std::optional<double> tnr;
};

// Accuracy, TPR and TNR of `model` against `oracle` on `test_points` fresh
// uniform samples drawn from `seed`.
Accuracy evaluate_accuracy(const FastronModel& model, CollisionOracle& oracle,
                           std::size_t test_points, std::uint64_t seed);

// Median over batches of the per-call time of `fn` on `queries`. `fn`
// returns a Label; results are folded into a sink so calls are not elided.
template <class Fn>
std::int64_t median_call_ns(Fn&& fn, const PointSet& queries, std::size_t calls,
                            std::size_t batch) {
  using Clock = std::chrono::steady_clock;
  const std::size_t batches = std::max<std::size_t>(1, calls / std::max<std::size_t>(1, batch));
  std::vector<double> per_call;
  per_call.reserve(batches);
  int sink = 0;
  std::size_t cursor = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < batch; ++i) {
      sink += static_cast<int>(fn(queries[cursor]));
      cursor = cursor + 1 == queries.size() ? 0 : cursor + 1;
    }
    const auto t1 = Clock::now();
    per_call.push_back(static_cast<double>((t1 - t0).count()) / static_cast<double>(batch));
  }
  [[maybe_unused]] static volatile int keep;
  keep = sink;
  std::nth_element(per_call.begin(), per_call.begin() + per_call.size() / 2, per_call.end());
  return static_cast<std::int64_t>(std::llround(per_call[per_call.size() / 2]));
}

struct RunOptions {
  std::vector<std::uint64_t> seeds;
  const FastronModel* preloaded = nullptr;  // evaluate this model instead of training
  FastronModel* trained_out = nullptr;      // receives the first seed's (or final) model
};

std::vector<MetricsRecord> run_static_eval(const ScenarioConfig& config, const RunOptions& opts);
std::vector<MetricsRecord> run_sweep(const ScenarioConfig& config, const RunOptions& opts);
std::vector<MetricsRecord> run_dynamic_eval(const ScenarioConfig& config, const RunOptions& opts);

struct PlanningTrial {
  std::uint64_t seed = 0;
  bool proxy_found = false;
  bool oracle_found = false;
  MotionPlan proxy_plan;
  MotionPlan oracle_plan;
};

std::vector<MetricsRecord> run_planning_eval(const ScenarioConfig& config, const RunOptions& opts,
                                             std::vector<PlanningTrial>* trials = nullptr);

// CSV with a fixed column order; absent metrics are empty fields, times are
// integer nanoseconds, proportions have 6 decimals.
const std::vector<std::string>& csv_columns();
// Columns holding wall-clock measurements (excluded from reproducibility diffs).
bool is_timing_column(std::string_view column);
void emit_report(const std::vector<MetricsRecord>& records, const std::filesystem::path& path);
void write_csv(const std::vector<MetricsRecord>& records, std::ostream& out);
// Whitespace-separated per-value means and standard deviations for gnuplot.
void write_sweep_summary(const std::vector<MetricsRecord>& records, std::ostream& out);

// Returns one human-readable line per failed threshold.
std::vector<std::string> check_thresholds(const ScenarioConfig& config,
                                          const std::vector<MetricsRecord>& records,
                                          std::string_view run);

}  // namespace fastron::bench
