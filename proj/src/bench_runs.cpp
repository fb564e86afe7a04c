#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "fastron/bench.hpp"
#include "fastron/random.hpp"

namespace fastron::bench {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns(Clock::duration d) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(d).count();
}

PointSet uniform_points(std::size_t dim, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  PointSet pts(dim);
  pts.reserve(count);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < count; ++i) {
    rng.fill_uniform(p, -1.0, 1.0);
    pts.push_back(p);
  }
  return pts;
}

TrainParams seeded(TrainParams p, std::uint64_t seed) {
  p.seed = stream_seed(seed, Stream::kTraining);
  return p;
}

struct Trained {
  FastronModel model;
  TrainReport report;
  std::uint64_t oracle_calls = 0;
  std::int64_t update_ns = 0;
};

// Labels N0 uniform configurations, trains and sparsifies.
Trained train_static(const ScenarioConfig& config, const Scenario& scenario, std::uint64_t seed) {
  const std::size_t d = scenario.chain.dof();
  const PointSet pts =
      uniform_points(d, config.sampler.initial_samples, stream_seed(seed, Stream::kTraining));
  CollisionOracle oracle(scenario.chain, scenario.workspace);
  Trained t{FastronModel(d, seeded(config.train, seed)), {}, 0, 0};
  const auto t0 = Clock::now();
  const auto labels = oracle.label_all(pts);
  t.model.set_data(pts, labels);
  t.report = t.model.train();
  t.model.sparsify();
  t.update_ns = ns(Clock::now() - t0);
  t.oracle_calls = oracle.calls();
  return t;
}

void check_preloaded(const FastronModel* m, std::size_t dof) {
  if (m != nullptr && m->dim() != dof) {
    throw ConfigError("loaded model has dimension " + std::to_string(m->dim()) +
                      " but the robot has " + std::to_string(dof) + " joints");
  }
}

std::vector<std::uint64_t> seeds_or_default(const ScenarioConfig& config, const RunOptions& opts) {
  if (!opts.seeds.empty()) return opts.seeds;
  return {config.base_seed};
}

void fill_accuracy(MetricsRecord& r, const Accuracy& a) {
  r.accuracy = a.accuracy;
  r.tpr = a.tpr;
  r.tnr = a.tnr;
}

InputPoint sample_region(Rng& rng, const std::optional<Region>& region, std::size_t dof) {
  InputPoint p(dof);
  for (std::size_t k = 0; k < dof; ++k) {
    p[k] = region ? rng.uniform(region->lo[k], region->hi[k]) : rng.uniform(-1.0, 1.0);
  }
  return p;
}

std::optional<InputPoint> free_endpoint(Rng& rng, const std::optional<Region>& region,
                                        std::size_t dof, std::size_t attempts,
                                        CollisionChecker& proxy, CollisionChecker& oracle) {
  for (std::size_t i = 0; i < attempts; ++i) {
    auto p = sample_region(rng, region, dof);
    if (proxy.is_free(p) && oracle.is_free(p)) return p;
  }
  return std::nullopt;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

std::optional<double> metric(const MetricsRecord& r, std::string_view name) {
  if (name == "accuracy") return r.accuracy;
  if (name == "tpr") return r.tpr;
  if (name == "tnr") return r.tnr;
  if (name == "support_count" && r.support_count) return static_cast<double>(*r.support_count);
  return std::nullopt;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Accuracy evaluate_accuracy(const FastronModel& model, CollisionOracle& oracle,
                           std::size_t test_points, std::uint64_t seed) {
  const PointSet pts = uniform_points(model.dim(), test_points, seed);
  std::size_t tp = 0, tn = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Label truth = oracle.label(pts[i]);
    const bool hit = model.predict(pts[i]) == truth;
    if (truth == Label::kCollision) {
      ++pos;
      tp += hit;
    } else {
      ++neg;
      tn += hit;
    }
  }
  Accuracy a;
  a.accuracy = static_cast<double>(tp + tn) / static_cast<double>(pts.size());
  if (pos > 0) a.tpr = static_cast<double>(tp) / static_cast<double>(pos);
  if (neg > 0) a.tnr = static_cast<double>(tn) / static_cast<double>(neg);
  return a;
}

std::vector<MetricsRecord> run_static_eval(const ScenarioConfig& config, const RunOptions& opts) {
  check_preloaded(opts.preloaded, config.dof());
  std::vector<MetricsRecord> out;
  const auto seeds = seeds_or_default(config, opts);
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    const std::uint64_t seed = seeds[si];
    const Scenario scenario = build_scenario(config, seed);
    MetricsRecord r;
    r.run = "static";
    r.method = "fastron";
    r.seed = seed;

    std::optional<Trained> trained;
    if (opts.preloaded == nullptr) {
      trained.emplace(train_static(config, scenario, seed));
      r.oracle_calls = trained->oracle_calls;
      r.train_iterations = trained->report.iterations_used;
      r.update_time_ns = trained->update_ns;
    }
    const FastronModel& model = trained ? trained->model : *opts.preloaded;
    r.support_count = model.support_count();

    CollisionOracle oracle(scenario.chain, scenario.workspace);
    fill_accuracy(r, evaluate_accuracy(model, oracle, config.eval.test_points,
                                       stream_seed(seed, Stream::kHeldOut)));

    const PointSet queries =
        uniform_points(config.dof(), std::min<std::size_t>(config.eval.timing_calls, 10000),
                       stream_seed(seed, Stream::kTimingQueries));
    r.query_time_proxy_ns = median_call_ns([&](std::span<const double> q) { return model.predict(q); },
                                           queries, config.eval.timing_calls,
                                           config.eval.timing_batch);
    r.query_time_oracle_ns = median_call_ns([&](std::span<const double> q) { return oracle.label(q); },
                                            queries, config.eval.timing_calls,
                                            config.eval.timing_batch);
    if (si == 0 && opts.trained_out != nullptr && trained) *opts.trained_out = trained->model;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MetricsRecord> run_sweep(const ScenarioConfig& config, const RunOptions& opts) {
  if (!config.sweep || config.sweep->values.empty()) {
    throw ConfigError("sweep: the config has no sweep section with values");
  }
  const auto& sw = *config.sweep;
  const char* name = sw.parameter == SweepConfig::Parameter::kBeta    ? "beta"
                     : sw.parameter == SweepConfig::Parameter::kGamma ? "gamma"
                                                                      : "obstacle_count";
  std::vector<MetricsRecord> out;
  for (double v : sw.values) {
    ScenarioConfig c = config;
    switch (sw.parameter) {
      case SweepConfig::Parameter::kBeta: c.train.beta = v; break;
      case SweepConfig::Parameter::kGamma: c.train.gamma = v; break;
      case SweepConfig::Parameter::kObstacleCount:
        c.obstacles.count_min = c.obstacles.count_max = static_cast<std::size_t>(v);
        break;
    }
    RunOptions o = opts;
    o.trained_out = nullptr;
    for (auto& r : run_static_eval(c, o)) {
      r.run = "sweep";
      r.param = name;
      r.value = v;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<MetricsRecord> run_dynamic_eval(const ScenarioConfig& config, const RunOptions& opts) {
  if (config.obstacles.motion.mode == MotionConfig::Mode::kNone ||
      config.obstacles.motion.steps == 0) {
    throw ConfigError("obstacles.motion: dynamic runs need a motion mode and a step count");
  }
  check_preloaded(opts.preloaded, config.dof());
  std::vector<MetricsRecord> out;
  for (std::uint64_t seed : seeds_or_default(config, opts)) {
    Scenario scenario = build_scenario(config, seed);
    CollisionOracle oracle(scenario.chain, scenario.workspace);
    CollisionOracle evaluator(scenario.chain, scenario.workspace);
    const Labeler labeler = [&oracle](std::span<const double> q) { return oracle.label(q); };
    SamplerParams sp = config.sampler;
    sp.seed = stream_seed(seed, Stream::kSampler);
    FastronModel model = opts.preloaded ? *opts.preloaded
                                        : FastronModel(config.dof(), seeded(config.train, seed));

    for (std::size_t step = 0; step <= config.obstacles.motion.steps; ++step) {
      if (step > 0) advance_obstacles(config, scenario, step, seed);
      oracle.reset_calls();
      const auto t0 = Clock::now();
      const CycleReport cr = update_cycle(model, labeler, sp, step);
      const auto elapsed = Clock::now() - t0;

      MetricsRecord r;
      r.run = "dynamic";
      r.method = "fastron";
      r.seed = seed;
      r.step = step;
      r.update_time_ns = ns(elapsed);
      r.oracle_calls = oracle.calls();
      r.support_count = model.support_count();
      r.train_iterations = cr.train.iterations_used;
      fill_accuracy(r, evaluate_accuracy(model, evaluator, config.eval.test_points,
                                         stream_seed(seed, Stream::kHeldOut, step)));
      out.push_back(std::move(r));
    }
    if (opts.trained_out != nullptr) *opts.trained_out = model;
  }
  return out;
}

std::vector<MetricsRecord> run_planning_eval(const ScenarioConfig& config, const RunOptions& opts,
                                             std::vector<PlanningTrial>* trials) {
  check_preloaded(opts.preloaded, config.dof());
  std::vector<MetricsRecord> out;
  const auto seeds = seeds_or_default(config, opts);
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    const std::uint64_t seed = seeds[si];
    const Scenario scenario = build_scenario(config, seed);
    std::optional<Trained> trained;
    if (opts.preloaded == nullptr) trained.emplace(train_static(config, scenario, seed));
    const FastronModel& model = trained ? trained->model : *opts.preloaded;
    if (si == 0 && opts.trained_out != nullptr && trained) *opts.trained_out = trained->model;

    CollisionOracle oracle(scenario.chain, scenario.workspace);
    ProxyChecker proxy(model);
    OracleChecker exact(oracle);

    MetricsRecord pr;
    pr.run = "plan";
    pr.method = "proxy";
    pr.seed = seed;
    pr.support_count = model.support_count();
    MetricsRecord orc = pr;
    orc.method = "oracle";
    orc.support_count.reset();

    PlanningTrial trial;
    trial.seed = seed;
    Rng rng(stream_seed(seed, Stream::kEndpoints));
    const auto start = free_endpoint(rng, config.planner.start_region, config.dof(),
                                     config.planner.endpoint_attempts, proxy, exact);
    const auto goal = start ? free_endpoint(rng, config.planner.goal_region, config.dof(),
                                            config.planner.endpoint_attempts, proxy, exact)
                            : std::nullopt;
    if (!start || !goal) {
      pr.plan_found = orc.plan_found = false;
      out.push_back(pr);
      out.push_back(orc);
      if (trials) trials->push_back(std::move(trial));
      continue;
    }

    PlanQuery query{*start, *goal, config.planner.params};
    query.params.seed = stream_seed(seed, Stream::kPlanner);

    exact.reset_calls();
    PlanResult pres;
    try {
      pres = plan_verify_repair(query, proxy, exact);
    } catch (const PlanningError&) {
      pres = {};
    }
    pr.oracle_calls = exact.calls();
    pr.plan_found = pres.found;
    pr.certified = pres.found && pres.plan.certified;
    pr.repaired = pres.plan.repaired;
    pr.plan_time_ns = pres.plan.planner_time.count();
    pr.verify_time_ns = pres.plan.verify_time.count();
    pr.repair_time_ns = pres.plan.repair_time.count();
    if (pres.found) pr.waypoints = pres.plan.waypoints.size();

    exact.reset_calls();
    PlanResult ores;
    try {
      ores = plan(query, exact);
    } catch (const PlanningError&) {
      ores = {};
    }
    orc.oracle_calls = exact.calls();
    orc.plan_found = ores.found;
    orc.plan_time_ns = ores.plan.planner_time.count();
    if (ores.found) {
      // Planning only sampled each edge; certify outside the timed region.
      ores.plan.certified =
          certify_plan(ores.plan, exact, config.planner.params.edge_resolution).empty();
      orc.waypoints = ores.plan.waypoints.size();
    }
    orc.certified = ores.found && ores.plan.certified;

    trial.proxy_found = pres.found;
    trial.oracle_found = ores.found;
    trial.proxy_plan = std::move(pres.plan);
    trial.oracle_plan = std::move(ores.plan);
    if (trials) trials->push_back(std::move(trial));
    out.push_back(std::move(pr));
    out.push_back(std::move(orc));
  }
  return out;
}

std::vector<std::string> check_thresholds(const ScenarioConfig& config,
                                          const std::vector<MetricsRecord>& records,
                                          std::string_view run) {
  const auto& t = config.thresholds;
  std::vector<std::string> failures;
  std::vector<const MetricsRecord*> rs;
  for (const auto& r : records) {
    if (r.run == run) rs.push_back(&r);
  }
  if (rs.empty()) return failures;

  if (t.min_mean_accuracy) {
    const std::size_t after = t.accuracy_after_step.value_or(0);
    std::vector<double> acc;
    for (const auto* r : rs) {
      if (r->accuracy && r->step >= after) acc.push_back(*r->accuracy);
    }
    if (!acc.empty() && mean(acc) < *t.min_mean_accuracy) {
      failures.push_back("mean accuracy " + fmt(mean(acc)) + " below " + fmt(*t.min_mean_accuracy));
    }
  }
  if (t.max_support) {
    for (const auto* r : rs) {
      if (r->support_count && static_cast<double>(*r->support_count) > *t.max_support) {
        failures.push_back("seed " + std::to_string(r->seed) + ": support count " +
                           std::to_string(*r->support_count) + " above " + fmt(*t.max_support));
      }
    }
  }
  if (t.min_query_speedup) {
    std::vector<double> proxy, oracle;
    for (const auto* r : rs) {
      if (r->query_time_proxy_ns && r->query_time_oracle_ns) {
        proxy.push_back(static_cast<double>(*r->query_time_proxy_ns));
        oracle.push_back(static_cast<double>(*r->query_time_oracle_ns));
      }
    }
    if (!proxy.empty()) {
      const double ratio = median(oracle) / std::max(1.0, median(proxy));
      if (ratio < *t.min_query_speedup) {
        failures.push_back("query speedup " + fmt(ratio) + " below " + fmt(*t.min_query_speedup));
      }
    }
  }
  if (t.exact_oracle_calls) {
    std::map<std::uint64_t, std::size_t> prev_support;
    for (const auto* r : rs) {
      if (r->step > 0) {
        const auto it = prev_support.find(r->seed);
        const std::uint64_t expected =
            (it == prev_support.end() ? 0 : it->second) + config.sampler.active_max;
        if (it != prev_support.end() && r->oracle_calls != expected) {
          failures.push_back("seed " + std::to_string(r->seed) + " step " +
                             std::to_string(r->step) + ": " +
                             std::to_string(r->oracle_calls.value_or(0)) + " oracle calls, expected " +
                             std::to_string(expected));
        }
      }
      if (r->support_count) prev_support[r->seed] = *r->support_count;
    }
  }
  if (t.min_certified_fraction) {
    std::size_t found = 0, certified = 0;
    for (const auto* r : rs) {
      if (r->plan_found.value_or(false)) {
        ++found;
        certified += r->certified.value_or(false);
      }
    }
    const double frac = found == 0 ? 1.0 : static_cast<double>(certified) / static_cast<double>(found);
    if (frac < *t.min_certified_fraction) {
      failures.push_back("certified fraction " + fmt(frac) + " below " +
                         fmt(*t.min_certified_fraction));
    }
  }
  if (t.proxy_not_slower) {
    std::vector<double> proxy, oracle;
    // Failed runs count with the time they spent.
    for (const auto* r : rs) {
      if (!r->plan_time_ns) continue;
      if (r->method == "proxy") {
        proxy.push_back(static_cast<double>(r->plan_time_ns.value_or(0) +
                                            r->verify_time_ns.value_or(0) +
                                            r->repair_time_ns.value_or(0)));
      } else if (r->method == "oracle") {
        oracle.push_back(static_cast<double>(r->plan_time_ns.value_or(0)));
      }
    }
    if (!proxy.empty() && !oracle.empty() && median(proxy) > median(oracle)) {
      failures.push_back("median proxy pipeline time " + fmt(median(proxy)) +
                         " ns exceeds median oracle planning time " + fmt(median(oracle)) + " ns");
    }
  }
  for (const auto& [name, direction] : t.trends) {
    std::map<double, std::vector<double>> by_value;
    for (const auto* r : rs) {
      const auto m = metric(*r, name);
      if (r->value && m) by_value[*r->value].push_back(*m);
    }
    // Sweep order is the order values appear in the config.
    std::vector<double> means;
    if (config.sweep) {
      for (double v : config.sweep->values) {
        if (by_value.count(v)) means.push_back(mean(by_value[v]));
      }
    }
    for (std::size_t k = 1; k < means.size(); ++k) {
      const double delta = means[k] - means[k - 1];
      if (direction * delta < 0.0) {
        failures.push_back("trend " + name + ": mean moves from " + fmt(means[k - 1]) + " to " +
                           fmt(means[k]) + " against the required direction");
      }
    }
  }
  return failures;
}

}  // namespace fastron::bench
