#include "fastron/planners.hpp"

#include <algorithm>
#include <cmath>

#include "fastron/errors.hpp"
#include "fastron/kernel.hpp"
#include "fastron/random.hpp"

namespace fastron {
namespace {

using Clock = std::chrono::steady_clock;

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance_unchecked(a.data(), b.data(), a.size()));
}

struct Tree {
  explicit Tree(std::span<const double> root) : nodes(root.size()) {
    nodes.push_back(root);
    parent.push_back(SIZE_MAX);
  }

  std::size_t nearest(std::span<const double> q) const {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = squared_distance_unchecked(nodes[i].data(), q.data(), q.size());
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  std::size_t add(std::span<const double> q, std::size_t from) {
    nodes.push_back(q);
    parent.push_back(from);
    return nodes.size() - 1;
  }

  // Root-to-node path.
  std::vector<InputPoint> path_to(std::size_t node) const {
    std::vector<InputPoint> out;
    for (std::size_t i = node; i != SIZE_MAX; i = parent[i]) {
      out.emplace_back(nodes[i].begin(), nodes[i].end());
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  PointSet nodes;
  std::vector<std::size_t> parent;
};

void steer(std::span<const double> from, std::span<const double> to, double step,
           std::vector<double>& out) {
  const double d = distance(from, to);
  out.assign(to.begin(), to.end());
  if (d <= step) return;
  const double t = step / d;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = from[k] + t * (to[k] - from[k]);
}

void check_endpoints(const PlanQuery& query, CollisionChecker& checker) {
  query.params.validate();
  require(query.start.size() == query.goal.size() && !query.start.empty(),
          "start and goal must share a nonzero dimension");
  require(in_unit_box(query.start) && in_unit_box(query.goal),
          "start and goal must lie in [-1, 1]^d");
  if (!checker.is_free(query.start)) throw PlanningError("start configuration is in collision");
  if (!checker.is_free(query.goal)) throw PlanningError("goal configuration is in collision");
}

void sample_uniform(Rng& rng, std::vector<double>& out) { rng.fill_uniform(out, -1.0, 1.0); }

enum class Extend { kTrapped, kAdvanced, kReached };

Extend extend(Tree& tree, std::span<const double> target, const PlannerParams& p,
              CollisionChecker& checker, std::vector<double>& scratch, std::size_t& added) {
  const std::size_t near = tree.nearest(target);
  steer(tree.nodes[near], target, p.step_size, scratch);
  if (!edge_valid(tree.nodes[near], scratch, checker, p.edge_resolution)) return Extend::kTrapped;
  added = tree.add(scratch, near);
  return std::equal(scratch.begin(), scratch.end(), target.begin()) ? Extend::kReached
                                                                    : Extend::kAdvanced;
}

}  // namespace

void PlannerParams::validate() const {
  require(edge_resolution > 0.0, "edge_resolution must be positive");
  require(step_size > 0.0, "step_size must be positive");
  require(goal_bias >= 0.0 && goal_bias <= 1.0, "goal_bias must lie in [0, 1]");
  require(max_iterations >= 1, "max_iterations must be >= 1");
}

bool edge_valid(std::span<const double> a, std::span<const double> b, CollisionChecker& checker,
                double resolution) {
  require(resolution > 0.0, "edge resolution must be positive");
  require(a.size() == b.size(), "edge endpoints differ in dimension");
  const double len = distance(a, b);
  const auto segments = static_cast<std::size_t>(std::max(1.0, std::ceil(len / resolution)));
  std::vector<double> p(a.size());
  if (len == 0.0) return checker.is_free(a);
  for (std::size_t s = 0; s <= segments; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(segments);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = a[k] + t * (b[k] - a[k]);
    if (s == segments) std::copy(b.begin(), b.end(), p.begin());
    if (!checker.is_free(p)) return false;
  }
  return true;
}

bool CollisionChecker::certify_edge(std::span<const double> a, std::span<const double> b,
                                    double resolution) {
  return edge_valid(a, b, *this, resolution);
}

bool OracleChecker::certify_edge(std::span<const double> a, std::span<const double> b,
                                 double resolution) {
  require(resolution > 0.0, "edge resolution must be positive");
  require(a.size() == b.size(), "edge endpoints differ in dimension");
  // Clearances below kFloor count as contact; kSlack covers GJK's distance
  // tolerance.
  constexpr double kFloor = 1e-6;
  constexpr double kSlack = 1e-9;
  constexpr std::size_t kMaxSteps = 1000000;
  const auto& chain = oracle_->chain();
  const std::size_t d = a.size();
  const auto levers = chain.input_levers();

  // Joint k turns by scale[k] * |b_k - a_k| per unit of t. A body point moves
  // at most reach_k(q) per radian of joint k, and reach_k itself can grow
  // only through the joints after k. Over a step x the motion is therefore
  // at most lin * x + quad * x^2 / 2.
  std::vector<double> rate(d), drift(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    rate[k] = 0.5 * (chain.upper()[k] - chain.lower()[k]) * std::abs(b[k] - a[k]);
  }
  for (std::size_t k = d; k-- > 1;) {
    drift[k - 1] = drift[k] + levers[k] * std::abs(b[k] - a[k]);
  }
  double quad = 0.0;
  for (std::size_t k = 0; k < d; ++k) quad += rate[k] * drift[k];

  std::vector<double> p(a.begin(), a.end());
  std::vector<double> q(d), reach;
  double t = 0.0;
  for (std::size_t step = 0; step < kMaxSteps; ++step) {
    if (t > 1.0) t = 1.0;
    for (std::size_t k = 0; k < d; ++k) p[k] = a[k] + t * (b[k] - a[k]);
    count_call();
    const double c = oracle_->clearance(p) - kSlack;
    if (c < kFloor) return false;
    if (t == 1.0) return true;
    for (std::size_t k = 0; k < d; ++k) {
      const double lo = chain.lower()[k], hi = chain.upper()[k];
      q[k] = std::clamp(0.5 * (p[k] * (hi - lo) + hi + lo), lo, hi);
    }
    chain.axis_reach(q, reach);
    double lin = 0.0;
    for (std::size_t k = 0; k < d; ++k) lin += rate[k] * reach[k];
    if (lin == 0.0 && quad == 0.0) return true;
    const double x = quad == 0.0 ? c / lin : 2.0 * c / (lin + std::sqrt(lin * lin + 2.0 * quad * c));
    t += x;
  }
  return false;
}

PlanResult rrt_plan(const PlanQuery& query, CollisionChecker& checker) {
  const auto t0 = Clock::now();
  check_endpoints(query, checker);
  const auto& p = query.params;
  PlanResult result;
  if (query.start == query.goal) {
    result.found = true;
    result.plan.waypoints = {query.start};
    result.plan.planner_time = Clock::now() - t0;
    return result;
  }

  Rng rng(p.seed);
  Tree tree(query.start);
  std::vector<double> sample(query.start.size()), scratch;
  for (std::size_t iter = 1; iter <= p.max_iterations; ++iter) {
    result.iterations = iter;
    if (rng.uniform01() < p.goal_bias) {
      sample = query.goal;
    } else {
      sample_uniform(rng, sample);
    }
    std::size_t added = 0;
    if (extend(tree, sample, p, checker, scratch, added) == Extend::kTrapped) continue;
    const auto node = tree.nodes[added];
    if (distance(node, query.goal) <= p.step_size) {
      std::size_t last = added;
      if (!std::equal(node.begin(), node.end(), query.goal.begin())) {
        if (!edge_valid(node, query.goal, checker, p.edge_resolution)) continue;
        last = tree.add(query.goal, added);
      }
      result.found = true;
      result.plan.waypoints = tree.path_to(last);
      break;
    }
  }
  result.plan.planner_time = Clock::now() - t0;
  return result;
}

PlanResult rrt_connect_plan(const PlanQuery& query, CollisionChecker& checker) {
  const auto t0 = Clock::now();
  check_endpoints(query, checker);
  const auto& p = query.params;
  PlanResult result;
  if (query.start == query.goal) {
    result.found = true;
    result.plan.waypoints = {query.start};
    result.plan.planner_time = Clock::now() - t0;
    return result;
  }

  Rng rng(p.seed);
  Tree from_start(query.start);
  Tree from_goal(query.goal);
  Tree* a = &from_start;
  Tree* b = &from_goal;
  std::vector<double> sample(query.start.size()), scratch;
  for (std::size_t iter = 1; iter <= p.max_iterations; ++iter) {
    result.iterations = iter;
    sample_uniform(rng, sample);
    std::size_t new_a = 0;
    if (extend(*a, sample, p, checker, scratch, new_a) != Extend::kTrapped) {
      const InputPoint target(a->nodes[new_a].begin(), a->nodes[new_a].end());
      Extend status = Extend::kAdvanced;
      std::size_t new_b = 0;
      while (status == Extend::kAdvanced) status = extend(*b, target, p, checker, scratch, new_b);
      if (status == Extend::kReached) {
        auto head = a->path_to(new_a);
        auto tail = b->path_to(new_b);
        if (a != &from_start) std::swap(head, tail);
        // head ends and tail ends at the shared node; tail runs root-first.
        std::reverse(tail.begin(), tail.end());
        head.insert(head.end(), tail.begin() + 1, tail.end());
        result.found = true;
        result.plan.waypoints = std::move(head);
        break;
      }
    }
    std::swap(a, b);
  }
  result.plan.planner_time = Clock::now() - t0;
  return result;
}

PlanResult plan(const PlanQuery& query, CollisionChecker& checker) {
  return query.params.kind == PlannerKind::kRrt ? rrt_plan(query, checker)
                                                : rrt_connect_plan(query, checker);
}

std::vector<std::size_t> verify_plan(const MotionPlan& plan, CollisionChecker& oracle,
                                     double resolution) {
  require(!plan.waypoints.empty(), "cannot verify an empty plan");
  std::vector<std::size_t> invalid;
  const auto& w = plan.waypoints;
  if (w.size() == 1) {
    if (!oracle.is_free(w[0])) invalid.push_back(0);
    return invalid;
  }
  for (std::size_t e = 0; e + 1 < w.size(); ++e) {
    if (!edge_valid(w[e], w[e + 1], oracle, resolution)) invalid.push_back(e);
  }
  return invalid;
}

std::vector<std::size_t> certify_plan(const MotionPlan& plan, CollisionChecker& oracle,
                                      double resolution) {
  require(!plan.waypoints.empty(), "cannot certify an empty plan");
  std::vector<std::size_t> invalid;
  const auto& w = plan.waypoints;
  if (w.size() == 1) {
    if (!oracle.certify_edge(w[0], w[0], resolution)) invalid.push_back(0);
    return invalid;
  }
  for (std::size_t e = 0; e + 1 < w.size(); ++e) {
    if (!oracle.certify_edge(w[e], w[e + 1], resolution)) invalid.push_back(e);
  }
  return invalid;
}

namespace {

struct Window {
  std::size_t first;  // waypoint indices, inclusive
  std::size_t last;
};

std::vector<Window> excision_windows(std::vector<std::size_t> edges, std::size_t waypoints) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<Window> out;
  for (std::size_t e : edges) {
    Window w{e == 0 ? 0 : e - 1, std::min(e + 2, waypoints - 1)};
    if (!out.empty() && w.first <= out.back().last) {
      out.back().last = std::max(out.back().last, w.last);
    } else {
      out.push_back(w);
    }
  }
  return out;
}

PlanResult full_replan(const MotionPlan& plan, CollisionChecker& oracle,
                       const PlannerParams& params) {
  PlanQuery q{plan.waypoints.front(), plan.waypoints.back(), params};
  q.params.seed = mix_seed(params.seed, 0xFA11BAC4);
  try {
    return fastron::plan(q, oracle);
  } catch (const PlanningError&) {
    return {};
  }
}

}  // namespace

PlanResult repair_plan(const MotionPlan& plan, std::span<const std::size_t> invalid,
                       CollisionChecker& oracle, const PlannerParams& params) {
  constexpr std::size_t kRounds = 3;
  const auto t0 = Clock::now();
  require(!plan.waypoints.empty(), "cannot repair an empty plan");
  PlanResult result;
  MotionPlan current;
  current.waypoints = plan.waypoints;
  std::vector<std::size_t> bad(invalid.begin(), invalid.end());

  bool ok = true;
  for (std::size_t round = 0; round < kRounds && ok && !bad.empty(); ++round) {
    const auto& wp = current.waypoints;
    const auto windows = excision_windows(bad, wp.size());
    std::vector<InputPoint> repaired;
    // Edge ranges [first, last) of `repaired` that came from bridges; every
    // other edge was certified before.
    std::vector<std::pair<std::size_t, std::size_t>> fresh;
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const auto& w = windows[k];
      repaired.insert(repaired.end(), wp.begin() + static_cast<std::ptrdiff_t>(cursor),
                      wp.begin() + static_cast<std::ptrdiff_t>(w.first));
      PlanQuery bridge{wp[w.first], wp[w.last], params};
      bridge.params.seed = mix_seed(params.seed, round * windows.size() + k + 1);
      PlanResult piece;
      try {
        piece = fastron::plan(bridge, oracle);
      } catch (const PlanningError&) {
        ok = false;
        break;
      }
      if (!piece.found) {
        ok = false;
        break;
      }
      result.iterations += piece.iterations;
      const std::size_t at = repaired.size();
      repaired.insert(repaired.end(), piece.plan.waypoints.begin(), piece.plan.waypoints.end());
      fresh.emplace_back(at, repaired.size() - 1);
      cursor = w.last + 1;
    }
    if (!ok) break;
    repaired.insert(repaired.end(), wp.begin() + static_cast<std::ptrdiff_t>(cursor), wp.end());
    current.waypoints = std::move(repaired);
    bad.clear();
    const auto& cw = current.waypoints;
    for (const auto& [first, last] : fresh) {
      for (std::size_t e = first; e < last; ++e) {
        if (!oracle.certify_edge(cw[e], cw[e + 1], params.edge_resolution)) bad.push_back(e);
      }
    }
    if (cw.size() == 1 && !oracle.certify_edge(cw[0], cw[0], params.edge_resolution)) {
      bad.push_back(0);
    }
  }

  if (ok && bad.empty()) {
    result.plan.waypoints = std::move(current.waypoints);
    result.found = true;
  } else {
    result = full_replan(plan, oracle, params);
    if (result.found) {
      result.found = certify_plan(result.plan, oracle, params.edge_resolution).empty();
    }
  }
  result.plan.certified = result.found;
  result.plan.repaired = true;
  result.plan.repair_time = Clock::now() - t0;
  return result;
}

PlanResult plan_verify_repair(const PlanQuery& query, CollisionChecker& planner_checker,
                              CollisionChecker& oracle) {
  PlanResult result = plan(query, planner_checker);
  if (!result.found) return result;
  const Duration planner_time = result.plan.planner_time;

  const auto t0 = Clock::now();
  const auto invalid = certify_plan(result.plan, oracle, query.params.edge_resolution);
  const Duration verify_time = Clock::now() - t0;

  if (invalid.empty()) {
    result.plan.certified = true;
  } else {
    PlanResult fixed = repair_plan(result.plan, invalid, oracle, query.params);
    fixed.iterations += result.iterations;
    result = std::move(fixed);
  }
  result.plan.planner_time = planner_time;
  result.plan.verify_time = verify_time;
  return result;
}

}  // namespace fastron
