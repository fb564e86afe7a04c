#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "fastron/errors.hpp"
#include "fastron/kinematics.hpp"
#include "fastron/planners.hpp"
#include "fastron/random.hpp"

using namespace fastron;

namespace {

// Vertical wall at |x| <= 0.05 with an opening at |y - 0.6| < 0.1.
bool gap_free(std::span<const double> q) {
  return !(std::abs(q[0]) <= 0.05 && std::abs(q[1] - 0.6) >= 0.1);
}

bool disc_free(std::span<const double> q, double cx, double cy, double r) {
  const double dx = q[0] - cx, dy = q[1] - cy;
  return dx * dx + dy * dy > r * r;
}

PlanQuery gap_query(PlannerKind kind, std::uint64_t seed) {
  PlanQuery q{{-0.8, 0.0}, {0.8, 0.0}, {}};
  q.params.kind = kind;
  q.params.edge_resolution = 0.01;
  q.params.seed = seed;
  return q;
}

void check_plan_valid(const PlanQuery& q, const PlanResult& r, CollisionChecker& c) {
  REQUIRE(r.found);
  CHECK(r.plan.waypoints.front() == q.start);
  CHECK(r.plan.waypoints.back() == q.goal);
  for (const auto& w : r.plan.waypoints) CHECK(in_unit_box(w));
  CHECK(verify_plan(r.plan, c, q.params.edge_resolution).empty());
}

}  // namespace

TEST_CASE("edge validity") {
  FunctionChecker free_all([](std::span<const double>) { return true; });
  const std::vector<double> a{0.1, 0.1};
  CHECK(edge_valid(a, a, free_all, 0.05));

  FunctionChecker block([](std::span<const double> q) { return disc_free(q, 0.0, 0.0, 0.01); });
  const std::vector<double> l{-0.5, 0.0}, r{0.5, 0.0};
  CHECK_FALSE(edge_valid(l, r, block, 0.5));

  // Coarse and 10x finer resolution agree on edges through open space.
  FunctionChecker obstacles([](std::span<const double> q) {
    return disc_free(q, 0.3, 0.3, 0.2) && disc_free(q, -0.4, -0.2, 0.25);
  });
  Rng rng(1);
  int tested = 0;
  while (tested < 1000) {
    std::vector<double> p(2), s(2);
    rng.fill_uniform(p, -1, 1);
    for (std::size_t k = 0; k < 2; ++k) s[k] = std::clamp(p[k] + rng.uniform(-0.2, 0.2), -1.0, 1.0);
    FunctionChecker fine_c([&](std::span<const double> q) {
      return disc_free(q, 0.3, 0.3, 0.2) && disc_free(q, -0.4, -0.2, 0.25);
    });
    if (!edge_valid(p, s, fine_c, 0.0005)) continue;
    ++tested;
    CHECK(edge_valid(p, s, obstacles, 0.005));
  }
}

TEST_CASE("start equals goal") {
  FunctionChecker c([](std::span<const double>) { return true; });
  for (auto kind : {PlannerKind::kRrt, PlannerKind::kRrtConnect}) {
    PlanQuery q{{0.2, 0.3}, {0.2, 0.3}, {}};
    q.params.kind = kind;
    const PlanResult r = plan(q, c);
    REQUIRE(r.found);
    CHECK(r.plan.waypoints.size() == 1);
  }
}

TEST_CASE("endpoints in collision") {
  FunctionChecker c(gap_free);
  PlanQuery q{{0.0, 0.0}, {0.8, 0.0}, {}};
  CHECK_THROWS_AS(plan(q, c), PlanningError);
  q.params.step_size = -1.0;
  CHECK_THROWS_AS(plan(q, c), ContractViolation);
}

TEST_CASE("empty space succeeds") {
  for (auto kind : {PlannerKind::kRrt, PlannerKind::kRrtConnect}) {
    int found = 0;
    Rng rng(2);
    for (std::uint64_t s = 0; s < 50; ++s) {
      FunctionChecker c([](std::span<const double>) { return true; });
      PlanQuery q{{0, 0, 0}, {0, 0, 0}, {}};
      rng.fill_uniform(q.start, -1, 1);
      rng.fill_uniform(q.goal, -1, 1);
      q.params.kind = kind;
      q.params.seed = s;
      found += plan(q, c).found;
    }
    CHECK(found >= 49);
  }
}

TEST_CASE("wall with a gap") {
  std::vector<std::size_t> it_rrt, it_con;
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (auto kind : {PlannerKind::kRrt, PlannerKind::kRrtConnect}) {
      FunctionChecker c(gap_free);
      const PlanQuery q = gap_query(kind, s);
      const PlanResult r = plan(q, c);
      check_plan_valid(q, r, c);
      (kind == PlannerKind::kRrt ? it_rrt : it_con).push_back(r.iterations);

      FunctionChecker again(gap_free);
      const PlanResult r2 = plan(q, again);
      CHECK(r2.plan.waypoints == r.plan.waypoints);
    }
  }
  auto median = [](std::vector<std::size_t> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  CHECK(median(it_con) <= median(it_rrt));
}

TEST_CASE("verify reports edges next to a bad waypoint") {
  FunctionChecker c([](std::span<const double> q) { return disc_free(q, 0.0, 0.0, 0.05); });
  MotionPlan p;
  p.waypoints = {{-0.5, 0.0}, {-0.2, 0.2}, {0.0, 0.0}, {0.2, 0.2}, {0.5, 0.0}};
  CHECK(verify_plan(p, c, 0.01) == std::vector<std::size_t>{1, 2});

  FunctionChecker planner(gap_free);
  const PlanQuery q = gap_query(PlannerKind::kRrtConnect, 3);
  const PlanResult r = plan(q, planner);
  planner.reset_calls();
  CHECK(verify_plan(r.plan, planner, q.params.edge_resolution).empty());
}

TEST_CASE("repair") {
  PlannerParams params;
  params.edge_resolution = 0.01;
  params.seed = 4;
  MotionPlan straight;
  for (int i = 0; i <= 9; ++i) straight.waypoints.push_back({-0.9 + 0.2 * i, 0.0});

  SUBCASE("interior edge") {
    // Blocks only the edge between waypoints 4 and 5.
    FunctionChecker c([](std::span<const double> q) { return disc_free(q, 0.0, 0.0, 0.05); });
    const auto bad = verify_plan(straight, c, 0.01);
    REQUIRE(bad == std::vector<std::size_t>{4});
    const PlanResult r = repair_plan(straight, bad, c, params);
    REQUIRE(r.found);
    CHECK(r.plan.certified);
    CHECK(r.plan.repaired);
    CHECK(verify_plan(r.plan, c, 0.01).empty());
    const auto& w = r.plan.waypoints;
    for (int i = 0; i <= 3; ++i) CHECK(w[i] == straight.waypoints[i]);
    for (int i = 0; i <= 3; ++i) CHECK(w[w.size() - 1 - i] == straight.waypoints[9 - i]);
  }
  SUBCASE("edge at the head") {
    FunctionChecker c([](std::span<const double> q) { return disc_free(q, -0.8, 0.0, 0.03); });
    const auto bad = verify_plan(straight, c, 0.01);
    REQUIRE(bad == std::vector<std::size_t>{0});
    const PlanResult r = repair_plan(straight, bad, c, params);
    REQUIRE(r.found);
    CHECK(r.plan.waypoints.front() == straight.waypoints.front());
    CHECK(verify_plan(r.plan, c, 0.01).empty());
  }
  SUBCASE("every edge invalid") {
    FunctionChecker c([](std::span<const double> q) { return std::abs(q[1]) > 0.01 || std::abs(q[0]) > 0.85; });
    const auto bad = verify_plan(straight, c, 0.01);
    CHECK(bad.size() == 9);
    const PlanResult r = repair_plan(straight, bad, c, params);
    REQUIRE(r.found);
    CHECK(r.plan.certified);
    CHECK(verify_plan(r.plan, c, 0.01).empty());
  }
}

TEST_CASE("proxy checker never touches the oracle") {
  FunctionChecker proxy(gap_free);
  FunctionChecker oracle([](std::span<const double> q) {
    return gap_free(q) && disc_free(q, 0.0, 0.6, 0.02);
  });
  const PlanQuery q = gap_query(PlannerKind::kRrtConnect, 9);
  const PlanResult alone = plan(q, proxy);
  CHECK(oracle.calls() == 0);
  const PlanResult r = plan_verify_repair(q, proxy, oracle);
  REQUIRE(r.found);
  CHECK(r.plan.certified);
  FunctionChecker check([](std::span<const double> q) {
    return gap_free(q) && disc_free(q, 0.0, 0.6, 0.02);
  });
  CHECK(verify_plan(r.plan, check, q.params.edge_resolution / 2).empty());
  CHECK(alone.found);
}

TEST_CASE("oracle certification is sound") {
  const KinematicChain chain = KinematicChain::rod_robot(1, 1.0, 0.05);
  Workspace ws;
  // Thin plate: a coarse sampled check can step over it.
  ws.obstacles.push_back(ConvexBody::box(Vec3(0.7, 0.0, 0.2), Vec3(0.3, 0.01, 0.3)));
  ws.obstacles.push_back(ConvexBody::box(Vec3(-0.3, 0.6, 0.4), Vec3(0.15, 0.15, 0.15)));
  CollisionOracle oracle(chain, ws);
  OracleChecker exact(oracle);
  Rng rng(12);
  int certified = 0, stepped_over = 0, rejected_free = 0;
  for (int i = 0; i < 400; ++i) {
    std::vector<double> a(2), b(2);
    rng.fill_uniform(a, -1, 1);
    rng.fill_uniform(b, -1, 1);
    const bool coarse = edge_valid(a, b, exact, 0.05);
    const bool fine = edge_valid(a, b, exact, 0.0005);
    const bool cert = exact.certify_edge(a, b, 0.05);
    if (cert) {
      ++certified;
      CHECK(fine);
    }
    stepped_over += coarse && !fine;
    rejected_free += fine && !cert;
  }
  CHECK(certified > 50);
  CHECK(stepped_over > 0);
  // Rejections of free edges need clearance under the floor somewhere.
  CHECK(rejected_free <= 2);

  MotionPlan p;
  p.waypoints = {{-0.5, -0.5}, {-0.5, -0.2}};
  CHECK(certify_plan(p, exact, 0.05).empty() == exact.certify_edge(p.waypoints[0], p.waypoints[1], 0.05));
}
