#include <algorithm>
#include <cmath>

#include "fastron/bench.hpp"
#include "fastron/random.hpp"

namespace fastron::bench {
namespace {

// Distance from the world origin to an axis-aligned box.
double origin_distance(const Vec3& center, const Vec3& half) {
  const Vec3 outside = (center.cwiseAbs() - half).cwiseMax(0.0);
  return outside.norm();
}

Vec3 uniform_in(Rng& rng, const Vec3& lo, const Vec3& hi) {
  return {rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()), rng.uniform(lo.z(), hi.z())};
}

// Rejection-samples a cube center clear of the base. Gives up after a bounded
// number of tries and keeps the last draw.
Vec3 place_cube(Rng& rng, const ObstacleConfig& o, double half) {
  Vec3 c = uniform_in(rng, o.placement_min, o.placement_max);
  for (int tries = 0; tries < 1000 && origin_distance(c, Vec3::Constant(half)) < o.base_clearance;
       ++tries) {
    c = uniform_in(rng, o.placement_min, o.placement_max);
  }
  return c;
}

Vec3 random_direction(Rng& rng) {
  Vec3 v;
  do {
    v = {rng.normal(), rng.normal(), rng.normal()};
  } while (v.norm() < 1e-9);
  return v.normalized();
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, Stream s, std::uint64_t sub) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(s)), sub);
}

KinematicChain build_chain(const RobotConfig& robot) {
  switch (robot.type) {
    case RobotConfig::Type::kDof2:
      return KinematicChain::rod_robot(1, robot.rod_length, robot.radius, robot.link_shape);
    case RobotConfig::Type::kDof4:
      return KinematicChain::rod_robot(2, robot.rod_length, robot.radius, robot.link_shape);
    case RobotConfig::Type::kCustom:
      break;
  }
  return KinematicChain(robot.custom_joints);
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  const auto& o = config.obstacles;
  Rng rng(stream_seed(seed, Stream::kScenario));
  Scenario s{build_chain(config.robot), {}};
  const std::size_t count = o.count_min + rng.below(o.count_max - o.count_min + 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double half = 0.5 * rng.uniform(o.size_min, o.size_max);
    const Vec3 c = place_cube(rng, o, half);
    s.workspace.obstacles.push_back(ConvexBody::box(c, Vec3::Constant(half)));
    if (o.motion.mode == MotionConfig::Mode::kTranslate) {
      s.workspace.velocities.push_back(o.motion.speed * random_direction(rng));
    }
  }
  // Fixed obstacles come after the random cubes and never move.
  for (const auto& body : o.fixed) s.workspace.obstacles.push_back(body);
  return s;
}

void advance_obstacles(const ScenarioConfig& config, Scenario& scenario, std::size_t step,
                       std::uint64_t seed) {
  const auto& o = config.obstacles;
  auto& ws = scenario.workspace;
  switch (o.motion.mode) {
    case MotionConfig::Mode::kNone:
      return;
    case MotionConfig::Mode::kTranslate: {
      ws.advance(1.0);
      // Reflect off the placement box so obstacles stay in reach.
      for (std::size_t i = 0; i < ws.velocities.size(); ++i) {
        auto& body = ws.obstacles[i];
        for (int k = 0; k < 3; ++k) {
          double shift = 0.0;
          if (body.center[k] < o.placement_min[k]) {
            shift = 2.0 * (o.placement_min[k] - body.center[k]);
          } else if (body.center[k] > o.placement_max[k]) {
            shift = 2.0 * (o.placement_max[k] - body.center[k]);
          } else {
            continue;
          }
          body.center[k] += shift;
          ws.velocities[i][k] = -ws.velocities[i][k];
        }
      }
      return;
    }
    case MotionConfig::Mode::kTeleport: {
      if (step == 0 || step % o.motion.teleport_every != 0) return;
      Rng rng(stream_seed(seed, Stream::kMotion, step));
      const std::size_t random_count = ws.obstacles.size() - o.fixed.size();
      for (std::size_t i = 0; i < random_count; ++i) {
        auto& body = ws.obstacles[i];
        body.center = place_cube(rng, o, body.half_extents.x());
      }
      return;
    }
  }
}

}  // namespace fastron::bench
