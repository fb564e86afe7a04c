#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "fastron/errors.hpp"
#include "fastron/kinematics.hpp"
#include "fastron/random.hpp"

using namespace fastron;
constexpr double kPi = std::numbers::pi;

namespace {

Vec3 tip(const KinematicChain& c, std::span<const double> q, double l) {
  return c.tip_frame(q) * Vec3(l, 0, 0);
}

// Closed-form rod direction for yaw about z and pitch about -y.
Vec3 rod_dir(double yaw, double pitch) {
  return Vec3(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch));
}

double point_box_distance(const Vec3& p, const Vec3& c, double half) {
  const Vec3 d = ((p - c).cwiseAbs().array() - half).cwiseMax(0.0).matrix();
  return d.norm();
}

}  // namespace

TEST_CASE("input space map") {
  const KinematicChain c = KinematicChain::rod_robot(2, 1.0, 0.05);
  const std::vector<double> lo(c.lower().begin(), c.lower().end());
  const std::vector<double> hi(c.upper().begin(), c.upper().end());
  std::vector<double> mid(4);
  for (std::size_t i = 0; i < 4; ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
  for (double v : c.to_input_space(lo)) CHECK(v == -1.0);
  for (double v : c.to_input_space(hi)) CHECK(v == 1.0);
  for (double v : c.to_input_space(mid)) CHECK(v == doctest::Approx(0.0));
  const auto back = c.from_input_space(c.to_input_space(mid));
  for (std::size_t i = 0; i < 4; ++i) CHECK(back[i] == doctest::Approx(mid[i]));
  CHECK(lo[1] == 0.0);
  CHECK(hi[1] == doctest::Approx(kPi));
  std::vector<double> outside = mid;
  outside[1] = -0.1;
  CHECK_FALSE(c.within_limits(outside));
  CHECK_THROWS_AS(c.tip_frame(outside), ContractViolation);
}

TEST_CASE("rod forward kinematics") {
  const double l = 1.0;
  const KinematicChain c = KinematicChain::rod_robot(1, l, 0.05);
  const std::vector<double> zero{0.0, 0.0};
  const auto bodies = c.forward_kinematics(zero);
  REQUIRE(bodies.size() == 1);
  CHECK((bodies[0].a - Vec3::Zero()).norm() < 1e-15);
  CHECK((bodies[0].b - Vec3(1, 0, 0)).norm() < 1e-15);

  const std::vector<double> yaw90{kPi / 2, 0.0};
  CHECK((tip(c, yaw90, l) - Vec3(0, 1, 0)).norm() < 1e-12);

  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> q{rng.uniform(-kPi, kPi), rng.uniform(0, kPi)};
    CHECK((tip(c, q, l) - l * rod_dir(q[0], q[1])).norm() < 1e-12);
  }
}

TEST_CASE("four dof composes two rods") {
  const double l = 0.8;
  const KinematicChain c2 = KinematicChain::rod_robot(1, l, 0.04);
  const KinematicChain c4 = KinematicChain::rod_robot(2, l, 0.04);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double yaw = rng.uniform(-kPi, kPi), pitch = rng.uniform(0, kPi);
    const std::vector<double> q2{yaw, pitch};
    const std::vector<double> q4{yaw, pitch, 0.0, 0.0};
    const auto b2 = c2.forward_kinematics(q2);
    const auto b4 = c4.forward_kinematics(q4);
    REQUIRE(b4.size() == 2);
    CHECK((b4[0].a - b2[0].a).norm() < 1e-12);
    CHECK((b4[0].b - b2[0].b).norm() < 1e-12);
    const Vec3 dir = rod_dir(yaw, pitch);
    CHECK((b4[1].a - l * dir).norm() < 1e-12);
    CHECK((b4[1].b - 2 * l * dir).norm() < 1e-12);
  }
}

TEST_CASE("tip is lipschitz in the joints") {
  const double l = 1.0;
  Rng rng(5);
  for (std::size_t pairs : {1u, 2u}) {
    const KinematicChain c = KinematicChain::rod_robot(pairs, l, 0.05);
    const std::size_t d = c.dof();
    for (int i = 0; i < 2000; ++i) {
      std::vector<double> q(d), q2(d);
      for (std::size_t k = 0; k < d; ++k) q[k] = rng.uniform(c.lower()[k] + 1e-3, c.upper()[k] - 1e-3);
      double n2 = 0.0, n1 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double v = rng.uniform(-1e-3, 1e-3) / std::sqrt(static_cast<double>(d));
        q2[k] = q[k] + v;
        n2 += v * v;
        n1 += std::abs(v);
      }
      const double moved = (tip(c, q, l) - tip(c, q2, l)).norm();
      if (pairs == 1) {
        // Yaw and pitch move the tip along orthogonal directions.
        CHECK(moved <= l * std::sqrt(n2) * (1 + 1e-9));
      } else {
        // No joint is farther than the total length from the tip.
        CHECK(moved <= 2 * l * n1 * (1 + 1e-9));
      }
    }
  }
}

TEST_CASE("trivial workspaces") {
  const KinematicChain c = KinematicChain::rod_robot(1, 1.0, 0.05);
  Workspace empty;
  Workspace engulf;
  engulf.obstacles.push_back(ConvexBody::box(Vec3::Zero(), Vec3(0.3, 0.3, 0.3)));
  Rng rng(6);
  for (int i = 0; i < 300; ++i) {
    const std::vector<double> q{rng.uniform(-kPi, kPi), rng.uniform(0, kPi)};
    CHECK(kcd_label(c, empty, q) == Label::kFree);
    CHECK(kcd_label(c, engulf, q) == Label::kCollision);
  }
  CollisionOracle oracle(c, engulf);
  const std::vector<double> p{0.0, 0.0};
  oracle.label(p);
  oracle.label(p);
  CHECK(oracle.calls() == 2);
}

TEST_CASE("label grid matches point sampling") {
  const double l = 1.0, r = 0.05;
  const KinematicChain c = KinematicChain::rod_robot(1, l, r);
  const Vec3 center(0.45, 0.3, 0.35);
  const double half = 0.15;
  Workspace ws;
  ws.obstacles.push_back(ConvexBody::box(center, Vec3(half, half, half)));
  CollisionOracle oracle(c, ws);

  std::size_t cells = 0, agree = 0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const std::vector<double> p{-1.0 + 2.0 * (i + 0.5) / 100, -1.0 + 2.0 * (j + 0.5) / 100};
      const auto q = c.from_input_space(p);
      const Vec3 dir = rod_dir(q[0], q[1]);
      double dmin = 1e300;
      for (int s = 0; s <= 4000; ++s) dmin = std::min(dmin, point_box_distance(l * s / 4000.0 * dir, center, half));
      // Sampling spacing 2.5e-4 bounds the distance error.
      if (std::abs(dmin - r) < 1e-3) continue;
      ++cells;
      agree += (oracle.label(p) == Label::kCollision) == (dmin <= r);
    }
  }
  CHECK(cells > 9900);
  CHECK(static_cast<double>(agree) >= 0.995 * static_cast<double>(cells));
  CHECK(agree == cells);
}

TEST_CASE("motion bounds") {
  const KinematicChain c2 = KinematicChain::rod_robot(1, 1.0, 0.05);
  CHECK(c2.input_levers()[0] == doctest::Approx(kPi));
  CHECK(c2.input_levers()[1] == doctest::Approx(kPi / 2));
  CHECK(c2.input_lipschitz() == doctest::Approx(std::sqrt(kPi * kPi * 1.25)));

  std::vector<double> reach;
  const std::vector<double> q{0.3, 0.7};
  c2.axis_reach(q, reach);
  CHECK(reach[0] == doctest::Approx(std::cos(0.7)));
  CHECK(reach[1] == doctest::Approx(1.0));

  // Body endpoints never move farther than the lever sum predicts.
  const KinematicChain c4 = KinematicChain::rod_robot(2, 0.7, 0.05);
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> p(4), r(4);
    double bound = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      p[k] = rng.uniform(-1, 1);
      r[k] = std::clamp(p[k] + rng.uniform(-0.2, 0.2), -1.0, 1.0);
      bound += c4.input_levers()[k] * std::abs(r[k] - p[k]);
    }
    const auto a = c4.forward_kinematics(c4.from_input_space(p));
    const auto b = c4.forward_kinematics(c4.from_input_space(r));
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK((a[j].a - b[j].a).norm() <= bound + 1e-12);
      CHECK((a[j].b - b[j].b).norm() <= bound + 1e-12);
    }
  }
}

TEST_CASE("clearance agrees with labels") {
  const KinematicChain c = KinematicChain::rod_robot(1, 1.0, 0.05);
  Workspace ws;
  ws.obstacles.push_back(ConvexBody::box(Vec3(0.5, 0.2, 0.3), Vec3(0.15, 0.15, 0.15)));
  ws.obstacles.push_back(ConvexBody::box(Vec3(-0.4, -0.5, 0.6), Vec3(0.2, 0.1, 0.2)));
  CollisionOracle oracle(c, ws);
  Rng rng(9);
  for (int i = 0; i < 3000; ++i) {
    const std::vector<double> p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double cl = oracle.clearance(p);
    if (std::abs(cl) < 1e-9) continue;
    CHECK((cl > 0.0) == (oracle.label(p) == Label::kFree));
  }
}
