#include "fastron/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fastron/errors.hpp"

namespace fastron {

KinematicChain::KinematicChain(std::vector<RevoluteJoint> joints) : joints_(std::move(joints)) {
  require(!joints_.empty(), "kinematic chain needs at least one joint");
  for (const auto& j : joints_) {
    require(j.lower < j.upper, "joint lower limit must be below upper limit");
    require(std::abs(j.axis.norm() - 1.0) < 1e-9, "joint axis must be a unit vector");
    for (const auto& b : j.bodies) b.validate();
    lower_.push_back(j.lower);
    upper_.push_back(j.upper);
    body_count_ += j.bodies.size();
  }

  // Joint k moves a point at most (distance to its origin) * |dq_k|; the
  // distance is bounded by the mount offsets between k and the body plus the
  // body's own reach from its frame origin.
  double sum = 0.0;
  for (std::size_t k = 0; k < joints_.size(); ++k) {
    double reach = 0.0;
    double offset = 0.0;
    for (std::size_t j = k; j < joints_.size(); ++j) {
      if (j > k) offset += joints_[j].mount.translation().norm();
      for (const auto& b : joints_[j].bodies) {
        const double r = b.kind == ConvexBody::Kind::kBox
                             ? b.center.norm() + b.half_extents.norm()
                             : std::max(b.a.norm(), b.b.norm());
        reach = std::max(reach, offset + r);
      }
    }
    input_levers_.push_back(reach * 0.5 * (upper_[k] - lower_[k]));
    sum += input_levers_.back() * input_levers_.back();
  }
  input_lipschitz_ = std::sqrt(sum);
}

bool KinematicChain::within_limits(std::span<const double> q) const {
  if (q.size() != dof()) return false;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] >= lower_[i] && q[i] <= upper_[i])) return false;
  }
  return true;
}

InputPoint KinematicChain::to_input_space(std::span<const double> q) const {
  require(q.size() == dof(), "joint vector has the wrong dimension");
  require(within_limits(q), "joint vector outside the joint limits");
  InputPoint p(dof());
  for (std::size_t i = 0; i < dof(); ++i) {
    p[i] = (2.0 * q[i] - upper_[i] - lower_[i]) / (upper_[i] - lower_[i]);
  }
  return p;
}

JointVector KinematicChain::from_input_space(std::span<const double> p) const {
  require(p.size() == dof(), "input point has the wrong dimension");
  require(in_unit_box(p), "input point outside [-1, 1]^d");
  JointVector q(dof());
  for (std::size_t i = 0; i < dof(); ++i) {
    const double v = 0.5 * (p[i] * (upper_[i] - lower_[i]) + upper_[i] + lower_[i]);
    q[i] = std::clamp(v, lower_[i], upper_[i]);
  }
  return q;
}

void KinematicChain::forward_kinematics(std::span<const double> q,
                                        std::vector<ConvexBody>& out) const {
  require(within_limits(q), "joint vector outside the joint limits");
  out.clear();
  Pose frame = Pose::Identity();
  for (std::size_t i = 0; i < dof(); ++i) {
    const auto& j = joints_[i];
    frame = frame * j.mount;
    frame.rotate(Eigen::AngleAxisd(q[i], j.axis));
    for (const auto& body : j.bodies) out.push_back(body.transformed(frame));
  }
}

std::vector<ConvexBody> KinematicChain::forward_kinematics(std::span<const double> q) const {
  std::vector<ConvexBody> out;
  forward_kinematics(q, out);
  return out;
}

void KinematicChain::axis_reach(std::span<const double> q, std::vector<double>& out) const {
  require(within_limits(q), "joint vector outside the joint limits");
  const std::size_t n = dof();
  out.assign(n, 0.0);
  std::vector<Vec3> origin(n), axis(n);
  Pose frame = Pose::Identity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& j = joints_[i];
    frame = frame * j.mount;
    frame.rotate(Eigen::AngleAxisd(q[i], j.axis));
    origin[i] = frame.translation();
    axis[i] = frame.linear() * j.axis;
    for (const auto& body : j.bodies) {
      const ConvexBody w = body.transformed(frame);
      Vec3 pts[8];
      int count = 0;
      if (w.kind == ConvexBody::Kind::kCapsule) {
        pts[count++] = w.a;
        pts[count++] = w.b;
      } else {
        for (int c = 0; c < 8; ++c) {
          const Vec3 s((c & 1) ? 1.0 : -1.0, (c & 2) ? 1.0 : -1.0, (c & 4) ? 1.0 : -1.0);
          pts[count++] = w.center + w.rotation * s.cwiseProduct(w.half_extents);
        }
      }
      for (std::size_t k = 0; k <= i; ++k) {
        for (int c = 0; c < count; ++c) {
          const Vec3 r = pts[c] - origin[k];
          out[k] = std::max(out[k], (r - r.dot(axis[k]) * axis[k]).norm());
        }
      }
    }
  }
}

Pose KinematicChain::tip_frame(std::span<const double> q) const {
  require(within_limits(q), "joint vector outside the joint limits");
  Pose frame = Pose::Identity();
  for (std::size_t i = 0; i < dof(); ++i) {
    frame = frame * joints_[i].mount;
    frame.rotate(Eigen::AngleAxisd(q[i], joints_[i].axis));
  }
  return frame;
}

KinematicChain KinematicChain::rod_robot(std::size_t pairs, double rod_length, double radius,
                                         LinkShape shape) {
  require(pairs >= 1, "rod robot needs at least one joint pair");
  require(rod_length > 0.0 && radius > 0.0, "rod dimensions must be positive");
  constexpr double pi = std::numbers::pi;
  const ConvexBody rod =
      shape == LinkShape::kCapsule
          ? ConvexBody::capsule(Vec3::Zero(), Vec3(rod_length, 0, 0), radius)
          : ConvexBody::box(Vec3(0.5 * rod_length, 0, 0), Vec3(0.5 * rod_length, radius, radius));

  std::vector<RevoluteJoint> joints;
  for (std::size_t k = 0; k < pairs; ++k) {
    RevoluteJoint yaw;
    yaw.axis = Vec3::UnitZ();
    if (k > 0) yaw.mount = Pose(Eigen::Translation3d(rod_length, 0, 0));
    yaw.lower = -pi;
    yaw.upper = pi;

    // Rotating about -y lifts the rod from +x toward +z for positive angles.
    RevoluteJoint pitch;
    pitch.axis = -Vec3::UnitY();
    pitch.lower = k == 0 ? 0.0 : -pi;
    pitch.upper = pi;
    pitch.bodies.push_back(rod);

    joints.push_back(std::move(yaw));
    joints.push_back(std::move(pitch));
  }
  return KinematicChain(std::move(joints));
}

void Workspace::advance(double steps) {
  for (std::size_t i = 0; i < velocities.size() && i < obstacles.size(); ++i) {
    const Vec3 delta = steps * velocities[i];
    obstacles[i].center += delta;
    obstacles[i].a += delta;
    obstacles[i].b += delta;
  }
}

namespace {

bool any_contact(const std::vector<ConvexBody>& links, const Workspace& ws) {
  for (const auto& link : links) {
    for (const auto& obs : ws.obstacles) {
      if (gjk_intersect(link, obs)) return true;
    }
  }
  return false;
}

}  // namespace

Label kcd_label(const KinematicChain& chain, const Workspace& workspace,
                std::span<const double> q) {
  std::vector<ConvexBody> links;
  chain.forward_kinematics(q, links);
  return any_contact(links, workspace) ? Label::kCollision : Label::kFree;
}

void CollisionOracle::pose(std::span<const double> input_point) {
  const auto& c = *chain_;
  require(input_point.size() == c.dof() && in_unit_box(input_point),
          "input point must lie in [-1, 1]^d with the chain dimension");
  joint_.resize(c.dof());
  for (std::size_t i = 0; i < c.dof(); ++i) {
    // Clamp guards the last ulp of the affine map at the limits.
    const double q = 0.5 * (input_point[i] * (c.upper()[i] - c.lower()[i]) + c.upper()[i] +
                            c.lower()[i]);
    joint_[i] = std::clamp(q, c.lower()[i], c.upper()[i]);
  }
  c.forward_kinematics(joint_, posed_);
}

Label CollisionOracle::label(std::span<const double> input_point) {
  ++calls_;
  pose(input_point);
  return any_contact(posed_, *workspace_) ? Label::kCollision : Label::kFree;
}

double CollisionOracle::clearance(std::span<const double> input_point) {
  ++calls_;
  pose(input_point);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& link : posed_) {
    for (const auto& obs : workspace_->obstacles) {
      const GjkResult r = gjk_query(link, obs, true);
      if (r.intersect) return std::min(r.separation, 0.0);
      best = std::min(best, r.exact ? r.separation : 0.0);
    }
  }
  return best;
}

std::vector<Label> CollisionOracle::label_all(const PointSet& points) {
  std::vector<Label> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out.push_back(label(points[i]));
  return out;
}

}  // namespace fastron
