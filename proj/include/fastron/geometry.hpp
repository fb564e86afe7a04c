#pragma once

#include <Eigen/Geometry>

namespace fastron {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Pose = Eigen::Isometry3d;

// Convex body used by the collision oracle: a "core" polytope (oriented box
// or line segment) swept by a sphere of `radius`. A capsule is a segment with
// radius > 0; a box has radius 0.
struct ConvexBody {
  enum class Kind { kBox, kCapsule };

  Kind kind = Kind::kBox;
  Vec3 center = Vec3::Zero();       // box center
  Vec3 half_extents = Vec3::Ones(); // box half-extents
  Mat3 rotation = Mat3::Identity(); // box orientation (columns are box axes)
  Vec3 a = Vec3::Zero();            // capsule segment endpoints
  Vec3 b = Vec3::Zero();
  double radius = 0.0;

  static ConvexBody box(const Vec3& center, const Vec3& half_extents,
                        const Mat3& rotation = Mat3::Identity());
  static ConvexBody capsule(const Vec3& a, const Vec3& b, double radius);

  // Support point of the core shape (no radius) in direction d.
  Vec3 core_support(const Vec3& d) const {
    if (kind == Kind::kBox) {
      const Vec3 local = rotation.transpose() * d;
      const Vec3 s(local.x() >= 0 ? half_extents.x() : -half_extents.x(),
                   local.y() >= 0 ? half_extents.y() : -half_extents.y(),
                   local.z() >= 0 ? half_extents.z() : -half_extents.z());
      return center + rotation * s;
    }
    return d.dot(b - a) >= 0 ? b : a;
  }

  // Support point of the full body (core swept by the radius).
  Vec3 support(const Vec3& d) const;

  Vec3 centroid() const { return kind == Kind::kBox ? center : 0.5 * (a + b); }

  // Applies a rigid transform to the body.
  ConvexBody transformed(const Pose& pose) const;

  // Throws ContractViolation for zero extents or non-positive capsule radius.
  void validate() const;
};

struct GjkResult {
  bool intersect = false;
  // Distance between the cores minus the summed radii when it was computed
  // to convergence; <= 0 when intersecting. Only meaningful when exact.
  double separation = 0.0;
  bool exact = false;
  int iterations = 0;
};

// Distance-based GJK on the core shapes; touching counts as intersecting.
// Falls back to a conservative "intersecting" answer after 64 iterations.
GjkResult gjk_query(const ConvexBody& a, const ConvexBody& b, bool need_distance = false);

inline bool gjk_intersect(const ConvexBody& a, const ConvexBody& b) {
  return gjk_query(a, b).intersect;
}

}  // namespace fastron
