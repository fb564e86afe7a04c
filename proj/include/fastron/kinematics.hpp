#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fastron/geometry.hpp"
#include "fastron/learner.hpp"
#include "fastron/point_set.hpp"

namespace fastron {

using JointVector = std::vector<double>;

struct RevoluteJoint {
  Vec3 axis = Vec3::UnitZ();        // rotation axis in the joint frame
  Pose mount = Pose::Identity();    // parent link frame -> joint frame
  double lower = 0.0;               // radians
  double upper = 0.0;
  std::vector<ConvexBody> bodies;   // geometry rigidly attached after the rotation
};

enum class LinkShape { kCapsule, kBox };

// Serial chain of revolute joints. Joint i rotates about `axis` after the
// mount transform; bodies attached to joint i move with everything distal.
class KinematicChain {
 public:
  explicit KinematicChain(std::vector<RevoluteJoint> joints);

  std::size_t dof() const { return joints_.size(); }
  const std::vector<RevoluteJoint>& joints() const { return joints_; }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  std::size_t body_count() const { return body_count_; }

  // input_levers()[k] bounds how far any body point moves per unit change of
  // input coordinate k; input_lipschitz() is the bound per unit Euclidean
  // distance.
  std::span<const double> input_levers() const { return input_levers_; }
  double input_lipschitz() const { return input_lipschitz_; }

  bool within_limits(std::span<const double> q) const;

  // Affine map of the joint box onto [-1, 1]^d and its inverse.
  InputPoint to_input_space(std::span<const double> q) const;
  JointVector from_input_space(std::span<const double> p) const;

  // Poses every attached body in the world frame; `out` is resized.
  void forward_kinematics(std::span<const double> q, std::vector<ConvexBody>& out) const;
  std::vector<ConvexBody> forward_kinematics(std::span<const double> q) const;

  // out[k] = distance from joint k's axis to the farthest core point of the
  // bodies it moves, at configuration q.
  void axis_reach(std::span<const double> q, std::vector<double>& out) const;

  // World-frame pose of the frame after the last joint.
  Pose tip_frame(std::span<const double> q) const;

  // Rod robot: `pairs` yaw/pitch joint pairs, each carrying a rod of length
  // `rod_length` along its local +x. With all joints at zero the rods lie
  // along +x. The first pair uses yaw in [-pi, pi] and pitch in [0, pi]; later
  // pairs use [-pi, pi] for both joints.
  static KinematicChain rod_robot(std::size_t pairs, double rod_length, double radius,
                                  LinkShape shape = LinkShape::kCapsule);

 private:
  std::vector<RevoluteJoint> joints_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::size_t body_count_ = 0;
  std::vector<double> input_levers_;
  double input_lipschitz_ = 0.0;
};

struct Workspace {
  std::vector<ConvexBody> obstacles;
  // Optional per-obstacle velocity (world frame, units per step).
  std::vector<Vec3> velocities;

  void advance(double steps = 1.0);
};

// Ground-truth label: kCollision if any link body touches or overlaps any
// obstacle. Self-collision is not checked.
Label kcd_label(const KinematicChain& chain, const Workspace& workspace,
                std::span<const double> q);

// Labels configurations given in input space and counts how often it was
// asked. Keeps a scratch buffer, so one instance must not be shared across
// threads.
class CollisionOracle {
 public:
  CollisionOracle(const KinematicChain& chain, const Workspace& workspace)
      : chain_(&chain), workspace_(&workspace) {}

  Label label(std::span<const double> input_point);
  // Smallest separation between any link and any obstacle; <= 0 on contact,
  // and 0 whenever GJK did not converge. Counts as one call.
  double clearance(std::span<const double> input_point);
  std::vector<Label> label_all(const PointSet& points);

  std::uint64_t calls() const { return calls_; }
  void reset_calls() { calls_ = 0; }

  const KinematicChain& chain() const { return *chain_; }
  const Workspace& workspace() const { return *workspace_; }

 private:
  const KinematicChain* chain_;
  const Workspace* workspace_;
  std::vector<ConvexBody> posed_;
  std::vector<double> joint_;
  std::uint64_t calls_ = 0;

  void pose(std::span<const double> input_point);
};

}  // namespace fastron
