#pragma once

#include <string>
#include <vector>

#include "waiterplan/poly_zonotope.hpp"
#include "waiterplan/zonotope.hpp"

namespace waiterplan {

struct JointModel {
  enum class Kind { revolute, fixed };
  Kind kind = Kind::revolute;
  Vec3 axis = Vec3::UnitZ();      ///< rotation axis, unit (revolute only)
  Vec3 offset = Vec3::Zero();     ///< p_j^{j-1}, meters, in the parent frame
  Mat3 rotation = Mat3::Identity();  ///< constant R_j^{j-1} (fixed only)

  Mat3 rotation_at(double q) const;
};

/// Nominal inertial parameters of one link: mass, CoM offset in the link
/// frame, inertia tensor about the CoM in the link frame.
struct LinkParams {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();
};

/// Per-parameter intervals for one link; the nominal values must lie inside.
struct LinkParamsInterval {
  Interval mass{0.0, 0.0};                     // 1x1
  Interval com{MatX::Zero(3, 1), MatX::Zero(3, 1)};
  Interval inertia{MatX::Zero(3, 3), MatX::Zero(3, 3)};
};

/// Serial chain of n_q actuated revolute joints plus the object attached by
/// a fixed joint at the contact point (the tray is part of link n_q). Link
/// volumes are expressed in their joint frames.
class ExtendedArmModel {
 public:
  std::vector<JointModel> joints;            // size n_e = n_q + 1
  std::vector<LinkParams> nominal;           // size n_e
  std::vector<LinkParamsInterval> interval;  // size n_e
  std::vector<Zonotope> link_volumes;        // size n_e
  VecX q_lo, q_hi;                           // actuated joint position limits
  VecX qd_lo, qd_hi;                         // actuated joint velocity limits

  int n_joints() const { return static_cast<int>(joints.size()); }
  int n_actuated() const;
  int object_index() const { return n_joints() - 1; }

  void validate() const;

  /// PZ copies of the link volumes (deterministic indeterminates, built
  /// once on first use).
  const std::vector<PolyZonotope>& link_volume_pzs() const;

 private:
  mutable std::vector<PolyZonotope> volume_pzs_;
};

struct FramePose {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();
};

/// World pose of every joint frame. dim(q) = number of actuated joints;
/// fixed joints consume no coordinate.
std::vector<FramePose> fk(const ExtendedArmModel& model, const VecX& q);

/// sin/cos of a scalar PZ via the Taylor overapproximation.
std::pair<PolyZonotope, PolyZonotope> pz_trig(const PolyZonotope& q_pz,
                                              int degree = kDefaultTaylorDegree);

/// R_j^{j-1} as a PZ. Revolute joints use the constant-axis Rodrigues form
/// I + sin(q) K + (1 - cos(q)) K^2.
PolyZonotope joint_rotation_pz(const JointModel& joint,
                               const PolyZonotope& q_pz,
                               int max_terms = kDefaultMaxTerms);

struct FramePosePz {
  PolyZonotope R{3, 3};
  PolyZonotope p{3, 1};
};

std::vector<FramePosePz> pzfk(const ExtendedArmModel& model,
                              const std::vector<PolyZonotope>& q_pzs,
                              int max_terms = kDefaultMaxTerms);

/// Forward occupancy FO_j = p_j + R_j L_j.
std::vector<Zonotope> fo(const ExtendedArmModel& model, const VecX& q);
std::vector<PolyZonotope> pzfo(const ExtendedArmModel& model,
                               const std::vector<FramePosePz>& poses);
std::vector<PolyZonotope> pzfo(const ExtendedArmModel& model,
                               const std::vector<PolyZonotope>& q_pzs,
                               int max_terms = kDefaultMaxTerms);

struct Obstacle {
  Zonotope volume;
  MatX A;  ///< n_f x 3 halfspace normals
  VecX b;  ///< n_f offsets; inside iff A p <= b
  bool inflated = false;  ///< set when a degenerate zonotope was fattened
  std::string name;
};

/// Halfspace representation of a 3-D zonotope (facet normals from generator
/// cross products). Degenerate volumes are inflated by 1e-9 per axis.
Obstacle obstacle_halfspaces(const Zonotope& z);

}  // namespace waiterplan
