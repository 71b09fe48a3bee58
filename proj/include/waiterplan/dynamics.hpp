#pragma once

#include <optional>
#include <vector>

#include "waiterplan/kinematics.hpp"

namespace waiterplan {

constexpr double kGravity = 9.81;  // m/s^2

/// Force/moment pair expressed in the named joint frame.
struct Wrench {
  Vec3 force = Vec3::Zero();   // N
  Vec3 moment = Vec3::Zero();  // N m
  int frame = 0;
};

struct RneaOptions {
  bool gravity = true;
  /// Base-frame linear acceleration; overrides the gravity flag when set.
  std::optional<Vec3> base_accel;
};

struct RneaResult {
  VecX tau;                     // per actuated joint
  std::vector<Wrench> wrenches;  // per joint, object last
};

/// Recursive Newton-Euler with separate true and auxiliary velocities.
/// Passing qd_aux = qd reduces to the standard algorithm; zero velocities
/// with unit qdd_aux extract mass-matrix columns.
RneaResult rnea(const ExtendedArmModel& model,
                const std::vector<LinkParams>& params, const VecX& q,
                const VecX& qd, const VecX& qd_aux, const VecX& qdd_aux,
                const RneaOptions& opts = {});

RneaResult rnea(const ExtendedArmModel& model, const VecX& q, const VecX& qd,
                const VecX& qd_aux, const VecX& qdd_aux,
                const RneaOptions& opts = {});

/// Inertia matrix assembled column-by-column from unit-acceleration calls.
MatX mass_matrix(const ExtendedArmModel& model, const VecX& q,
                 const std::vector<LinkParams>& params);
MatX mass_matrix(const ExtendedArmModel& model, const VecX& q);

/// Velocity/gravity torque at zero acceleration.
VecX bias_torque(const ExtendedArmModel& model,
                 const std::vector<LinkParams>& params, const VecX& q,
                 const VecX& qd, const RneaOptions& opts = {});

/// Sample one parameter vector from the model's intervals; throws if a
/// sampled inertia tensor is not positive semidefinite.
class Rng;
std::vector<LinkParams> sample_params(const ExtendedArmModel& model, Rng& rng);

/// Smallest mass-matrix eigenvalue over sampled configurations and sampled
/// inertial parameters; deterministic for a fixed seed.
double estimate_sigma_m(const ExtendedArmModel& model, int n_samples,
                        uint64_t seed);
/// Same sampling, largest eigenvalue (upper bound companion).
double estimate_sigma_max(const ExtendedArmModel& model, int n_samples,
                          uint64_t seed);

/// Per-link inertial parameters as PZs. Uncertain lifts use one inertial
/// indeterminate per scalar parameter (ids are a fixed function of the link
/// and slot, so every use of a parameter shares its indeterminate).
struct LinkParamsPz {
  PolyZonotope mass{1, 1};
  PolyZonotope com{3, 1};
  PolyZonotope inertia{3, 3};
};
std::vector<LinkParamsPz> lift_params_nominal(const ExtendedArmModel& model);
std::vector<LinkParamsPz> lift_params_interval(const ExtendedArmModel& model);

/// Indeterminate of one uncertain scalar parameter. Slots: 0 mass, 1..3 CoM,
/// 4..9 the distinct inertia entries (0,0),(0,1),(0,2),(1,1),(1,2),(2,2).
VarId inertial_param_var(uint32_t link, uint32_t slot);

/// Normalized [-1,1] coordinates of a sampled parameter vector inside the
/// model intervals, keyed by the inertial indeterminates. Zero-width
/// parameters are skipped (their ids never appear in any PZ).
void assign_inertial_coords(const ExtendedArmModel& model,
                            const std::vector<LinkParams>& sample,
                            Assignment* assignment);

struct WrenchSet {
  std::vector<PolyZonotope> force;   // 3x1 per joint
  std::vector<PolyZonotope> moment;  // 3x1 per joint

  const PolyZonotope& object_force() const { return force.back(); }
  const PolyZonotope& object_moment() const { return moment.back(); }
};

struct PzRneaResult {
  std::vector<PolyZonotope> tau;  // scalar, per actuated joint
  WrenchSet wrenches;
};

/// PZ Newton-Euler. All input PZs must be scalar, one per actuated joint.
PzRneaResult pz_rnea(const ExtendedArmModel& model,
                     const std::vector<PolyZonotope>& q,
                     const std::vector<PolyZonotope>& qd,
                     const std::vector<PolyZonotope>& qd_aux,
                     const std::vector<PolyZonotope>& qdd_aux,
                     const std::vector<LinkParamsPz>& params,
                     const RneaOptions& opts = {},
                     int max_terms = kDefaultMaxTerms);

}  // namespace waiterplan
