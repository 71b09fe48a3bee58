#pragma once

#include <vector>

#include "waiterplan/poly_zonotope.hpp"

namespace waiterplan {

struct InitialCondition {
  VecX q;  ///< rad
  VecX v;  ///< rad/s
  VecX a;  ///< rad/s^2

  Eigen::Index size() const { return q.size(); }
  static InitialCondition rest(const VecX& q0);
};

/// Uniform split of the planning horizon [0, t_fin] into n_t subintervals.
struct TimePartition {
  double dt = 0.0;
  double t_plan = 0.0;
  double t_fin = 0.0;
  int n_t = 0;

  double center(int i) const { return (2 * i + 1) * dt / 2.0; }
  double radius() const { return dt / 2.0; }
  /// PZ of subinterval i (0-based): center + radius * x_{t_i}.
  PolyZonotope interval_pz(int i) const;
};

TimePartition time_partition(double dt, double t_fin, double t_plan);

/// Degree-5 Bernstein trajectory on the normalized horizon s = t / t_fin.
/// One coefficient row per joint; derivative evaluations carry the 1/t_fin
/// chain-rule factors.
class BernsteinTrajectory {
 public:
  BernsteinTrajectory() = default;
  BernsteinTrajectory(MatX coefficients, double t_fin);

  const MatX& coefficients() const { return beta_; }
  double horizon() const { return t_fin_; }
  Eigen::Index n_joints() const { return beta_.rows(); }

  struct State {
    VecX q, v, a;
  };
  /// Exact evaluation; t must lie in [0, t_fin].
  State at(double t) const;

 private:
  MatX beta_;  // n_q x 6
  double t_fin_ = 0.0;
};

/// Coefficients from the initial condition, the terminal rest conditions,
/// and the parameterized final position beta5 = eta1 * k + eta2.
BernsteinTrajectory bernstein_from_ic(const InitialCondition& ic, const VecX& k,
                                      const VecX& eta1, const VecX& eta2,
                                      double t_fin);

inline BernsteinTrajectory::State eval_desired(const BernsteinTrajectory& traj,
                                               double t) {
  return traj.at(t);
}

/// Per-interval, per-joint PZ overapproximations of the desired trajectory;
/// indeterminates are x_{t_i} and x_{k_j}.
struct DesiredTrajectoryPz {
  TimePartition partition;
  // [interval][joint], scalar PZs.
  std::vector<std::vector<PolyZonotope>> q, qd, qdd;
};

DesiredTrajectoryPz pz_desired(const InitialCondition& ic, const VecX& eta1,
                               const VecX& eta2, const TimePartition& partition);

struct TrackingBoundsInflation {
  VecX eps_p;      ///< rad, per joint
  double eps_v = 0.0;  ///< rad/s
};

/// Desired PZs widened by the tracking-error indeterminates. The signed
/// convention is q = q_d - eps_p x_ep (x_ep = e / eps_p with e = q_d - q),
/// qd_aux = qd_d + Kr eps_p x_ep, so one error draw maps to one consistent
/// assignment across all four sets.
struct TrackedTrajectoryPz {
  TimePartition partition;
  std::vector<std::vector<PolyZonotope>> q, qd;        // executed envelope
  std::vector<std::vector<PolyZonotope>> qd_aux, qdd_aux;  // modified refs
};

TrackedTrajectoryPz inflate_tracking_error(const DesiredTrajectoryPz& desired,
                                           const TrackingBoundsInflation& bounds,
                                           const VecX& Kr);

}  // namespace waiterplan
