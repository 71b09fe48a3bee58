#pragma once

#include "waiterplan/dynamics.hpp"
#include "waiterplan/trajectory.hpp"

namespace waiterplan {

struct ControllerConfig {
  VecX Kr;              ///< positive diagonal gains
  double V_M = 0.0;     ///< Lyapunov threshold
  double alpha_c = 1.0; ///< class-K slope
  double sigma_m = 0.0; ///< lower mass-matrix eigenvalue bound
  double sigma_M = 0.0; ///< upper mass-matrix eigenvalue bound

  void validate() const;
};

struct TrackingBounds {
  double eps = 0.0;    ///< bound on the modified error norm ||r||
  VecX eps_p;          ///< position error bound per joint [rad]
  double eps_v = 0.0;  ///< velocity error bound [rad/s]

  TrackingBoundsInflation inflation() const { return {eps_p, eps_v}; }
};

/// eps = sqrt(2 V_M / sigma_m), eps_p = eps / Kr_j, eps_v = 2 eps.
TrackingBounds tracking_bounds(const ControllerConfig& cfg);

struct JointState {
  VecX q, qd;
};

struct DesiredState {
  VecX q, qd, qdd;
};

struct ControlDiagnostics {
  VecX tau;    ///< nominal feedforward torque
  VecX v;      ///< robust input
  VecX r;      ///< modified tracking error
  VecX e, ed;  ///< position and velocity errors
  VecX rho;    ///< worst-case disturbance measure
};

/// Nominal passivity-based input: inverse dynamics at the modified
/// references qd_a = qd_d + Kr e, qdd_a = qdd_d + Kr ed.
VecX nominal_input(const ExtendedArmModel& model, const JointState& state,
                   const DesiredState& desired, const VecX& Kr,
                   const std::vector<LinkParams>& nominal_params);

/// Elementwise max(|inf|, |sup|) of the torque mismatch interval obtained by
/// running the PZ recursion with the interval parameters.
VecX disturbance_measure(const ExtendedArmModel& model, const JointState& state,
                         const DesiredState& desired, const VecX& Kr,
                         const std::vector<LinkParams>& nominal_params,
                         const std::vector<LinkParamsPz>& interval_params);

/// v = -gamma r/|r| with gamma = max(0, -alpha(h)/|r| + |r|^T rho / |r|);
/// h is the Lyapunov headroom V_M - sigma_M |r|^2 / 2.
VecX robust_input(const ControllerConfig& cfg, const VecX& r, const VecX& rho);

/// u = tau - v, with all intermediate quantities reported.
VecX control_step(const ExtendedArmModel& model, const ControllerConfig& cfg,
                  const JointState& state, const DesiredState& desired,
                  const std::vector<LinkParams>& nominal_params,
                  const std::vector<LinkParamsPz>& interval_params,
                  ControlDiagnostics* diag = nullptr);

}  // namespace waiterplan
