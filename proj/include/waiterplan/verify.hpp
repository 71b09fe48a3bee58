#pragma once

#include <string>
#include <vector>

#include "waiterplan/planner.hpp"

namespace waiterplan {

struct VerificationReport {
  std::string name;
  long samples = 0;
  long violations = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  uint64_t seed = 0;
  std::vector<std::string> notes;  ///< one entry per violation, with the sample index

  bool clean() const { return violations == 0; }
};

/// Sample (interval, t, k, tracking error, Delta) tuples, run the scalar
/// pipeline (trajectory -> fk/fo -> rnea -> contact residuals), and check
/// membership in every PZ stage built for the scenario's first planning
/// iteration. slack is the allowed numerical tolerance.
VerificationReport containment_audit(const Scenario& scn, int n_samples,
                                     uint64_t seed, double slack = 1e-9);
VerificationReport containment_audit(const Scenario& scn,
                                     const InitialCondition& ic,
                                     const ReachSets& sets, int n_samples,
                                     uint64_t seed, double slack = 1e-9);

struct SimResult {
  VerificationReport report;
  double max_pos_error = 0.0;  ///< max over time and joints of |e_j|
  double max_vel_error = 0.0;
  double max_r_norm = 0.0;
  double max_contact_residual = -std::numeric_limits<double>::infinity();
  double duration = 0.0;
  /// Optional CSV time series (t, q, e, residuals); filled when requested.
  std::string csv;
};

/// Fixed-step RK4 closed-loop simulation of the executed plan under the
/// robust controller with true parameters params_true (zero-order hold at
/// dt_sim). Tracks tracking-error bounds and contact residuals.
SimResult closed_loop_sim(const Scenario& scn, const PlanLog& log,
                          const std::vector<LinkParams>& params_true,
                          double dt_sim, uint64_t seed,
                          bool want_csv = false);

std::string audit_report(const std::vector<VerificationReport>& reports);

}  // namespace waiterplan
