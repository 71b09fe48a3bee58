#pragma once

#include <optional>
#include <string>
#include <vector>

#include "waiterplan/contact.hpp"
#include "waiterplan/controller.hpp"
#include "waiterplan/trajectory.hpp"

namespace waiterplan {

struct SolverParams {
  uint64_t seed = 0;
  int max_inner = 40;       ///< projected-gradient steps per outer round
  int max_outer = 6;        ///< multiplier updates
  double penalty0 = 10.0;
  double penalty_scale = 5.0;
  int multistarts = 3;      ///< additional seeded starts when k=0 fails
};

struct PlannerParams {
  double goal_tol = 0.05;   ///< rad, per joint
  int max_iterations = 100;
  double hlp_step = 0.02;   ///< rad, straight-line waypoint advance
};

struct ScriptEvent {
  int at_iteration = 0;  ///< 1-based planning iteration before which to apply
  Zonotope add_obstacle;
  std::string name;
};

struct Scenario {
  ExtendedArmModel model;
  ContactModel contact;
  std::vector<Obstacle> obstacles;
  VecX q_start, q_goal;
  double dt = 0.05;
  double t_plan = 1.0;
  double t_fin = 2.0;
  VecX eta1;  ///< final-position scale per joint; eta2 is the segment start
  ControllerConfig controller;
  TrackingBounds bounds;  ///< derived from controller at load time
  SolverParams solver;
  PlannerParams planner;
  int verify_samples = 10000;
  std::vector<ScriptEvent> script;

  TimePartition partition() const { return time_partition(dt, t_fin, t_plan); }
  void validate() const;
};

/// q_cur advanced toward q_goal by at most `step` (Euclidean norm).
VecX hlp_waypoint(const VecX& q_cur, const VecX& q_goal, double step);

/// Every reachability stage of one planning iteration, kept for auditing
/// and reach dumps.
struct ReachSets {
  DesiredTrajectoryPz desired;
  TrackedTrajectoryPz tracked;
  std::vector<std::vector<FramePosePz>> poses;      // [interval][joint]
  std::vector<std::vector<PolyZonotope>> occupancy;  // [interval][link]
  std::vector<PzRneaResult> dynamics;                // [interval]
  std::vector<ContactResidualPz> residuals;          // [interval]
};

ReachSets build_reach_sets(const Scenario& scn, const InitialCondition& ic);

/// Scalar constraint sup(g(k)) prepared for repeated evaluation: terms are
/// grouped by their non-parameter monomial so that
///   sup(k) = B0(k) + sum_m |Bm(k)|,
/// with sign subgradients for the absolute values.
class PreparedSup {
 public:
  PreparedSup() = default;
  PreparedSup(const PolyZonotope& scalar_pz, int n_q);

  /// Value, gradient, and distance to the nearest |Bm| kink.
  double eval(const VecX& k, VecX* grad, double* kink_distance) const;

 private:
  struct Entry {
    double coeff;
    std::vector<std::pair<int, uint32_t>> kexp;  // (joint, exponent)
  };
  std::vector<std::vector<Entry>> buckets_;  // bucket 0: constant monomial
  int n_q_ = 0;
};

struct IterationProblem {
  int n_q = 0;
  TimePartition partition;
  /// Contact residual sups, 3 per interval (sep, slip, tip).
  std::vector<PreparedSup> contact;
  struct CollisionEntry {
    int interval, link, obstacle;
    std::vector<PreparedSup> face_inf;  ///< -inf(A FO - b) per face, negated
  };
  std::vector<CollisionEntry> collision;
  VecX cost_a, cost_m, waypoint;  ///< q_d(t_p; k)_j = a_j + m_j k_j
  VecX scale;                     ///< per-constraint normalization
  double build_seconds = 0.0;

  int n_constraints() const;
};

IterationProblem build_iteration(const Scenario& scn, const InitialCondition& ic,
                                 const VecX& waypoint);
IterationProblem build_iteration(const Scenario& scn, const InitialCondition& ic,
                                 const VecX& waypoint, const ReachSets& sets);

struct EvalResult {
  double cost = 0.0;
  VecX cost_grad;
  VecX g;        ///< raw constraint values (feasible iff all <= 0)
  MatX g_grad;   ///< n_c x n_q
  VecX kink;     ///< distance to the nearest subgradient kink per constraint
};

EvalResult eval_k(const IterationProblem& problem, const VecX& k);

struct PlanResult {
  enum class Status { feasible, braking };
  Status status = Status::braking;
  VecX k;
  double cost = 0.0;
  double max_constraint = 0.0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  bool overran_budget = false;
};

/// Augmented-Lagrangian projected gradient over the k box. Reports feasible
/// only when an exact re-evaluation of every constraint is nonpositive.
PlanResult solve(const IterationProblem& problem, const SolverParams& params,
                 double budget_seconds);

struct PlanIterationRecord {
  int index = 0;  ///< 1-based
  enum class Kind { feasible, braking, hold };
  Kind kind = Kind::hold;
  InitialCondition ic;  ///< start of the trajectory this record executes
  VecX k;               ///< trajectory parameter (feasible/braking)
  VecX waypoint;
  double cost = 0.0;
  double max_constraint = 0.0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  bool overran_budget = false;
};

struct PlanLog {
  enum class Outcome { goal_reached, safe_stop, iteration_cap };
  Outcome outcome = Outcome::safe_stop;
  std::vector<PlanIterationRecord> iterations;
  VecX final_q;
  uint64_t seed = 0;
};

PlanLog receding_horizon(const Scenario& scn);

std::string plan_log_to_json(const PlanLog& log);
PlanLog plan_log_from_json(const std::string& text);
void write_plan_log(const std::string& path, const PlanLog& log);
PlanLog read_plan_log(const std::string& path);

}  // namespace waiterplan
