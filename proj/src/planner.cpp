#include "waiterplan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "waiterplan/parallel.hpp"
#include "waiterplan/rng.hpp"

namespace waiterplan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Term cap for constraint residual PZs; looser than the pipeline cap so the
/// squared wrench products stay tight.
constexpr int kConstraintMaxTerms = 120;

}  // namespace

void Scenario::validate() const {
  model.validate();
  contact.validate();
  controller.validate();
  const int n_q = model.n_actuated();
  if (q_start.size() != n_q || q_goal.size() != n_q || eta1.size() != n_q) {
    throw std::invalid_argument("scenario: start/goal/eta1 dimension mismatch");
  }
  for (Eigen::Index j = 0; j < q_start.size(); ++j) {
    if (q_start[j] < model.q_lo[j] - 1e-9 || q_start[j] > model.q_hi[j] + 1e-9 ||
        q_goal[j] < model.q_lo[j] - 1e-9 || q_goal[j] > model.q_hi[j] + 1e-9) {
      throw std::invalid_argument("scenario: start/goal outside joint limits");
    }
  }
  (void)partition();  // throws on a bad dt / t_plan / t_fin combination
}

VecX hlp_waypoint(const VecX& q_cur, const VecX& q_goal, double step) {
  if (step <= 0) throw std::invalid_argument("hlp_waypoint: step must be positive");
  const VecX delta = q_goal - q_cur;
  const double dist = delta.norm();
  if (dist <= step || dist == 0.0) return q_goal;
  return q_cur + (step / dist) * delta;
}

ReachSets build_reach_sets(const Scenario& scn, const InitialCondition& ic) {
  const TimePartition partition = scn.partition();
  ReachSets sets;
  sets.desired = pz_desired(ic, scn.eta1, ic.q, partition);
  sets.tracked = inflate_tracking_error(sets.desired, scn.bounds.inflation(),
                                        scn.controller.Kr);
  const auto params_int = lift_params_interval(scn.model);

  const int n_t = partition.n_t;
  sets.poses.resize(n_t);
  sets.occupancy.resize(n_t);
  sets.dynamics.resize(n_t);
  sets.residuals.resize(n_t);
  parallel_for(n_t, [&](int i) {
    FreshVars::Scope scope(static_cast<uint32_t>(1 + i));
    sets.poses[i] = pzfk(scn.model, sets.tracked.q[i]);
    sets.occupancy[i] = pzfo(scn.model, sets.poses[i]);
    sets.dynamics[i] =
        pz_rnea(scn.model, sets.tracked.q[i], sets.tracked.qd[i],
                sets.tracked.qd_aux[i], sets.tracked.qdd_aux[i], params_int);
    ContactResidualPz res = pz_contact_constraints(
        sets.dynamics[i].wrenches.object_force(),
        sets.dynamics[i].wrenches.object_moment(), scn.contact);
    res.sep = res.sep.reduce(kConstraintMaxTerms);
    res.slip = res.slip.reduce(kConstraintMaxTerms);
    res.tip = res.tip.reduce(kConstraintMaxTerms);
    sets.residuals[i] = std::move(res);
  });
  return sets;
}

/*
 * PreparedSup
 */

PreparedSup::PreparedSup(const PolyZonotope& scalar_pz, int n_q) : n_q_(n_q) {
  if (!scalar_pz.is_scalar()) {
    throw std::invalid_argument("PreparedSup: scalar constraint required");
  }
  struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
      return a.compare(b) < 0;
    }
  };
  std::map<Monomial, size_t, MonoLess> index;
  buckets_.emplace_back();  // bucket 0: constant non-parameter monomial
  index.emplace(Monomial::one(), 0);
  for (const auto& term : scalar_pz.terms()) {
    Entry entry;
    entry.coeff = term.coeff(0, 0);
    Monomial other = Monomial::one();
    for (const auto& f : term.mono.factors()) {
      if (f.id.tag == VarTag::parameter) {
        if (f.id.index >= static_cast<uint32_t>(n_q)) {
          throw std::invalid_argument("PreparedSup: parameter index out of range");
        }
        entry.kexp.push_back({static_cast<int>(f.id.index), f.exp});
      } else {
        other = other.times(Monomial::var(f.id, f.exp));
      }
    }
    auto [it, inserted] = index.emplace(other, buckets_.size());
    if (inserted) buckets_.emplace_back();
    buckets_[it->second].push_back(std::move(entry));
  }
}

double PreparedSup::eval(const VecX& k, VecX* grad, double* kink_distance) const {
  if (k.size() != n_q_) throw std::invalid_argument("PreparedSup: k size mismatch");
  double value = 0.0;
  if (grad != nullptr) *grad = VecX::Zero(n_q_);
  double kink = std::numeric_limits<double>::infinity();
  VecX bucket_grad(n_q_);
  for (size_t m = 0; m < buckets_.size(); ++m) {
    double bval = 0.0;
    bucket_grad.setZero();
    for (const auto& e : buckets_[m]) {
      double prod = e.coeff;
      for (const auto& [j, exp] : e.kexp) {
        prod *= std::pow(k[j], static_cast<int>(exp));
      }
      bval += prod;
      if (grad != nullptr) {
        for (const auto& [j, exp] : e.kexp) {
          double dp = e.coeff * exp * std::pow(k[j], static_cast<int>(exp) - 1);
          for (const auto& [j2, exp2] : e.kexp) {
            if (j2 != j) dp *= std::pow(k[j2], static_cast<int>(exp2));
          }
          bucket_grad[j] += dp;
        }
      }
    }
    if (m == 0) {
      value += bval;
      if (grad != nullptr) *grad += bucket_grad;
    } else {
      value += std::abs(bval);
      kink = std::min(kink, std::abs(bval));
      if (grad != nullptr && bval != 0.0) {
        *grad += (bval > 0 ? 1.0 : -1.0) * bucket_grad;
      }
    }
  }
  if (kink_distance != nullptr) *kink_distance = kink;
  return value;
}

/*
 * Iteration problem
 */

int IterationProblem::n_constraints() const {
  return static_cast<int>(contact.size() + collision.size());
}

IterationProblem build_iteration(const Scenario& scn,
                                 const InitialCondition& ic,
                                 const VecX& waypoint) {
  return build_iteration(scn, ic, waypoint, build_reach_sets(scn, ic));
}

IterationProblem build_iteration(const Scenario& scn,
                                 const InitialCondition& ic,
                                 const VecX& waypoint, const ReachSets& sets) {
  const auto t0 = Clock::now();
  IterationProblem out;
  out.n_q = scn.model.n_actuated();
  out.partition = sets.desired.partition;
  out.waypoint = waypoint;

  const int n_t = out.partition.n_t;
  out.contact.resize(static_cast<size_t>(n_t) * 3);
  for (int i = 0; i < n_t; ++i) {
    out.contact[3 * i + 0] = PreparedSup(sets.residuals[i].sep, out.n_q);
    out.contact[3 * i + 1] = PreparedSup(sets.residuals[i].slip, out.n_q);
    out.contact[3 * i + 2] = PreparedSup(sets.residuals[i].tip, out.n_q);
  }

  const int n_links = scn.model.n_joints();
  for (int i = 0; i < n_t; ++i) {
    for (int j = 0; j < n_links; ++j) {
      for (size_t o = 0; o < scn.obstacles.size(); ++o) {
        const auto& obs = scn.obstacles[o];
        IterationProblem::CollisionEntry entry;
        entry.interval = i;
        entry.link = j;
        entry.obstacle = static_cast<int>(o);
        const PolyZonotope gap =
            PolyZonotope::constant(obs.A) * sets.occupancy[i][j] -
            PolyZonotope::constant(MatX(obs.b));
        entry.face_inf.reserve(static_cast<size_t>(gap.rows()));
        for (Eigen::Index r = 0; r < gap.rows(); ++r) {
          // sup(-gap_r) = -inf(gap_r); the collision value is the min over
          // faces, nonpositive when some face certifies separation.
          entry.face_inf.emplace_back(-gap.entry(r), out.n_q);
        }
        out.collision.push_back(std::move(entry));
      }
    }
  }

  // Affine map of the desired position at t_plan.
  const VecX zero = VecX::Zero(out.n_q);
  const VecX ones = VecX::Ones(out.n_q);
  const auto at_zero =
      bernstein_from_ic(ic, zero, scn.eta1, ic.q, scn.t_fin).at(scn.t_plan);
  const auto at_one =
      bernstein_from_ic(ic, ones, scn.eta1, ic.q, scn.t_fin).at(scn.t_plan);
  out.cost_a = at_zero.q;
  out.cost_m = at_one.q - at_zero.q;

  // Normalization for the solver; raw values are kept for certification.
  out.scale = VecX::Ones(out.n_constraints());
  const EvalResult probe = eval_k(out, VecX::Zero(out.n_q));
  out.scale = probe.g.cwiseAbs().cwiseMax(1.0);

  out.build_seconds = seconds_since(t0);
  return out;
}

EvalResult eval_k(const IterationProblem& problem, const VecX& k) {
  if (k.size() != problem.n_q) {
    throw std::invalid_argument("eval_k: k dimension mismatch");
  }
  EvalResult out;
  const int n_c = problem.n_constraints();
  out.g.resize(n_c);
  out.g_grad.resize(n_c, problem.n_q);
  out.kink.resize(n_c);

  int c = 0;
  VecX grad(problem.n_q);
  for (const auto& sup : problem.contact) {
    double kink;
    out.g[c] = sup.eval(k, &grad, &kink);
    out.g_grad.row(c) = grad.transpose();
    out.kink[c] = kink;
    ++c;
  }
  for (const auto& entry : problem.collision) {
    // h = min over faces of sup(-(A FO - b)_r); ties take the lowest row.
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    double best_kink = best;
    VecX best_grad = VecX::Zero(problem.n_q);
    for (const auto& face : entry.face_inf) {
      double kink;
      const double v = face.eval(k, &grad, &kink);
      if (v < best) {
        second = best;
        best = v;
        best_grad = grad;
        best_kink = kink;
      } else if (v < second) {
        second = v;
      }
    }
    out.g[c] = best;
    out.g_grad.row(c) = best_grad.transpose();
    out.kink[c] = std::min(best_kink, 0.5 * (second - best));
    ++c;
  }

  const VecX resid = problem.cost_a + problem.cost_m.cwiseProduct(k) -
                     problem.waypoint;
  out.cost = resid.squaredNorm();
  out.cost_grad = 2.0 * problem.cost_m.cwiseProduct(resid);
  return out;
}

/*
 * Solver
 */

namespace {

VecX clamp_box(const VecX& k) {
  return k.cwiseMax(-1.0).cwiseMin(1.0);
}

struct AlEval {
  double L;
  VecX grad;
  EvalResult raw;
};

AlEval augmented_lagrangian(const IterationProblem& problem, const VecX& k,
                            const VecX& lambda, double mu, double cost_scale) {
  AlEval out;
  out.raw = eval_k(problem, k);
  out.L = out.raw.cost / cost_scale;
  out.grad = out.raw.cost_grad / cost_scale;
  for (int c = 0; c < problem.n_constraints(); ++c) {
    const double g = out.raw.g[c] / problem.scale[c];
    const double active = std::max(0.0, lambda[c] + mu * g);
    out.L += (active * active - lambda[c] * lambda[c]) / (2.0 * mu);
    if (active > 0.0) {
      out.grad += (active / problem.scale[c]) * out.raw.g_grad.row(c).transpose();
    }
  }
  return out;
}

}  // namespace

PlanResult solve(const IterationProblem& problem, const SolverParams& params,
                 double budget_seconds) {
  const auto t0 = Clock::now();
  const int n_q = problem.n_q;
  const int n_c = problem.n_constraints();

  const double cost_scale =
      std::max(eval_k(problem, VecX::Zero(n_q)).cost, 1e-8);

  PlanResult out;
  out.k = VecX::Zero(n_q);
  double best_cost = std::numeric_limits<double>::infinity();
  bool found_feasible = false;

  Rng rng(params.seed);
  std::vector<VecX> starts{VecX::Zero(n_q)};
  for (int s = 0; s < params.multistarts; ++s) {
    starts.push_back(rng.symmetric_vec(n_q));
  }

  for (size_t s = 0; s < starts.size(); ++s) {
    if (s > 0 && found_feasible) break;
    VecX k = clamp_box(starts[s]);
    VecX lambda = VecX::Zero(n_c);
    double mu = params.penalty0;
    double prev_violation = std::numeric_limits<double>::infinity();

    for (int outer = 0; outer < params.max_outer; ++outer) {
      AlEval ev = augmented_lagrangian(problem, k, lambda, mu, cost_scale);
      for (int inner = 0; inner < params.max_inner; ++inner) {
        // Projected-gradient stationarity on the box.
        const VecX step_dir = (clamp_box(k - ev.grad) - k);
        if (step_dir.norm() < 1e-12) break;
        double alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-14) {
          const VecX kn = clamp_box(k - alpha * ev.grad);
          AlEval en = augmented_lagrangian(problem, kn, lambda, mu, cost_scale);
          if (en.L <= ev.L - 1e-4 * (k - kn).squaredNorm() / std::max(alpha, 1e-14)) {
            k = kn;
            ev = std::move(en);
            moved = true;
            break;
          }
          alpha *= 0.5;
        }
        if (!moved) break;
      }

      double violation = 0.0;
      for (int c = 0; c < n_c; ++c) {
        const double g = ev.raw.g[c] / problem.scale[c];
        lambda[c] = std::max(0.0, lambda[c] + mu * g);
        violation = std::max(violation, g);
      }
      const double max_raw = n_c > 0 ? ev.raw.g.maxCoeff() : -1.0;
      if (max_raw <= 0.0 && (!found_feasible || ev.raw.cost < best_cost)) {
        found_feasible = true;
        best_cost = ev.raw.cost;
        out.k = k;
        out.cost = ev.raw.cost;
        out.max_constraint = max_raw;
      }
      if (violation <= 0.0) break;
      if (violation > 0.25 * prev_violation) mu *= params.penalty_scale;
      prev_violation = violation;
    }
  }

  if (found_feasible) {
    // Certify the returned parameter with a fresh exact evaluation.
    const EvalResult check = eval_k(problem, out.k);
    const double max_g = n_c > 0 ? check.g.maxCoeff() : -1.0;
    if (max_g <= 0.0) {
      out.status = PlanResult::Status::feasible;
      out.cost = check.cost;
      out.max_constraint = max_g;
    } else {
      out.status = PlanResult::Status::braking;
    }
  }
  out.build_seconds = problem.build_seconds;
  out.solve_seconds = seconds_since(t0);
  out.overran_budget =
      out.build_seconds + out.solve_seconds > budget_seconds;
  return out;
}

/*
 * Receding horizon
 */

PlanLog receding_horizon(const Scenario& scenario) {
  Scenario scn = scenario;
  scn.validate();
  const int n_q = scn.model.n_actuated();

  PlanLog log;
  log.seed = scn.solver.seed;

  struct ActivePlan {
    InitialCondition ic;
    VecX k;
  };
  std::optional<ActivePlan> active;
  InitialCondition chained = InitialCondition::rest(scn.q_start);

  auto make_traj = [&](const InitialCondition& ic, const VecX& k) {
    return bernstein_from_ic(ic, k, scn.eta1, ic.q, scn.t_fin);
  };
  auto push_braking = [&](int index) {
    PlanIterationRecord rec;
    rec.index = index;
    rec.kind = PlanIterationRecord::Kind::braking;
    rec.ic = active->ic;
    rec.k = active->k;
    log.iterations.push_back(rec);
    chained = InitialCondition::rest(make_traj(active->ic, active->k)
                                         .at(scn.t_fin)
                                         .q);
    active.reset();
  };

  int iter = 1;
  for (; iter <= scn.planner.max_iterations; ++iter) {
    for (const auto& event : scn.script) {
      if (event.at_iteration == iter) {
        Obstacle obs = obstacle_halfspaces(event.add_obstacle);
        obs.name = event.name;
        scn.obstacles.push_back(std::move(obs));
      }
    }

    // Goal test on the state the arm would come to rest at.
    if (active) {
      const VecX rest_q = make_traj(active->ic, active->k).at(scn.t_fin).q;
      if ((rest_q - scn.q_goal).cwiseAbs().maxCoeff() <= scn.planner.goal_tol) {
        push_braking(iter);
        log.outcome = PlanLog::Outcome::goal_reached;
        log.final_q = chained.q;
        return log;
      }
    } else if ((chained.q - scn.q_goal).cwiseAbs().maxCoeff() <=
               scn.planner.goal_tol) {
      log.outcome = PlanLog::Outcome::goal_reached;
      log.final_q = chained.q;
      return log;
    }

    const VecX waypoint =
        hlp_waypoint(chained.q, scn.q_goal, scn.planner.hlp_step);
    const IterationProblem problem = build_iteration(scn, chained, waypoint);
    const PlanResult result = solve(problem, scn.solver, scn.t_plan);

    PlanIterationRecord rec;
    rec.index = iter;
    rec.waypoint = waypoint;
    rec.cost = result.cost;
    rec.max_constraint = result.max_constraint;
    rec.build_seconds = result.build_seconds;
    rec.solve_seconds = result.solve_seconds;
    rec.overran_budget = result.overran_budget;

    if (result.status == PlanResult::Status::feasible) {
      rec.kind = PlanIterationRecord::Kind::feasible;
      rec.ic = chained;
      rec.k = result.k;
      log.iterations.push_back(rec);
      const auto traj = make_traj(chained, result.k);
      const auto mid = traj.at(scn.t_plan);
      active = ActivePlan{chained, result.k};
      chained = {mid.q, mid.v, mid.a};
    } else if (active) {
      rec.kind = PlanIterationRecord::Kind::braking;
      rec.ic = active->ic;
      rec.k = active->k;
      log.iterations.push_back(rec);
      chained = InitialCondition::rest(
          make_traj(active->ic, active->k).at(scn.t_fin).q);
      active.reset();
    } else {
      rec.kind = PlanIterationRecord::Kind::hold;
      rec.ic = chained;
      rec.k = VecX::Zero(n_q);
      log.iterations.push_back(rec);
    }
  }

  // Iteration cap: always end at rest.
  if (active) push_braking(iter);
  log.outcome = PlanLog::Outcome::iteration_cap;
  log.final_q = chained.q;
  return log;
}

/*
 * Plan log serialization
 */

namespace {

using nlohmann::json;

json vec_to_json(const VecX& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

VecX vec_from_json(const json& j) {
  VecX out(j.size());
  for (size_t i = 0; i < j.size(); ++i) out[static_cast<Eigen::Index>(i)] = j[i];
  return out;
}

const char* kind_name(PlanIterationRecord::Kind kind) {
  switch (kind) {
    case PlanIterationRecord::Kind::feasible:
      return "feasible";
    case PlanIterationRecord::Kind::braking:
      return "braking";
    default:
      return "hold";
  }
}

PlanIterationRecord::Kind kind_from_name(const std::string& name) {
  if (name == "feasible") return PlanIterationRecord::Kind::feasible;
  if (name == "braking") return PlanIterationRecord::Kind::braking;
  if (name == "hold") return PlanIterationRecord::Kind::hold;
  throw std::runtime_error("plan log: unknown record kind " + name);
}

const char* outcome_name(PlanLog::Outcome outcome) {
  switch (outcome) {
    case PlanLog::Outcome::goal_reached:
      return "goal_reached";
    case PlanLog::Outcome::safe_stop:
      return "safe_stop";
    default:
      return "iteration_cap";
  }
}

PlanLog::Outcome outcome_from_name(const std::string& name) {
  if (name == "goal_reached") return PlanLog::Outcome::goal_reached;
  if (name == "safe_stop") return PlanLog::Outcome::safe_stop;
  if (name == "iteration_cap") return PlanLog::Outcome::iteration_cap;
  throw std::runtime_error("plan log: unknown outcome " + name);
}

}  // namespace

std::string plan_log_to_json(const PlanLog& log) {
  json j;
  j["version"] = 1;
  j["seed"] = log.seed;
  j["outcome"] = outcome_name(log.outcome);
  j["final_q"] = vec_to_json(log.final_q);
  j["iterations"] = json::array();
  for (const auto& rec : log.iterations) {
    json r;
    r["index"] = rec.index;
    r["kind"] = kind_name(rec.kind);
    r["ic"] = {{"q", vec_to_json(rec.ic.q)},
               {"v", vec_to_json(rec.ic.v)},
               {"a", vec_to_json(rec.ic.a)}};
    r["k"] = vec_to_json(rec.k);
    r["waypoint"] = vec_to_json(rec.waypoint);
    r["cost"] = rec.cost;
    r["max_constraint"] = rec.max_constraint;
    r["build_seconds"] = rec.build_seconds;
    r["solve_seconds"] = rec.solve_seconds;
    r["overran_budget"] = rec.overran_budget;
    j["iterations"].push_back(std::move(r));
  }
  return j.dump(2);
}

PlanLog plan_log_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("version", 0) != 1) {
    throw std::runtime_error("plan log: unsupported version");
  }
  PlanLog log;
  log.seed = j.value("seed", 0ULL);
  log.outcome = outcome_from_name(j.at("outcome"));
  log.final_q = vec_from_json(j.at("final_q"));
  for (const auto& r : j.at("iterations")) {
    PlanIterationRecord rec;
    rec.index = r.at("index");
    rec.kind = kind_from_name(r.at("kind"));
    rec.ic.q = vec_from_json(r.at("ic").at("q"));
    rec.ic.v = vec_from_json(r.at("ic").at("v"));
    rec.ic.a = vec_from_json(r.at("ic").at("a"));
    rec.k = vec_from_json(r.at("k"));
    rec.waypoint = vec_from_json(r.at("waypoint"));
    rec.cost = r.value("cost", 0.0);
    rec.max_constraint = r.value("max_constraint", 0.0);
    rec.build_seconds = r.value("build_seconds", 0.0);
    rec.solve_seconds = r.value("solve_seconds", 0.0);
    rec.overran_budget = r.value("overran_budget", false);
    log.iterations.push_back(std::move(rec));
  }
  return log;
}

void write_plan_log(const std::string& path, const PlanLog& log) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("plan log: cannot open " + path);
  os << plan_log_to_json(log) << "\n";
}

PlanLog read_plan_log(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("plan log: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return plan_log_from_json(text);
}

}  // namespace waiterplan
