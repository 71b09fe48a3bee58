#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "waiterplan/rng.hpp"
#include "waiterplan/scenario.hpp"
#include "waiterplan/serialize.hpp"
#include "waiterplan/verify.hpp"

namespace {

using namespace waiterplan;

int cmd_plan(const std::string& scenario_path, const std::string& out_path,
             std::optional<uint64_t> seed, std::optional<int> max_iters,
             std::optional<double> dt, bool quiet) {
  Scenario scn = load_scenario(scenario_path);
  if (seed) scn.solver.seed = *seed;
  if (max_iters) scn.planner.max_iterations = *max_iters;
  if (dt) scn.dt = *dt;

  const PlanLog log = receding_horizon(scn);
  if (!out_path.empty()) write_plan_log(out_path, log);

  if (!quiet) {
    int feasible = 0, braking = 0, hold = 0;
    for (const auto& rec : log.iterations) {
      switch (rec.kind) {
        case PlanIterationRecord::Kind::feasible: ++feasible; break;
        case PlanIterationRecord::Kind::braking: ++braking; break;
        case PlanIterationRecord::Kind::hold: ++hold; break;
      }
    }
    std::cout << "iterations: " << log.iterations.size() << " (feasible "
              << feasible << ", braking " << braking << ", hold " << hold
              << ")\n";
    std::cout << "final position:";
    for (Eigen::Index i = 0; i < log.final_q.size(); ++i) {
      std::cout << " " << log.final_q[i];
    }
    std::cout << "\n";
    switch (log.outcome) {
      case PlanLog::Outcome::goal_reached:
        std::cout << "outcome: goal reached\n";
        break;
      case PlanLog::Outcome::safe_stop:
        std::cout << "outcome: safe stop\n";
        break;
      case PlanLog::Outcome::iteration_cap:
        std::cout << "outcome: iteration cap (stopped at rest)\n";
        break;
    }
  }
  return log.outcome == PlanLog::Outcome::goal_reached ? 0 : 2;
}

int cmd_verify(const std::string& scenario_path, const std::string& log_path,
               int samples, uint64_t seed, bool quiet) {
  if (samples <= 0) {
    std::cerr << "verify: --samples must be positive\n";
    return 1;
  }
  const Scenario scn = load_scenario(scenario_path);
  const PlanLog log = read_plan_log(log_path);

  std::vector<VerificationReport> reports;

  // Containment audit of the reach sets built for the executed segments.
  Rng rng(seed);
  int audited = 0;
  const int per_iteration =
      std::max(1, samples / std::max<int>(1, static_cast<int>(
                                                 log.iterations.size())));
  for (const auto& rec : log.iterations) {
    if (rec.kind == PlanIterationRecord::Kind::hold) continue;
    auto report = containment_audit(scn, rec.ic, build_reach_sets(scn, rec.ic),
                                    per_iteration, rng.next_u64());
    report.name = "containment[iteration " + std::to_string(rec.index) + "]";
    reports.push_back(std::move(report));
    ++audited;
  }
  if (audited == 0) {
    reports.push_back(containment_audit(scn, samples, seed));
  }

  // Dense contact-residual check along the logged plan: the desired motion
  // with sampled tracking error and sampled parameters must stay feasible.
  {
    VerificationReport dense;
    dense.name = "logged-plan residuals";
    dense.seed = seed;
    Rng drng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (const auto& rec : log.iterations) {
      if (rec.kind == PlanIterationRecord::Kind::hold) continue;
      const auto traj =
          bernstein_from_ic(rec.ic, rec.k, scn.eta1, rec.ic.q, scn.t_fin);
      const double t0 =
          rec.kind == PlanIterationRecord::Kind::braking ? scn.t_plan : 0.0;
      const double t1 =
          rec.kind == PlanIterationRecord::Kind::braking ? scn.t_fin : scn.t_plan;
      const int n_dense = std::max(10, samples / 50);
      for (int s = 0; s < n_dense; ++s) {
        const double t = drng.uniform(t0, t1);
        const auto desired = traj.at(t);
        const int n_q = scn.model.n_actuated();
        const VecX e = scn.bounds.eps_p.cwiseProduct(drng.symmetric_vec(n_q));
        const VecX ed = scn.bounds.eps_v * drng.symmetric_vec(n_q);
        const auto params = sample_params(scn.model, drng);
        const VecX q = desired.q - e;
        const VecX qd = desired.v - ed;
        const VecX qd_aux = desired.v + scn.controller.Kr.cwiseProduct(e);
        const VecX qdd_aux = desired.a + scn.controller.Kr.cwiseProduct(ed);
        const auto dyn = rnea(scn.model, params, q, qd, qd_aux, qdd_aux);
        const Wrench& wc = dyn.wrenches.back();
        const double worst =
            std::max(h_sep(wc), std::max(h_slip(wc, scn.contact),
                                         h_tip(wc, scn.contact)));
        dense.worst_margin = std::max(dense.worst_margin, worst);
        ++dense.samples;
        if (worst > 0.0) {
          ++dense.violations;
          if (dense.notes.size() < 32) {
            dense.notes.push_back("iteration " + std::to_string(rec.index) +
                                  " t=" + std::to_string(t) + " residual " +
                                  std::to_string(worst));
          }
        }

        // Collision spot check: sampled link-volume points must lie outside
        // every obstacle along the executed motion.
        const auto occupancy = fo(scn.model, q);
        for (size_t link = 0; link < occupancy.size(); ++link) {
          for (int pt = 0; pt < 4; ++pt) {
            const VecX point = occupancy[link].sample(drng);
            for (const auto& obs : scn.obstacles) {
              if (((obs.A * point - obs.b).array() <= 0.0).all()) {
                ++dense.violations;
                if (dense.notes.size() < 32) {
                  dense.notes.push_back(
                      "iteration " + std::to_string(rec.index) + " link " +
                      std::to_string(link) + " inside obstacle " + obs.name);
                }
              }
            }
            ++dense.samples;
          }
        }
      }
    }
    reports.push_back(std::move(dense));
  }

  // Closed-loop simulation with a sampled true parameter vector.
  {
    Rng srng(seed ^ 0xda3e39cb94b95bdbULL);
    const auto params_true = sample_params(scn.model, srng);
    auto sim = closed_loop_sim(scn, log, params_true, 1e-3, seed);
    reports.push_back(sim.report);
  }

  const std::string summary = audit_report(reports);
  if (!quiet) std::cout << summary;
  long violations = 0;
  for (const auto& r : reports) violations += r.violations;
  return violations == 0 ? 0 : 3;
}

int cmd_bounds(const std::string& scenario_path) {
  const Scenario scn = load_scenario(scenario_path);
  const TrackingBounds bounds = tracking_bounds(scn.controller);
  std::cout << "sigma_m: " << scn.controller.sigma_m << "\n";
  std::cout << "sigma_M: " << scn.controller.sigma_M << "\n";
  std::cout << "modified error bound: " << bounds.eps << "\n";
  std::cout << "position bound eps_p [rad]:";
  for (Eigen::Index j = 0; j < bounds.eps_p.size(); ++j) {
    std::cout << " " << bounds.eps_p[j];
  }
  std::cout << "\n";
  std::cout << "velocity bound eps_v [rad/s]: " << bounds.eps_v << "\n";
  return 0;
}

int cmd_reach(const std::string& scenario_path, int interval,
              const std::string& dump_path) {
  const Scenario scn = load_scenario(scenario_path);
  const InitialCondition ic = InitialCondition::rest(scn.q_start);
  const auto sets = build_reach_sets(scn, ic);
  if (interval < 0 || interval >= sets.desired.partition.n_t) {
    std::cerr << "reach: interval " << interval << " out of range [0, "
              << sets.desired.partition.n_t << ")\n";
    return 1;
  }

  std::vector<std::pair<std::string, PolyZonotope>> entries;
  const int n_q = scn.model.n_actuated();
  for (int j = 0; j < n_q; ++j) {
    entries.emplace_back("q_desired[" + std::to_string(j) + "]",
                         sets.desired.q[interval][j]);
  }
  for (int j = 0; j < scn.model.n_joints(); ++j) {
    entries.emplace_back("occupancy[" + std::to_string(j) + "]",
                         sets.occupancy[interval][j]);
  }
  entries.emplace_back("contact_force",
                       sets.dynamics[interval].wrenches.object_force());
  entries.emplace_back("contact_moment",
                       sets.dynamics[interval].wrenches.object_moment());
  entries.emplace_back("residual_sep", sets.residuals[interval].sep);
  entries.emplace_back("residual_slip", sets.residuals[interval].slip);
  entries.emplace_back("residual_tip", sets.residuals[interval].tip);
  write_pz_dump_file(dump_path, entries);
  std::cout << "wrote " << entries.size() << " sets for interval " << interval
            << " to " << dump_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon tray-carrying planner with set-based "
               "constraint certification"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, log_path, dump_path;
  std::optional<uint64_t> seed_opt;
  std::optional<int> max_iters_opt;
  std::optional<double> dt_opt;
  uint64_t seed = 0;
  int samples = 10000;
  int interval = 0;
  bool quiet = false;

  auto* plan = app.add_subcommand("plan", "run the receding-horizon planner");
  plan->add_option("scenario", scenario_path, "scenario JSON file")->required();
  plan->add_option("--out", out_path, "plan log output path");
  plan->add_option("--seed", seed_opt, "override the solver seed");
  plan->add_option("--max-iters", max_iters_opt, "planning iteration cap");
  plan->add_option("--dt", dt_opt, "override the time partition step");
  plan->add_flag("--quiet", quiet, "suppress the summary");

  auto* verify = app.add_subcommand("verify", "audit a recorded plan");
  verify->add_option("scenario", scenario_path, "scenario JSON file")->required();
  verify->add_option("log", log_path, "plan log to audit")->required();
  verify->add_option("--samples", samples, "sample budget");
  verify->add_option("--seed", seed, "audit seed");
  verify->add_flag("--quiet", quiet, "suppress the report text");

  auto* bounds = app.add_subcommand("bounds", "print tracking error bounds");
  bounds->add_option("scenario", scenario_path, "scenario JSON file")->required();

  auto* reach = app.add_subcommand("reach", "dump reachable sets for one interval");
  reach->add_option("scenario", scenario_path, "scenario JSON file")->required();
  reach->add_option("--interval", interval, "time subinterval index (0-based)");
  reach->add_option("--dump-reach", dump_path, "output path (WPZ1 binary)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      return cmd_plan(scenario_path, out_path, seed_opt, max_iters_opt, dt_opt,
                      quiet);
    }
    if (verify->parsed()) {
      return cmd_verify(scenario_path, log_path, samples, seed, quiet);
    }
    if (bounds->parsed()) {
      return cmd_bounds(scenario_path);
    }
    if (reach->parsed()) {
      return cmd_reach(scenario_path, interval, dump_path);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
