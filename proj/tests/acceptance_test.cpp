#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "support.hpp"
#include "waiterplan/scenario.hpp"
#include "waiterplan/verify.hpp"

using namespace waiterplan;
using namespace waiterplan::testing;

namespace {

const std::string kScenarios = WAITERPLAN_SCENARIO_DIR;
const std::string kCli = WAITERPLAN_CLI_PATH;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void verdict(int criterion, const std::string& what, bool pass) {
  std::cout << "criterion " << criterion << " (" << what
            << "): " << (pass ? "PASS" : "FAIL") << std::endl;
  CHECK_MESSAGE(pass, "criterion ", criterion, ": ", what);
}

double parse_after(const std::string& text, const std::string& label) {
  const auto pos = text.find(label);
  REQUIRE(pos != std::string::npos);
  return std::strtod(text.c_str() + pos + label.size(), nullptr);
}

}  // namespace

TEST_CASE("criterion 1: reference controller constants") {
  const auto t0 = Clock::now();
  const std::string cmd = kCli + " bounds " + kScenarios +
                          "/reference_bounds.json > acceptance_bounds.txt 2>&1";
  const int status = std::system(cmd.c_str());
  const double elapsed = seconds_since(t0);
  REQUIRE(WEXITSTATUS(status) == 0);

  std::ifstream is("acceptance_bounds.txt");
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string out = ss.str();
  const double eps = parse_after(out, "modified error bound:");
  const double eps_p = parse_after(out, "position bound eps_p [rad]:");
  const double eps_v = parse_after(out, "velocity bound eps_v [rad/s]:");

  const bool pass = std::abs(eps - 0.0705) <= 1e-3 &&
                    std::abs(eps_p - 0.0176) <= 5e-4 &&
                    std::abs(eps_v - 0.1411) <= 1e-3 && elapsed < 1.0;
  verdict(1, "tracking bounds 0.0705 / 0.0176 / 0.1411 in under 1 s", pass);
}

TEST_CASE("criterion 2: containment suite at 1e4 samples") {
  const auto t0 = Clock::now();
  const Scenario scn = load_scenario(kScenarios + "/desk_3dof.json");
  const auto report = containment_audit(scn, 10000, 2024, 1e-9);
  const double elapsed = seconds_since(t0);
  std::cout << "  containment: " << report.samples << " samples, "
            << report.violations << " violations, worst margin "
            << report.worst_margin << ", " << elapsed << " s" << std::endl;
  verdict(2, "zero containment violations across all pipeline stages",
          report.violations == 0 && elapsed < 120.0);
}

TEST_CASE("criterion 3: static contact exactness") {
  const Scenario scn = load_scenario(kScenarios + "/desk_3dof.json");
  const double m_o = scn.model.nominal.back().mass;
  const VecX zero = VecX::Zero(3);
  const auto rest = rnea(scn.model, zero, zero, zero, zero);
  const Wrench& w = rest.wrenches.back();

  bool pass = std::abs(w.force.x()) <= 1e-9 && std::abs(w.force.y()) <= 1e-9 &&
              std::abs(w.force.z() - m_o * kGravity) <= 1e-9 &&
              w.moment.cwiseAbs().maxCoeff() <= 1e-9 && h_sep(w) < 0.0 &&
              h_slip(w, scn.contact) < 0.0 && h_tip(w, scn.contact) < 0.0;

  // Coulomb threshold: a horizontally accelerating support hits the slip
  // boundary exactly at mu_s * g.
  ExtendedArmModel object_only;
  object_only.joints = {scn.model.joints.back()};
  object_only.joints[0].offset = Vec3::Zero();
  object_only.nominal = {scn.model.nominal.back()};
  object_only.interval = {scn.model.interval.back()};
  object_only.link_volumes = {scn.model.link_volumes.back()};
  object_only.q_lo = VecX(0);
  object_only.q_hi = VecX(0);
  object_only.qd_lo = VecX(0);
  object_only.qd_hi = VecX(0);
  object_only.validate();
  RneaOptions accel;
  accel.base_accel = Vec3(scn.contact.mu_s * kGravity, 0.0, kGravity);
  const auto pushed = rnea(object_only, VecX(0), VecX(0), VecX(0), VecX(0), accel);
  const double boundary = h_slip(pushed.wrenches.back(), scn.contact);
  pass = pass && std::abs(boundary) <= 1e-9;

  verdict(3, "resting wrench exact and Coulomb threshold at mu_s * g", pass);
}

TEST_CASE("criterion 4: dynamics oracle equivalence") {
  const Scenario scn = load_scenario(kScenarios + "/desk_3dof.json");
  Rng rng(4);
  double worst_sym = 0.0, worst_assembly = 0.0, min_eig = 1e300;
  for (int s = 0; s < 10000; ++s) {
    const VecX q = rng.uniform_vec(scn.model.q_lo, scn.model.q_hi);
    const MatX M = mass_matrix(scn.model, q);
    worst_sym = std::max(worst_sym, (M - M.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<MatX> eig(M);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());

    const VecX qd = rng.symmetric_vec(3);
    const VecX qdd = rng.symmetric_vec(3);
    const VecX bias = bias_torque(scn.model, scn.model.nominal, q, qd);
    const VecX tau = rnea(scn.model, q, qd, qd, qdd).tau;
    worst_assembly = std::max(
        worst_assembly, (M * qdd + bias - tau).cwiseAbs().maxCoeff());
  }
  std::cout << "  symmetry " << worst_sym << ", min eigenvalue " << min_eig
            << ", assembly " << worst_assembly << std::endl;
  verdict(4, "mass matrix symmetric PD and rnea equals M qdd + bias",
          worst_sym <= 1e-10 && min_eig > 0.0 && worst_assembly <= 1e-9);
}

TEST_CASE("criterion 5: analytic gradients") {
  Scenario scn = load_scenario(kScenarios + "/desk_3dof.json");
  const InitialCondition ic = InitialCondition::rest(scn.q_start);
  const IterationProblem problem = build_iteration(scn, ic, scn.q_goal);

  Rng rng(5);
  const double h = 1e-6;
  int points = 0;
  double worst = 0.0;
  while (points < 100) {
    const VecX k = 0.9 * rng.symmetric_vec(3);
    const EvalResult mid = eval_k(problem, k);
    ++points;
    for (int c = 0; c < problem.n_constraints(); ++c) {
      if (mid.kink[c] < 1e-4) continue;  // documented subgradient kink set
      for (int j = 0; j < 3; ++j) {
        VecX up = k, dn = k;
        up[j] += h;
        dn[j] -= h;
        const double fd =
            (eval_k(problem, up).g[c] - eval_k(problem, dn).g[c]) / (2 * h);
        const double an = mid.g_grad(c, j);
        worst = std::max(
            worst, std::abs(an - fd) / std::max({1.0, std::abs(an), std::abs(fd)}));
      }
    }
    for (int j = 0; j < 3; ++j) {
      VecX up = k, dn = k;
      up[j] += h;
      dn[j] -= h;
      const double fd =
          (eval_k(problem, up).cost - eval_k(problem, dn).cost) / (2 * h);
      worst = std::max(worst, std::abs(mid.cost_grad[j] - fd) /
                                  std::max({1.0, std::abs(fd)}));
    }
  }
  std::cout << "  worst relative gradient error " << worst << std::endl;
  verdict(5, "eval_k gradients match central differences at 100 points",
          worst <= 1e-5);
}

TEST_CASE("criterion 6: closed-loop tracking bounds") {
  const auto t0 = Clock::now();
  Scenario scn = load_scenario(kScenarios + "/desk_3dof.json");
  scn.q_goal = (VecX(3) << 0.06, -0.05, 0.06).finished();
  scn.planner.max_iterations = 10;
  const PlanLog log = receding_horizon(scn);
  REQUIRE(!log.iterations.empty());

  Rng rng(6);
  bool pass = true;
  double worst_e = 0.0, worst_ed = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto params_true = sample_params(scn.model, rng);
    const auto sim = closed_loop_sim(scn, log, params_true, 1e-3,
                                     static_cast<uint64_t>(trial));
    worst_e = std::max(worst_e, sim.max_pos_error);
    worst_ed = std::max(worst_ed, sim.max_vel_error);
    pass = pass && sim.max_pos_error <= scn.bounds.eps_p.minCoeff() &&
           sim.max_vel_error <= scn.bounds.eps_v;
  }
  const double elapsed = seconds_since(t0);
  std::cout << "  worst |e| " << worst_e << " (eps_p "
            << scn.bounds.eps_p.minCoeff() << "), worst |ed| " << worst_ed
            << " (eps_v " << scn.bounds.eps_v << "), " << elapsed << " s"
            << std::endl;
  verdict(6, "ten mismatched simulations stay within eps_p and eps_v",
          pass && elapsed < 300.0);
}

TEST_CASE("criterion 7: randomized desk-scale planning trials") {
  const auto t0 = Clock::now();
  const Scenario base = load_scenario(kScenarios + "/desk_3dof.json");
  Rng rng(7);

  int goals = 0, stops = 0;
  long violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Scenario scn = base;
    scn.obstacles.clear();
    scn.solver.seed = static_cast<uint64_t>(trial);
    scn.planner.max_iterations = 14;
    scn.planner.hlp_step = 0.03;

    // Random feasible start/goal pair.
    scn.q_start = 0.5 * rng.symmetric_vec(3);
    scn.q_goal = scn.q_start + 0.12 * rng.symmetric_vec(3);

    // Two random box obstacles, rejected if they touch the start or goal
    // occupancy (interval-hull overlap test).
    const auto hulls = [&](const VecX& q) {
      std::vector<Interval> out;
      for (const auto& z : fo(scn.model, q)) out.push_back(z.to_interval());
      return out;
    };
    const auto start_hulls = hulls(scn.q_start);
    const auto goal_hulls = hulls(scn.q_goal);
    while (scn.obstacles.size() < 2) {
      const Vec3 center(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7),
                        rng.uniform(0.1, 0.7));
      const Vec3 half(rng.uniform(0.005, 0.025), rng.uniform(0.005, 0.025),
                      rng.uniform(0.005, 0.025));
      const Zonotope box = box_zonotope(center, half);
      const Interval hull = box.to_interval();
      bool clear = true;
      for (const auto& list : {start_hulls, goal_hulls}) {
        for (const auto& link : list) {
          const bool separated =
              (hull.lo().array() > link.hi().array() + 0.02).any() ||
              (hull.hi().array() < link.lo().array() - 0.02).any();
          clear = clear && separated;
        }
      }
      if (clear) scn.obstacles.push_back(obstacle_halfspaces(box));
    }

    const PlanLog log = receding_horizon(scn);
    if (log.outcome == PlanLog::Outcome::goal_reached) {
      ++goals;
    } else {
      ++stops;
    }

    // Verification of every committed segment: dense contact residuals and
    // collision sampling, plus one mismatched closed-loop run.
    Rng vrng(1000 + static_cast<uint64_t>(trial));
    for (const auto& rec : log.iterations) {
      if (rec.kind == PlanIterationRecord::Kind::hold) continue;
      const auto traj =
          bernstein_from_ic(rec.ic, rec.k, scn.eta1, rec.ic.q, scn.t_fin);
      const double lo =
          rec.kind == PlanIterationRecord::Kind::braking ? scn.t_plan : 0.0;
      const double hi =
          rec.kind == PlanIterationRecord::Kind::braking ? scn.t_fin
                                                         : scn.t_plan;
      for (int s = 0; s < 60; ++s) {
        const double t = vrng.uniform(lo, hi);
        const auto st = traj.at(t);
        const VecX e = scn.bounds.eps_p.cwiseProduct(vrng.symmetric_vec(3));
        const VecX ed = scn.bounds.eps_v * vrng.symmetric_vec(3);
        const auto params = sample_params(scn.model, vrng);
        const VecX q = st.q - e;
        const auto dyn =
            rnea(scn.model, params, q, st.v - ed,
                 st.v + scn.controller.Kr.cwiseProduct(e),
                 st.a + scn.controller.Kr.cwiseProduct(ed));
        const Wrench& w = dyn.wrenches.back();
        if (h_sep(w) > 0 || h_slip(w, scn.contact) > 0 ||
            h_tip(w, scn.contact) > 0) {
          ++violations;
        }
        const auto occupancy = fo(scn.model, q);
        for (const auto& link : occupancy) {
          const VecX point = link.sample(vrng);
          for (const auto& obs : scn.obstacles) {
            if (((obs.A * point - obs.b).array() <= 0.0).all()) ++violations;
          }
        }
      }
    }
    const auto params_true = sample_params(scn.model, vrng);
    const auto sim = closed_loop_sim(scn, log, params_true, 1e-3, 0);
    violations += sim.report.violations;
  }

  const double elapsed = seconds_since(t0);
  std::cout << "  trials: 20, goals reached " << goals << ", safe stops "
            << stops << ", violations " << violations << ", " << elapsed
            << " s" << std::endl;
  verdict(7, "twenty random trials verify with zero violations",
          violations == 0 && elapsed < 900.0);
}

TEST_CASE("criterion 8: braking failsafe after a scripted blockage") {
  Scenario scn = load_scenario(kScenarios + "/desk_3dof_scripted.json");
  const PlanLog log = receding_horizon(scn);

  bool pass = log.iterations.size() >= 2 &&
              log.iterations[0].kind == PlanIterationRecord::Kind::feasible &&
              log.iterations[1].kind == PlanIterationRecord::Kind::braking;
  if (pass) {
    const auto& rec = log.iterations[1];
    const auto traj =
        bernstein_from_ic(rec.ic, rec.k, scn.eta1, rec.ic.q, scn.t_fin);
    const auto fin = traj.at(scn.t_fin);
    pass = fin.v.cwiseAbs().maxCoeff() == 0.0 &&
           fin.a.cwiseAbs().maxCoeff() == 0.0;
  }
  verdict(8, "scripted blockage ends with exactly zero desired velocity", pass);
}
