#include "waiterplan/verify.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "waiterplan/rng.hpp"

namespace waiterplan {

namespace {

void note_violation(VerificationReport* report, long sample, double margin,
                    const std::string& what) {
  ++report->violations;
  if (report->notes.size() < 32) {
    std::ostringstream os;
    os << "sample " << sample << ": " << what << " margin " << margin;
    report->notes.push_back(os.str());
  }
}

void check(VerificationReport* report, long sample, const PolyZonotope& set,
           const MatX& point, const Assignment& assignment, double slack,
           const char* what) {
  const double margin = set.containment_margin(point, assignment);
  report->worst_margin = std::max(report->worst_margin, margin);
  if (margin > slack) note_violation(report, sample, margin, what);
}

}  // namespace

VerificationReport containment_audit(const Scenario& scn, int n_samples,
                                     uint64_t seed, double slack) {
  const InitialCondition ic = InitialCondition::rest(scn.q_start);
  return containment_audit(scn, ic, build_reach_sets(scn, ic), n_samples, seed,
                           slack);
}

VerificationReport containment_audit(const Scenario& scn,
                                     const InitialCondition& ic,
                                     const ReachSets& sets, int n_samples,
                                     uint64_t seed, double slack) {
  if (n_samples < 1) {
    throw std::invalid_argument("containment_audit: n_samples < 1");
  }
  VerificationReport report;
  report.name = "containment";
  report.seed = seed;
  Rng rng(seed);

  const int n_q = scn.model.n_actuated();
  const int n_e = scn.model.n_joints();
  const auto& partition = sets.desired.partition;
  const auto& vol_pzs = scn.model.link_volume_pzs();
  std::vector<std::vector<VarId>> vol_vars(vol_pzs.size());
  for (size_t j = 0; j < vol_pzs.size(); ++j) vol_vars[j] = vol_pzs[j].variables();

  for (long s = 0; s < n_samples; ++s) {
    const int i = rng.uniform_int(partition.n_t);
    const double xt = rng.symmetric();
    const double t = partition.center(i) + partition.radius() * xt;
    const VecX k = rng.symmetric_vec(n_q);
    const VecX xep = rng.symmetric_vec(n_q);
    const VecX xev = rng.symmetric_vec(n_q);
    const auto params = sample_params(scn.model, rng);

    Assignment asg;
    asg.set(time_var(static_cast<uint32_t>(i)), xt);
    for (int j = 0; j < n_q; ++j) {
      asg.set(param_var(static_cast<uint32_t>(j)), k[j]);
      asg.set(pos_error_var(static_cast<uint32_t>(j)), xep[j]);
      asg.set(vel_error_var(static_cast<uint32_t>(j)), xev[j]);
    }
    assign_inertial_coords(scn.model, params, &asg);

    const auto traj = bernstein_from_ic(ic, k, scn.eta1, ic.q, scn.t_fin);
    const auto desired = traj.at(t);
    const VecX e = scn.bounds.eps_p.cwiseProduct(xep);
    const VecX ed = scn.bounds.eps_v * xev;
    const VecX q = desired.q - e;
    const VecX qd = desired.v - ed;
    const VecX qd_aux = desired.v + scn.controller.Kr.cwiseProduct(e);
    const VecX qdd_aux = desired.a + scn.controller.Kr.cwiseProduct(ed);

    for (int j = 0; j < n_q; ++j) {
      const MatX qj = MatX::Constant(1, 1, desired.q[j]);
      check(&report, s, sets.desired.q[i][j], qj, asg, slack, "desired q");
      check(&report, s, sets.desired.qd[i][j],
            MatX::Constant(1, 1, desired.v[j]), asg, slack, "desired qd");
      check(&report, s, sets.desired.qdd[i][j],
            MatX::Constant(1, 1, desired.a[j]), asg, slack, "desired qdd");
      check(&report, s, sets.tracked.q[i][j], MatX::Constant(1, 1, q[j]), asg,
            slack, "tracked q");
      check(&report, s, sets.tracked.qd[i][j], MatX::Constant(1, 1, qd[j]), asg,
            slack, "tracked qd");
      check(&report, s, sets.tracked.qd_aux[i][j],
            MatX::Constant(1, 1, qd_aux[j]), asg, slack, "aux velocity");
      check(&report, s, sets.tracked.qdd_aux[i][j],
            MatX::Constant(1, 1, qdd_aux[j]), asg, slack, "aux acceleration");
    }

    const auto poses = fk(scn.model, q);
    for (int j = 0; j < n_e; ++j) {
      check(&report, s, sets.poses[i][j].R, MatX(poses[j].R), asg, slack,
            "fk rotation");
      check(&report, s, sets.poses[i][j].p, MatX(poses[j].p), asg, slack,
            "fk position");
    }

    // Forward occupancy: sample one point of each link volume.
    for (int j = 0; j < n_e; ++j) {
      const auto& vol = scn.model.link_volumes[j];
      Assignment asg_vol = asg;
      VecX beta = rng.symmetric_vec(static_cast<int>(vol.n_generators()));
      for (size_t g = 0; g < vol_vars[j].size(); ++g) {
        asg_vol.set(vol_vars[j][g], beta[static_cast<Eigen::Index>(g)]);
      }
      const Vec3 point = poses[j].p + poses[j].R * Vec3(vol.at(beta));
      check(&report, s, sets.occupancy[i][j], MatX(point), asg_vol, slack,
            "forward occupancy");
    }

    const auto dyn = rnea(scn.model, params, q, qd, qd_aux, qdd_aux);
    for (int j = 0; j < n_e; ++j) {
      check(&report, s, sets.dynamics[i].wrenches.force[j],
            MatX(dyn.wrenches[j].force), asg, slack, "wrench force");
      check(&report, s, sets.dynamics[i].wrenches.moment[j],
            MatX(dyn.wrenches[j].moment), asg, slack, "wrench moment");
    }

    const Wrench& wc = dyn.wrenches.back();
    check(&report, s, sets.residuals[i].sep, MatX::Constant(1, 1, h_sep(wc)),
          asg, slack, "separation residual");
    check(&report, s, sets.residuals[i].slip,
          MatX::Constant(1, 1, h_slip(wc, scn.contact)), asg, slack,
          "slip residual");
    check(&report, s, sets.residuals[i].tip,
          MatX::Constant(1, 1, h_tip(wc, scn.contact)), asg, slack,
          "tip residual");
    ++report.samples;
  }
  return report;
}

namespace {

struct Segment {
  BernsteinTrajectory traj;
  double t_begin = 0.0;
  double t_end = 0.0;
  bool certified = false;  ///< contact residuals were certified by the solver
  bool hold = false;
  VecX hold_q;
};

std::vector<Segment> executed_segments(const Scenario& scn, const PlanLog& log) {
  std::vector<Segment> out;
  for (const auto& rec : log.iterations) {
    Segment seg;
    switch (rec.kind) {
      case PlanIterationRecord::Kind::feasible:
        seg.traj = bernstein_from_ic(rec.ic, rec.k, scn.eta1, rec.ic.q, scn.t_fin);
        seg.t_begin = 0.0;
        seg.t_end = scn.t_plan;
        seg.certified = true;
        break;
      case PlanIterationRecord::Kind::braking:
        seg.traj = bernstein_from_ic(rec.ic, rec.k, scn.eta1, rec.ic.q, scn.t_fin);
        seg.t_begin = scn.t_plan;
        seg.t_end = scn.t_fin;
        seg.certified = true;
        break;
      case PlanIterationRecord::Kind::hold:
        seg.hold = true;
        seg.hold_q = rec.ic.q;
        seg.t_begin = 0.0;
        seg.t_end = scn.t_plan;
        break;
    }
    out.push_back(std::move(seg));
  }
  return out;
}

DesiredState segment_state(const Segment& seg, double t) {
  if (seg.hold) {
    return {seg.hold_q, VecX::Zero(seg.hold_q.size()),
            VecX::Zero(seg.hold_q.size())};
  }
  const auto st = seg.traj.at(t);
  return {st.q, st.v, st.a};
}

}  // namespace

SimResult closed_loop_sim(const Scenario& scn, const PlanLog& log,
                          const std::vector<LinkParams>& params_true,
                          double dt_sim, uint64_t seed, bool want_csv) {
  if (dt_sim <= 0.0) throw std::invalid_argument("closed_loop_sim: dt_sim <= 0");
  SimResult out;
  out.report.name = "closed-loop";
  out.report.seed = seed;

  const auto segments = executed_segments(scn, log);
  const auto interval_params = lift_params_interval(scn.model);
  const Eigen::Index n_q = scn.q_start.size();

  VecX q = scn.q_start;
  VecX qd = VecX::Zero(n_q);
  std::ostringstream csv;
  if (want_csv) csv << "t,q,qd,e,ed,sep,slip,tip\n";

  double t_global = 0.0;
  long steps = 0;
  for (const auto& seg : segments) {
    const int n_steps =
        static_cast<int>(std::round((seg.t_end - seg.t_begin) / dt_sim));
    // Conditioning check once per segment.
    {
      const MatX M = mass_matrix(scn.model, q, params_true);
      Eigen::SelfAdjointEigenSolver<MatX> eig(M);
      const double lmin = eig.eigenvalues().minCoeff();
      const double lmax = eig.eigenvalues().maxCoeff();
      if (lmin <= 0.0 || lmax / lmin > 1e12) {
        throw std::runtime_error("closed_loop_sim: mass matrix near singular");
      }
    }
    for (int step = 0; step < n_steps; ++step) {
      const double t_local = seg.t_begin + step * dt_sim;
      const DesiredState desired = segment_state(seg, t_local);

      ControlDiagnostics diag;
      const VecX u = control_step(scn.model, scn.controller, {q, qd}, desired,
                                  scn.model.nominal, interval_params, &diag);

      const double pos_err = diag.e.cwiseAbs().maxCoeff();
      const double vel_err = diag.ed.cwiseAbs().maxCoeff();
      out.max_pos_error = std::max(out.max_pos_error, pos_err);
      out.max_vel_error = std::max(out.max_vel_error, vel_err);
      out.max_r_norm = std::max(out.max_r_norm, diag.r.norm());
      if ((diag.e.cwiseAbs().array() > scn.bounds.eps_p.array() + 1e-12).any()) {
        note_violation(&out.report, steps, pos_err, "position error bound");
      }
      if (vel_err > scn.bounds.eps_v + 1e-12) {
        note_violation(&out.report, steps, vel_err, "velocity error bound");
      }

      // Executed dynamics under the true parameters.
      auto accel = [&](const VecX& qq, const VecX& qqd) {
        const MatX M = mass_matrix(scn.model, qq, params_true);
        const VecX bias = bias_torque(scn.model, params_true, qq, qqd);
        return MatX(M).llt().solve(u - bias).eval();
      };

      const VecX qdd_exec = accel(q, qd);
      const auto dyn = rnea(scn.model, params_true, q, qd, qd, qdd_exec);
      const Wrench& wc = dyn.wrenches.back();
      const double sep = h_sep(wc);
      const double slip = h_slip(wc, scn.contact);
      const double tip = h_tip(wc, scn.contact);
      const double worst = std::max(sep, std::max(slip, tip));
      out.max_contact_residual = std::max(out.max_contact_residual, worst);
      if (seg.certified && worst > 0.0) {
        note_violation(&out.report, steps, worst, "contact residual");
      }

      if (want_csv) {
        csv << t_global << ',' << q.transpose().format(Eigen::IOFormat(
                   Eigen::FullPrecision, Eigen::DontAlignCols, ";", ";"))
            << ',' << qd.norm() << ',' << pos_err << ',' << vel_err << ','
            << sep << ',' << slip << ',' << tip << "\n";
      }

      // RK4 with the control input held over the step.
      const VecX k1q = qd, k1v = qdd_exec;
      const VecX k2q = qd + 0.5 * dt_sim * k1v;
      const VecX k2v = accel(q + 0.5 * dt_sim * k1q, qd + 0.5 * dt_sim * k1v);
      const VecX k3q = qd + 0.5 * dt_sim * k2v;
      const VecX k3v = accel(q + 0.5 * dt_sim * k2q, qd + 0.5 * dt_sim * k2v);
      const VecX k4q = qd + dt_sim * k3v;
      const VecX k4v = accel(q + dt_sim * k3q, qd + dt_sim * k3v);
      q += dt_sim / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
      qd += dt_sim / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

      t_global += dt_sim;
      ++steps;
      ++out.report.samples;
    }
  }
  out.duration = t_global;
  if (want_csv) out.csv = csv.str();
  return out;
}

std::string audit_report(const std::vector<VerificationReport>& reports) {
  std::ostringstream os;
  long total_violations = 0;
  for (const auto& r : reports) {
    os << r.name << ": samples=" << r.samples << " violations=" << r.violations
       << " worst_margin=" << r.worst_margin << " seed=" << r.seed << "\n";
    for (const auto& note : r.notes) os << "  " << note << "\n";
    total_violations += r.violations;
  }
  if (!reports.empty()) {
    os << "total: " << total_violations << " violation"
       << (total_violations == 1 ? "" : "s") << "\n";
  }
  return os.str();
}

}  // namespace waiterplan
