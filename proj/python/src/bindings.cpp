#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "waiterplan/scenario.hpp"
#include "waiterplan/verify.hpp"

namespace py = pybind11;
using namespace waiterplan;

namespace {

Assignment dict_to_assignment(const py::dict& d) {
  Assignment asg;
  for (const auto& item : d) {
    const auto key = item.first.cast<std::pair<int, uint32_t>>();
    asg.set({static_cast<VarTag>(key.first), key.second},
            item.second.cast<double>());
  }
  return asg;
}

Wrench make_wrench(const Vec3& force, const Vec3& moment) {
  Wrench w;
  w.force = force;
  w.moment = moment;
  return w;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Set-based tray-carrying trajectory planner";

  py::enum_<VarTag>(m, "VarTag")
      .value("time", VarTag::time)
      .value("parameter", VarTag::parameter)
      .value("pos_error", VarTag::pos_error)
      .value("vel_error", VarTag::vel_error)
      .value("remainder", VarTag::remainder)
      .value("inertial", VarTag::inertial);

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>())
      .def_property_readonly("lo", [](const Interval& i) { return i.lo(); })
      .def_property_readonly("hi", [](const Interval& i) { return i.hi(); })
      .def("contains",
           [](const Interval& i, const MatX& v) { return i.contains(v, 0.0); });

  py::class_<PolyZonotope>(m, "PolyZonotope")
      .def(py::init<double>())
      .def_static("constant",
                  [](const MatX& c) { return PolyZonotope::constant(c); })
      .def_static("scalar_var",
                  [](double center, double radius, int tag, uint32_t index) {
                    return PolyZonotope::scalar_var(
                        center, radius, {static_cast<VarTag>(tag), index});
                  })
      .def_property_readonly("n_terms", &PolyZonotope::n_terms)
      .def_property_readonly("shape",
                             [](const PolyZonotope& p) {
                               return std::make_pair(p.rows(), p.cols());
                             })
      .def("center", &PolyZonotope::center)
      .def("bounds",
           [](const PolyZonotope& p) {
             const Interval b = p.bounds();
             return std::make_pair(b.lo(), b.hi());
           })
      .def("__add__",
           [](const PolyZonotope& a, const PolyZonotope& b) { return a + b; })
      .def("__sub__",
           [](const PolyZonotope& a, const PolyZonotope& b) { return a - b; })
      .def("__matmul__",
           [](const PolyZonotope& a, const PolyZonotope& b) { return a * b; })
      .def("__mul__", [](const PolyZonotope& a, double s) { return s * a; })
      .def("slice",
           [](const PolyZonotope& p, int tag, uint32_t index, double sigma) {
             return p.slice({static_cast<VarTag>(tag), index}, sigma);
           })
      .def("reduce", &PolyZonotope::reduce, py::arg("max_terms") = kDefaultMaxTerms)
      .def("evaluate",
           [](const PolyZonotope& p, const py::dict& assignment) {
             return p.evaluate(dict_to_assignment(assignment));
           })
      .def("contains",
           [](const PolyZonotope& p, const MatX& point, const py::dict& asg,
              double tol) {
             return p.contains(point, dict_to_assignment(asg), tol);
           },
           py::arg("point"), py::arg("assignment"), py::arg("tol") = 1e-9)
      .def("differentiate",
           [](const PolyZonotope& p, int tag, uint32_t index) {
             return p.differentiate({static_cast<VarTag>(tag), index});
           })
      .def_static("sin", &PolyZonotope::sin, py::arg("p"),
                  py::arg("degree") = kDefaultTaylorDegree,
                  py::arg("max_terms") = kDefaultMaxTerms)
      .def_static("cos", &PolyZonotope::cos, py::arg("p"),
                  py::arg("degree") = kDefaultTaylorDegree,
                  py::arg("max_terms") = kDefaultMaxTerms)
      .def_static("cross", &PolyZonotope::cross);

  py::class_<ControllerConfig>(m, "ControllerConfig")
      .def(py::init([](const VecX& Kr, double V_M, double alpha_c,
                       double sigma_m, double sigma_M) {
             ControllerConfig cfg;
             cfg.Kr = Kr;
             cfg.V_M = V_M;
             cfg.alpha_c = alpha_c;
             cfg.sigma_m = sigma_m;
             cfg.sigma_M = sigma_M;
             return cfg;
           }),
           py::arg("Kr"), py::arg("V_M"), py::arg("alpha_c") = 1.0,
           py::arg("sigma_m") = 1.0, py::arg("sigma_M") = 1.0);

  m.def("tracking_bounds", [](const ControllerConfig& cfg) {
    const TrackingBounds b = tracking_bounds(cfg);
    return py::make_tuple(b.eps, b.eps_p, b.eps_v);
  });

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("n_joints",
                             [](const Scenario& s) { return s.model.n_actuated(); })
      .def_readonly("q_start", &Scenario::q_start)
      .def_readonly("q_goal", &Scenario::q_goal)
      .def_readonly("eta1", &Scenario::eta1)
      .def_property_readonly("eps_p",
                             [](const Scenario& s) { return s.bounds.eps_p; })
      .def_property_readonly("sigma_m",
                             [](const Scenario& s) { return s.controller.sigma_m; });

  m.def("load_scenario", &load_scenario, py::arg("path"));

  m.def("rnea",
        [](const Scenario& scn, const VecX& q, const VecX& qd,
           const VecX& qd_aux, const VecX& qdd_aux, bool gravity) {
          RneaOptions opts;
          opts.gravity = gravity;
          const auto res = rnea(scn.model, q, qd, qd_aux, qdd_aux, opts);
          return py::make_tuple(res.tau, res.wrenches.back().force,
                                res.wrenches.back().moment);
        },
        py::arg("scenario"), py::arg("q"), py::arg("qd"), py::arg("qd_aux"),
        py::arg("qdd_aux"), py::arg("gravity") = true);

  m.def("mass_matrix", [](const Scenario& scn, const VecX& q) {
    return mass_matrix(scn.model, q);
  });

  m.def("contact_residuals",
        [](const Scenario& scn, const Vec3& force, const Vec3& moment) {
          const Wrench w = make_wrench(force, moment);
          return py::make_tuple(h_sep(w), h_slip(w, scn.contact),
                                h_tip(w, scn.contact));
        });

  py::class_<PlanLog>(m, "PlanLog")
      .def_property_readonly("outcome",
                             [](const PlanLog& log) {
                               switch (log.outcome) {
                                 case PlanLog::Outcome::goal_reached:
                                   return "goal_reached";
                                 case PlanLog::Outcome::safe_stop:
                                   return "safe_stop";
                                 default:
                                   return "iteration_cap";
                               }
                             })
      .def_property_readonly("n_iterations",
                             [](const PlanLog& log) {
                               return log.iterations.size();
                             })
      .def_readonly("final_q", &PlanLog::final_q)
      .def("to_json", &plan_log_to_json);

  m.def("plan",
        [](const Scenario& scn, std::optional<uint64_t> seed,
           std::optional<int> max_iterations) {
          Scenario copy = scn;
          if (seed) copy.solver.seed = *seed;
          if (max_iterations) copy.planner.max_iterations = *max_iterations;
          return receding_horizon(copy);
        },
        py::arg("scenario"), py::arg("seed") = std::nullopt,
        py::arg("max_iterations") = std::nullopt);

  m.def("containment_audit",
        [](const Scenario& scn, int n_samples, uint64_t seed) {
          const auto report = containment_audit(scn, n_samples, seed);
          py::dict out;
          out["samples"] = report.samples;
          out["violations"] = report.violations;
          out["worst_margin"] = report.worst_margin;
          return out;
        },
        py::arg("scenario"), py::arg("n_samples"), py::arg("seed") = 0);
}
