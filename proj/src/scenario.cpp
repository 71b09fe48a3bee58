#include "waiterplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace waiterplan {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError("scenario " + where + ": " + what);
}

VecX parse_vec(const json& j, const std::string& where, Eigen::Index expect = -1) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  VecX out(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where, "expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = j[i];
  }
  if (expect >= 0 && out.size() != expect) {
    fail(where, "expected " + std::to_string(expect) + " entries, got " +
                    std::to_string(out.size()));
  }
  return out;
}

Vec3 parse_vec3(const json& j, const std::string& where) {
  return Vec3(parse_vec(j, where, 3));
}

Mat3 parse_mat3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected a 3x3 matrix");
  Mat3 out;
  for (int r = 0; r < 3; ++r) out.row(r) = parse_vec3(j[r], where).transpose();
  return out;
}

Zonotope parse_zonotope(const json& j, const std::string& where) {
  const Vec3 center = parse_vec3(j.at("center"), where + ".center");
  MatX gens(3, 0);
  if (j.contains("generators")) {
    const auto& g = j["generators"];
    if (!g.is_array()) fail(where + ".generators", "expected an array");
    gens.resize(3, static_cast<Eigen::Index>(g.size()));
    for (size_t i = 0; i < g.size(); ++i) {
      gens.col(static_cast<Eigen::Index>(i)) =
          parse_vec3(g[i], where + ".generators");
    }
  }
  return Zonotope(center, gens);
}

// Scalar with optional [lo, hi] uncertainty: 0.5 or [0.4, 0.6].
Interval parse_scalar_interval(const json& j, const std::string& where) {
  if (j.is_number()) return Interval(j.get<double>(), j.get<double>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    const double lo = j[0], hi = j[1];
    if (lo > hi) fail(where, "interval lower bound exceeds upper bound");
    return Interval(lo, hi);
  }
  fail(where, "expected a number or [lo, hi]");
}

// "mass": {"nominal": 1.0, "interval": [0.9, 1.1]}; interval optional.
void parse_mass(const json& j, const std::string& where, double* nominal,
                Interval* interval) {
  *nominal = j.at("nominal");
  *interval = j.contains("interval")
                  ? parse_scalar_interval(j["interval"], where + ".interval")
                  : Interval(*nominal, *nominal);
}

void parse_com(const json& j, const std::string& where, Vec3* nominal,
               Interval* interval) {
  *nominal = parse_vec3(j.at("nominal"), where + ".nominal");
  if (j.contains("interval")) {
    const auto& iv = j["interval"];
    if (!iv.is_array() || iv.size() != 3) {
      fail(where + ".interval", "expected three [lo, hi] pairs");
    }
    MatX lo(3, 1), hi(3, 1);
    for (int d = 0; d < 3; ++d) {
      const Interval one = parse_scalar_interval(iv[d], where + ".interval");
      lo(d, 0) = one.lo_scalar();
      hi(d, 0) = one.hi_scalar();
    }
    *interval = Interval(lo, hi);
  } else {
    *interval = Interval::point(MatX(*nominal));
  }
}

// Inertia given as the six distinct entries [Ixx, Ixy, Ixz, Iyy, Iyz, Izz].
Mat3 six_to_mat(const VecX& v) {
  Mat3 out;
  out << v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5];
  return out;
}

void parse_inertia(const json& j, const std::string& where, Mat3* nominal,
                   Interval* interval) {
  *nominal = six_to_mat(parse_vec(j.at("nominal"), where + ".nominal", 6));
  if (j.contains("interval")) {
    const auto& iv = j["interval"];
    if (!iv.is_array() || iv.size() != 6) {
      fail(where + ".interval", "expected six [lo, hi] pairs");
    }
    VecX lo6(6), hi6(6);
    for (int d = 0; d < 6; ++d) {
      const Interval one = parse_scalar_interval(iv[d], where + ".interval");
      lo6[d] = one.lo_scalar();
      hi6[d] = one.hi_scalar();
    }
    *interval = Interval(MatX(six_to_mat(lo6)), MatX(six_to_mat(hi6)));
  } else {
    *interval = Interval::point(MatX(*nominal));
  }
}

void parse_link_params(const json& j, const std::string& where,
                       LinkParams* nominal, LinkParamsInterval* interval) {
  parse_mass(j.at("mass"), where + ".mass", &nominal->mass, &interval->mass);
  parse_com(j.at("com"), where + ".com", &nominal->com, &interval->com);
  parse_inertia(j.at("inertia"), where + ".inertia", &nominal->inertia,
                &interval->inertia);
}

std::pair<int, int> line_of_offset(const std::string& text, size_t offset) {
  int line = 1, col = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Scenario load_scenario_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    const auto [line, col] = line_of_offset(text, err.byte);
    throw ScenarioError(origin + ":" + std::to_string(line) + ":" +
                        std::to_string(col) + ": " + err.what());
  }

  try {
    if (j.value("version", 0) != 1) fail("version", "expected version 1");
    Scenario scn;

    const auto& robot = j.at("robot");
    const auto& joints = robot.at("joints");
    const auto& links = robot.at("links");
    if (!joints.is_array() || joints.empty()) fail("robot.joints", "expected a nonempty array");
    if (links.size() != joints.size()) {
      fail("robot.links", "one link per joint required");
    }

    for (size_t i = 0; i < joints.size(); ++i) {
      const std::string where = "robot.joints[" + std::to_string(i) + "]";
      const auto& joint_json = joints[i];
      JointModel joint;
      const std::string kind = joint_json.value("kind", "revolute");
      if (kind == "revolute") {
        joint.kind = JointModel::Kind::revolute;
        joint.axis = parse_vec3(joint_json.at("axis"), where + ".axis");
      } else if (kind == "fixed") {
        joint.kind = JointModel::Kind::fixed;
        if (joint_json.contains("rotation")) {
          joint.rotation = parse_mat3(joint_json["rotation"], where + ".rotation");
        }
      } else {
        fail(where + ".kind", "expected \"revolute\" or \"fixed\"");
      }
      joint.offset = parse_vec3(joint_json.at("offset"), where + ".offset");
      scn.model.joints.push_back(joint);

      const std::string lwhere = "robot.links[" + std::to_string(i) + "]";
      LinkParams nominal;
      LinkParamsInterval interval;
      parse_link_params(links[i], lwhere, &nominal, &interval);
      scn.model.nominal.push_back(nominal);
      scn.model.interval.push_back(interval);
      scn.model.link_volumes.push_back(
          parse_zonotope(links[i].at("volume"), lwhere + ".volume"));
    }

    // Object: fixed joint at the contact point, last link of the chain.
    const auto& object = j.at("object");
    {
      JointModel joint;
      joint.kind = JointModel::Kind::fixed;
      joint.offset = parse_vec3(object.at("joint").at("offset"),
                                "object.joint.offset");
      if (object.at("joint").contains("rotation")) {
        joint.rotation =
            parse_mat3(object["joint"]["rotation"], "object.joint.rotation");
      }
      scn.model.joints.push_back(joint);
      LinkParams nominal;
      LinkParamsInterval interval;
      parse_link_params(object, "object", &nominal, &interval);
      scn.model.nominal.push_back(nominal);
      scn.model.interval.push_back(interval);
      scn.model.link_volumes.push_back(
          parse_zonotope(object.at("volume"), "object.volume"));
    }

    const auto& contact = object.at("contact");
    scn.contact.mu_s =
        parse_scalar_interval(contact.at("mu_s"), "object.contact.mu_s")
            .lo_scalar();
    scn.contact.radius =
        parse_scalar_interval(contact.at("radius"), "object.contact.radius")
            .lo_scalar();
    if (contact.contains("normal")) {
      scn.contact.normal = parse_vec3(contact["normal"], "object.contact.normal");
    }

    const int n_q = scn.model.n_actuated();
    if (robot.contains("position_limits")) {
      const auto& lim = robot["position_limits"];
      if (!lim.is_array() || static_cast<int>(lim.size()) != n_q) {
        fail("robot.position_limits", "one [lo, hi] pair per actuated joint");
      }
      scn.model.q_lo.resize(n_q);
      scn.model.q_hi.resize(n_q);
      for (int i = 0; i < n_q; ++i) {
        const Interval one =
            parse_scalar_interval(lim[i], "robot.position_limits");
        scn.model.q_lo[i] = one.lo_scalar();
        scn.model.q_hi[i] = one.hi_scalar();
      }
    } else {
      scn.model.q_lo = VecX::Constant(n_q, -M_PI);
      scn.model.q_hi = VecX::Constant(n_q, M_PI);
    }
    if (robot.contains("velocity_limits")) {
      const auto& lim = robot["velocity_limits"];
      if (!lim.is_array() || static_cast<int>(lim.size()) != n_q) {
        fail("robot.velocity_limits", "one [lo, hi] pair per actuated joint");
      }
      scn.model.qd_lo.resize(n_q);
      scn.model.qd_hi.resize(n_q);
      for (int i = 0; i < n_q; ++i) {
        const Interval one =
            parse_scalar_interval(lim[i], "robot.velocity_limits");
        scn.model.qd_lo[i] = one.lo_scalar();
        scn.model.qd_hi[i] = one.hi_scalar();
      }
    } else {
      scn.model.qd_lo = VecX::Constant(n_q, -2.0);
      scn.model.qd_hi = VecX::Constant(n_q, 2.0);
    }

    if (j.contains("obstacles")) {
      for (size_t i = 0; i < j["obstacles"].size(); ++i) {
        const std::string where = "obstacles[" + std::to_string(i) + "]";
        Obstacle obs = obstacle_halfspaces(parse_zonotope(j["obstacles"][i], where));
        obs.name = j["obstacles"][i].value("name", where);
        scn.obstacles.push_back(std::move(obs));
      }
    }

    scn.q_start = parse_vec(j.at("start"), "start", n_q);
    scn.q_goal = parse_vec(j.at("goal"), "goal", n_q);

    const auto& partition = j.at("partition");
    scn.dt = partition.value("dt", 0.05);
    scn.t_plan = partition.value("t_plan", 1.0);
    scn.t_fin = partition.value("t_fin", 2.0);

    scn.eta1 = parse_vec(j.at("trajectory").at("eta1"), "trajectory.eta1", n_q);

    const auto& ctrl = j.at("controller");
    if (ctrl.at("K_r").is_number()) {
      scn.controller.Kr = VecX::Constant(n_q, ctrl["K_r"].get<double>());
    } else {
      scn.controller.Kr = parse_vec(ctrl["K_r"], "controller.K_r", n_q);
    }
    scn.controller.V_M = ctrl.at("V_M");
    scn.controller.alpha_c = ctrl.value("alpha_c", 1.0);
    const int sigma_samples = ctrl.value("sigma_samples", 2000);
    const uint64_t sigma_seed = ctrl.value("sigma_seed", 12345ULL);
    const auto sigma_field = [&](const char* key, bool is_min) {
      if (!ctrl.contains(key) || ctrl[key].is_string()) {
        if (ctrl.contains(key) && ctrl[key].get<std::string>() != "estimate") {
          fail(std::string("controller.") + key, "expected a number or \"estimate\"");
        }
        return is_min ? estimate_sigma_m(scn.model, sigma_samples, sigma_seed)
                      : 1.5 * estimate_sigma_max(scn.model, sigma_samples,
                                                 sigma_seed);
      }
      return ctrl[key].get<double>();
    };
    scn.controller.sigma_m = sigma_field("sigma_m", true);
    scn.controller.sigma_M = sigma_field("sigma_M", false);
    scn.bounds = tracking_bounds(scn.controller);

    if (j.contains("solver")) {
      const auto& solver = j["solver"];
      scn.solver.seed = solver.value("seed", 0ULL);
      scn.solver.max_inner = solver.value("max_inner", scn.solver.max_inner);
      scn.solver.max_outer = solver.value("max_outer", scn.solver.max_outer);
      scn.solver.penalty0 = solver.value("penalty0", scn.solver.penalty0);
      scn.solver.penalty_scale =
          solver.value("penalty_scale", scn.solver.penalty_scale);
      scn.solver.multistarts = solver.value("multistarts", scn.solver.multistarts);
    }
    if (j.contains("planner")) {
      const auto& planner = j["planner"];
      scn.planner.goal_tol = planner.value("goal_tol", scn.planner.goal_tol);
      scn.planner.max_iterations =
          planner.value("max_iterations", scn.planner.max_iterations);
      scn.planner.hlp_step = planner.value("hlp_step", scn.planner.hlp_step);
    }
    if (j.contains("verify")) {
      scn.verify_samples = j["verify"].value("samples", scn.verify_samples);
    }
    if (j.contains("script")) {
      for (size_t i = 0; i < j["script"].size(); ++i) {
        const std::string where = "script[" + std::to_string(i) + "]";
        const auto& event = j["script"][i];
        ScriptEvent se;
        se.at_iteration = event.at("at_iteration");
        se.add_obstacle = parse_zonotope(event.at("obstacle"), where + ".obstacle");
        se.name = event.value("name", where);
        scn.script.push_back(std::move(se));
      }
    }

    scn.validate();
    return scn;
  } catch (const ScenarioError&) {
    throw;
  } catch (const json::exception& err) {
    throw ScenarioError(origin + ": " + err.what());
  } catch (const std::exception& err) {
    throw ScenarioError(origin + ": " + err.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ScenarioError("cannot open scenario file " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return load_scenario_text(buffer.str(), path);
}

}  // namespace waiterplan
