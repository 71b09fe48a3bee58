#include "waiterplan/kinematics.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>

namespace waiterplan {

Mat3 JointModel::rotation_at(double q) const {
  if (kind == Kind::fixed) return rotation;
  return Eigen::AngleAxisd(q, axis).toRotationMatrix();
}

int ExtendedArmModel::n_actuated() const {
  int n = 0;
  for (const auto& j : joints) {
    if (j.kind == JointModel::Kind::revolute) ++n;
  }
  return n;
}

void ExtendedArmModel::validate() const {
  if (joints.empty()) throw std::invalid_argument("arm model: no joints");
  if (nominal.size() != joints.size() || interval.size() != joints.size() ||
      link_volumes.size() != joints.size()) {
    throw std::invalid_argument("arm model: per-link array size mismatch");
  }
  for (size_t j = 0; j < joints.size(); ++j) {
    if (joints[j].kind == JointModel::Kind::revolute &&
        std::abs(joints[j].axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("arm model: revolute axis must be unit");
    }
    if (joints[j].kind == JointModel::Kind::fixed) {
      const Mat3 err = joints[j].rotation.transpose() * joints[j].rotation -
                       Mat3::Identity();
      if (err.cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("arm model: fixed joint rotation not orthonormal");
      }
    }
    const auto& nom = nominal[j];
    const auto& iv = interval[j];
    if (!iv.mass.contains(MatX::Constant(1, 1, nom.mass), 1e-12) ||
        !iv.com.contains(MatX(nom.com), 1e-12) ||
        !iv.inertia.contains(MatX(nom.inertia), 1e-12)) {
      throw std::invalid_argument(
          "arm model: nominal parameters outside their intervals (link " +
          std::to_string(j) + ")");
    }
  }
  const int n_q = n_actuated();
  if (q_lo.size() != n_q || q_hi.size() != n_q) {
    throw std::invalid_argument("arm model: joint limit dimension mismatch");
  }
  // Materialize the volume PZs now; later reads may happen concurrently.
  link_volume_pzs();
}

const std::vector<PolyZonotope>& ExtendedArmModel::link_volume_pzs() const {
  if (volume_pzs_.empty() && !link_volumes.empty()) {
    FreshVars::Scope scope(FreshVars::kModelStream);
    volume_pzs_.reserve(link_volumes.size());
    for (const auto& z : link_volumes) {
      volume_pzs_.push_back(PolyZonotope::from_zonotope(z));
    }
  }
  return volume_pzs_;
}

std::vector<FramePose> fk(const ExtendedArmModel& model, const VecX& q) {
  if (q.size() != model.n_actuated()) {
    throw std::invalid_argument("fk: q dimension mismatch");
  }
  std::vector<FramePose> out(model.joints.size());
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();
  Eigen::Index qi = 0;
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const auto& joint = model.joints[j];
    const double qj =
        joint.kind == JointModel::Kind::revolute ? q[qi++] : 0.0;
    p = p + R * joint.offset;
    R = R * joint.rotation_at(qj);
    out[j] = {R, p};
  }
  return out;
}

std::pair<PolyZonotope, PolyZonotope> pz_trig(const PolyZonotope& q_pz,
                                              int degree) {
  return {PolyZonotope::sin(q_pz, degree), PolyZonotope::cos(q_pz, degree)};
}

PolyZonotope joint_rotation_pz(const JointModel& joint,
                               const PolyZonotope& q_pz, int max_terms) {
  if (joint.kind == JointModel::Kind::fixed) {
    return PolyZonotope::constant(MatX(joint.rotation));
  }
  const Mat3 K = (Mat3() << 0, -joint.axis.z(), joint.axis.y(),
                  joint.axis.z(), 0, -joint.axis.x(),
                  -joint.axis.y(), joint.axis.x(), 0).finished();
  auto [s, c] = pz_trig(q_pz);
  PolyZonotope R = PolyZonotope::constant(MatX(Mat3::Identity())) +
                   s * PolyZonotope::constant(MatX(K)) +
                   (PolyZonotope(1.0) - c) * PolyZonotope::constant(MatX(K * K));
  return R.reduce(max_terms);
}

std::vector<FramePosePz> pzfk(const ExtendedArmModel& model,
                              const std::vector<PolyZonotope>& q_pzs,
                              int max_terms) {
  if (static_cast<int>(q_pzs.size()) != model.n_actuated()) {
    throw std::invalid_argument("pzfk: one PZ per actuated joint required");
  }
  std::vector<FramePosePz> out(model.joints.size());
  PolyZonotope R = PolyZonotope::constant(MatX(Mat3::Identity()));
  PolyZonotope p = PolyZonotope::constant(MatX(Vec3::Zero()));
  size_t qi = 0;
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const auto& joint = model.joints[j];
    PolyZonotope Rj =
        joint.kind == JointModel::Kind::revolute
            ? joint_rotation_pz(joint, q_pzs[qi++], max_terms)
            : PolyZonotope::constant(MatX(joint.rotation));
    p = (p + R * PolyZonotope::constant(MatX(joint.offset))).reduce(max_terms);
    R = (R * Rj).reduce(max_terms);
    out[j] = {R, p};
  }
  return out;
}

std::vector<Zonotope> fo(const ExtendedArmModel& model, const VecX& q) {
  const auto poses = fk(model, q);
  std::vector<Zonotope> out;
  out.reserve(poses.size());
  for (size_t j = 0; j < poses.size(); ++j) {
    const auto& L = model.link_volumes[j];
    out.emplace_back(poses[j].p + poses[j].R * L.center(),
                     poses[j].R * L.generators());
  }
  return out;
}

std::vector<PolyZonotope> pzfo(const ExtendedArmModel& model,
                               const std::vector<FramePosePz>& poses) {
  const auto& volumes = model.link_volume_pzs();
  std::vector<PolyZonotope> out;
  out.reserve(poses.size());
  for (size_t j = 0; j < poses.size(); ++j) {
    out.push_back(poses[j].p + poses[j].R * volumes[j]);
  }
  return out;
}

std::vector<PolyZonotope> pzfo(const ExtendedArmModel& model,
                               const std::vector<PolyZonotope>& q_pzs,
                               int max_terms) {
  return pzfo(model, pzfk(model, q_pzs, max_terms));
}

Obstacle obstacle_halfspaces(const Zonotope& z) {
  if (z.dim() != 3) {
    throw std::invalid_argument("obstacle_halfspaces: 3-D zonotopes only");
  }
  Obstacle out;
  MatX gens = z.generators();

  // Facet normals of a 3-D zonotope are cross products of generator pairs.
  std::vector<Vec3> normals;
  auto collect = [&](const MatX& g) {
    normals.clear();
    for (Eigen::Index i = 0; i < g.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < g.cols(); ++j) {
        Vec3 n = Vec3(g.col(i)).cross(Vec3(g.col(j)));
        const double len = n.norm();
        if (len < 1e-12) continue;
        n /= len;
        bool dup = false;
        for (const auto& m : normals) {
          if ((m - n).norm() < 1e-9 || (m + n).norm() < 1e-9) {
            dup = true;
            break;
          }
        }
        if (!dup) normals.push_back(n);
      }
    }
  };
  collect(gens);
  if (normals.size() < 3) {
    // Flat or lower-dimensional volume: fatten per axis so the H-rep exists.
    MatX fat(3, gens.cols() + 3);
    fat.leftCols(gens.cols()) = gens;
    fat.rightCols(3) = 1e-9 * Mat3::Identity();
    gens = fat;
    out.inflated = true;
    collect(gens);
  }

  out.volume = Zonotope(z.center(), gens);
  out.A.resize(2 * static_cast<Eigen::Index>(normals.size()), 3);
  out.b.resize(2 * static_cast<Eigen::Index>(normals.size()));
  for (size_t i = 0; i < normals.size(); ++i) {
    const Vec3& n = normals[i];
    double spread = 0.0;
    for (Eigen::Index g = 0; g < gens.cols(); ++g) {
      spread += std::abs(n.dot(gens.col(g)));
    }
    const double cn = n.dot(z.center());
    const auto r = static_cast<Eigen::Index>(2 * i);
    out.A.row(r) = n.transpose();
    out.b[r] = cn + spread;
    out.A.row(r + 1) = -n.transpose();
    out.b[r + 1] = -cn + spread;
  }
  return out;
}

}  // namespace waiterplan
