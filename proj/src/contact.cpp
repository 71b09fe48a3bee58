#include "waiterplan/contact.hpp"

#include <cmath>
#include <stdexcept>

namespace waiterplan {

void ContactModel::validate() const {
  if (!(mu_s > 0.0)) throw std::invalid_argument("contact: mu_s must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("contact: radius must be positive");
  if (std::abs(normal.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("contact: normal must be unit length");
  }
}

// The contact frame has the surface normal as its z-axis, so the normal
// force is the z component of the contact wrench.
double h_sep(const Wrench& w) { return -w.force.z(); }

double h_slip(const Wrench& w, const ContactModel& cm) {
  const double fz = cm.normal.dot(w.force);
  const Vec3 tangential = w.force - fz * cm.normal;
  return tangential.squaredNorm() - cm.mu_s * cm.mu_s * fz * fz;
}

double h_tip(const Wrench& w, const ContactModel& cm) {
  const Vec3 lever = cm.normal.cross(w.moment);
  const double fn = cm.normal.dot(w.force);
  return lever.squaredNorm() - cm.radius * cm.radius * fn * fn;
}

Eigen::Vector2d zmp_point(const Wrench& w, const ContactModel& cm) {
  const double fn = cm.normal.dot(w.force);
  if (std::abs(fn) < 1e-12) {
    throw std::runtime_error("zmp_point: normal force is zero, ZMP undefined");
  }
  const Vec3 p = cm.normal.cross(w.moment) / fn;
  return {p.x(), p.y()};
}

ContactResidualPz pz_contact_constraints(const PolyZonotope& force,
                                         const PolyZonotope& moment,
                                         const ContactModel& cm) {
  if (force.rows() != 3 || force.cols() != 1 || moment.rows() != 3 ||
      moment.cols() != 1) {
    throw std::invalid_argument("pz_contact_constraints: 3-vector wrench required");
  }
  const PolyZonotope n = PolyZonotope::constant(MatX(cm.normal));
  ContactResidualPz out;

  const PolyZonotope fn = PolyZonotope::dot(n, force);
  out.sep = -fn;

  // Tangential components relative to the normal.
  const PolyZonotope tangential = force - fn * n;
  out.slip = PolyZonotope::dot(tangential, tangential) -
             (cm.mu_s * cm.mu_s) * (fn * fn);

  const PolyZonotope lever = PolyZonotope::cross(n, moment);
  out.tip = PolyZonotope::dot(lever, lever) -
            (cm.radius * cm.radius) * (fn * fn);
  return out;
}

}  // namespace waiterplan
