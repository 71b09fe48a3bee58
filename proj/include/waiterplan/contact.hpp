#pragma once

#include "waiterplan/dynamics.hpp"

namespace waiterplan {

/// Contact parameters between the object and the tray surface. When the
/// scenario gives intervals, mu_s and radius hold the lower bounds (the
/// worst case for slip and tip).
struct ContactModel {
  double mu_s = 0.0;            ///< static friction coefficient, lower bound
  double radius = 0.0;          ///< contact patch radius [m], lower bound
  Vec3 normal = Vec3::UnitZ();  ///< surface normal in the contact frame

  void validate() const;
};

/// Separation residual: -f_z. Nonpositive means contact is maintained.
double h_sep(const Wrench& w);

/// Square-root-free slip residual: f_x^2 + f_y^2 - (mu_s f_z)^2.
double h_slip(const Wrench& w, const ContactModel& cm);

/// Square-root-free tip residual: |n x n_c|^2 - r^2 (n . f_c)^2.
double h_tip(const Wrench& w, const ContactModel& cm);

/// Zero-moment point, xy in the contact frame. Diagnostic only; throws when
/// the normal force component vanishes.
Eigen::Vector2d zmp_point(const Wrench& w, const ContactModel& cm);

struct ContactResidualPz {
  PolyZonotope sep{1, 1};
  PolyZonotope slip{1, 1};
  PolyZonotope tip{1, 1};
};

/// Residual PZs from the object-joint wrench PZs (contact frame).
ContactResidualPz pz_contact_constraints(const PolyZonotope& force,
                                         const PolyZonotope& moment,
                                         const ContactModel& cm);

}  // namespace waiterplan
