#include "waiterplan/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace waiterplan {

InitialCondition InitialCondition::rest(const VecX& q0) {
  return {q0, VecX::Zero(q0.size()), VecX::Zero(q0.size())};
}

PolyZonotope TimePartition::interval_pz(int i) const {
  if (i < 0 || i >= n_t) throw std::invalid_argument("time interval out of range");
  return PolyZonotope::scalar_var(center(i), radius(),
                                  time_var(static_cast<uint32_t>(i)));
}

TimePartition time_partition(double dt, double t_fin, double t_plan) {
  if (dt <= 0.0 || t_fin <= 0.0) {
    throw std::invalid_argument("time partition: dt and t_fin must be positive");
  }
  const double ratio = t_fin / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("time partition: t_fin / dt must be integral");
  }
  if (!(t_plan > 0.0) || !(t_plan < t_fin)) {
    throw std::invalid_argument("time partition: need 0 < t_plan < t_fin");
  }
  TimePartition p;
  p.dt = dt;
  p.t_fin = t_fin;
  p.t_plan = t_plan;
  p.n_t = static_cast<int>(rounded);
  return p;
}

namespace {

// Degree-n Bernstein basis value b_{l,n}(s).
double bernstein_basis(int l, int n, double s) {
  double binom = 1.0;
  for (int i = 0; i < l; ++i) binom = binom * (n - i) / (i + 1);
  return binom * std::pow(s, l) * std::pow(1.0 - s, n - l);
}

}  // namespace

BernsteinTrajectory::BernsteinTrajectory(MatX coefficients, double t_fin)
    : beta_(std::move(coefficients)), t_fin_(t_fin) {
  if (beta_.cols() != 6) {
    throw std::invalid_argument("bernstein trajectory: 6 coefficients per joint");
  }
  if (t_fin_ <= 0.0) {
    throw std::invalid_argument("bernstein trajectory: horizon must be positive");
  }
}

BernsteinTrajectory::State BernsteinTrajectory::at(double t) const {
  if (t < -1e-12 || t > t_fin_ + 1e-12) {
    throw std::domain_error("bernstein trajectory: t outside [0, t_fin]");
  }
  const double s = std::min(std::max(t / t_fin_, 0.0), 1.0);
  const Eigen::Index n = beta_.rows();
  State out{VecX::Zero(n), VecX::Zero(n), VecX::Zero(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int l = 0; l <= 5; ++l) {
      out.q[j] += beta_(j, l) * bernstein_basis(l, 5, s);
    }
    for (int l = 0; l <= 4; ++l) {
      out.v[j] += 5.0 * (beta_(j, l + 1) - beta_(j, l)) * bernstein_basis(l, 4, s);
    }
    for (int l = 0; l <= 3; ++l) {
      out.a[j] += 20.0 * (beta_(j, l + 2) - 2.0 * beta_(j, l + 1) + beta_(j, l)) *
                  bernstein_basis(l, 3, s);
    }
    out.v[j] /= t_fin_;
    out.a[j] /= t_fin_ * t_fin_;
  }
  return out;
}

BernsteinTrajectory bernstein_from_ic(const InitialCondition& ic, const VecX& k,
                                      const VecX& eta1, const VecX& eta2,
                                      double t_fin) {
  const Eigen::Index n = ic.size();
  if (k.size() != n || eta1.size() != n || eta2.size() != n) {
    throw std::invalid_argument("bernstein_from_ic: dimension mismatch");
  }
  if ((k.cwiseAbs().array() > 1.0 + 1e-12).any()) {
    throw std::domain_error("bernstein_from_ic: k outside [-1,1]");
  }
  MatX beta(n, 6);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double v0 = ic.v[j] * t_fin;          // normalized-horizon slopes
    const double a0 = ic.a[j] * t_fin * t_fin;
    beta(j, 0) = ic.q[j];
    beta(j, 1) = (v0 + 5.0 * beta(j, 0)) / 5.0;
    beta(j, 2) = (a0 + 40.0 * beta(j, 1) - 20.0 * beta(j, 0)) / 20.0;
    beta(j, 5) = eta1[j] * k[j] + eta2[j];
    beta(j, 4) = beta(j, 5);
    beta(j, 3) = (40.0 * beta(j, 4) - 20.0 * beta(j, 5)) / 20.0;
  }
  return BernsteinTrajectory(std::move(beta), t_fin);
}

DesiredTrajectoryPz pz_desired(const InitialCondition& ic, const VecX& eta1,
                               const VecX& eta2,
                               const TimePartition& partition) {
  const Eigen::Index n = ic.size();
  if (eta1.size() != n || eta2.size() != n) {
    throw std::invalid_argument("pz_desired: dimension mismatch");
  }
  DesiredTrajectoryPz out;
  out.partition = partition;
  out.q.resize(partition.n_t);
  out.qd.resize(partition.n_t);
  out.qdd.resize(partition.n_t);

  for (int i = 0; i < partition.n_t; ++i) {
    const PolyZonotope s = (1.0 / partition.t_fin) * partition.interval_pz(i);
    const PolyZonotope one_minus_s = PolyZonotope(1.0) - s;
    // Powers of s and (1-s) up to degree 5; exact polynomial arithmetic.
    std::vector<PolyZonotope> sp(6, PolyZonotope(1.0));
    std::vector<PolyZonotope> cp(6, PolyZonotope(1.0));
    for (int d = 1; d <= 5; ++d) {
      sp[d] = sp[d - 1] * s;
      cp[d] = cp[d - 1] * one_minus_s;
    }
    auto basis = [&](int l, int deg) {
      double binom = 1.0;
      for (int m = 0; m < l; ++m) binom = binom * (deg - m) / (m + 1);
      return binom * (sp[l] * cp[deg - l]);
    };

    out.q[i].reserve(n);
    out.qd[i].reserve(n);
    out.qdd[i].reserve(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v0 = ic.v[j] * partition.t_fin;
      const double a0 = ic.a[j] * partition.t_fin * partition.t_fin;
      std::vector<PolyZonotope> beta(6, PolyZonotope(0.0));
      beta[0] = PolyZonotope(ic.q[j]);
      beta[1] = PolyZonotope((v0 + 5.0 * ic.q[j]) / 5.0);
      beta[2] = PolyZonotope(
          (a0 + 40.0 * beta[1].center_scalar() - 20.0 * ic.q[j]) / 20.0);
      beta[5] = PolyZonotope::scalar_var(eta2[j], eta1[j],
                                         param_var(static_cast<uint32_t>(j)));
      beta[4] = beta[5];
      beta[3] = beta[5];

      PolyZonotope qpz(1, 1), vpz(1, 1), apz(1, 1);
      for (int l = 0; l <= 5; ++l) {
        qpz = qpz + beta[l] * basis(l, 5);
      }
      for (int l = 0; l <= 4; ++l) {
        vpz = vpz + 5.0 * ((beta[l + 1] - beta[l]) * basis(l, 4));
      }
      for (int l = 0; l <= 3; ++l) {
        apz = apz + 20.0 * ((beta[l + 2] - 2.0 * beta[l + 1] + beta[l]) *
                            basis(l, 3));
      }
      out.q[i].push_back(qpz);
      out.qd[i].push_back((1.0 / partition.t_fin) * vpz);
      out.qdd[i].push_back(
          (1.0 / (partition.t_fin * partition.t_fin)) * apz);
    }
  }
  return out;
}

TrackedTrajectoryPz inflate_tracking_error(const DesiredTrajectoryPz& desired,
                                           const TrackingBoundsInflation& bounds,
                                           const VecX& Kr) {
  const size_t n_t = desired.q.size();
  const size_t n_q = n_t == 0 ? 0 : desired.q[0].size();
  if (bounds.eps_p.size() != static_cast<Eigen::Index>(n_q) ||
      Kr.size() != static_cast<Eigen::Index>(n_q)) {
    throw std::invalid_argument("inflate_tracking_error: dimension mismatch");
  }
  if ((bounds.eps_p.array() < 0).any() || bounds.eps_v < 0) {
    throw std::invalid_argument("inflate_tracking_error: negative bounds");
  }
  TrackedTrajectoryPz out;
  out.partition = desired.partition;
  out.q.resize(n_t);
  out.qd.resize(n_t);
  out.qd_aux.resize(n_t);
  out.qdd_aux.resize(n_t);
  for (size_t i = 0; i < n_t; ++i) {
    for (size_t j = 0; j < n_q; ++j) {
      const auto ep = pos_error_var(static_cast<uint32_t>(j));
      const auto ev = vel_error_var(static_cast<uint32_t>(j));
      const auto jj = static_cast<Eigen::Index>(j);
      const PolyZonotope e_pz =
          PolyZonotope::scalar_var(0.0, bounds.eps_p[jj], ep);
      const PolyZonotope ed_pz = PolyZonotope::scalar_var(0.0, bounds.eps_v, ev);
      out.q[i].push_back(desired.q[i][j] - e_pz);
      out.qd[i].push_back(desired.qd[i][j] - ed_pz);
      out.qd_aux[i].push_back(desired.qd[i][j] + Kr[jj] * e_pz);
      out.qdd_aux[i].push_back(desired.qdd[i][j] + Kr[jj] * ed_pz);
    }
  }
  return out;
}

}  // namespace waiterplan
