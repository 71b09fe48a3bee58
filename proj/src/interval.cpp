#include "waiterplan/interval.hpp"

#include <cmath>
#include <stdexcept>

namespace waiterplan {

namespace {

void check_same_shape(const Interval& a, const Interval& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string("interval ") + op +
                                ": shape mismatch");
  }
}

// Product of two scalar intervals: min/max of the four endpoint products.
void scalar_mul(double alo, double ahi, double blo, double bhi, double* lo,
                double* hi) {
  const double p1 = alo * blo, p2 = alo * bhi, p3 = ahi * blo, p4 = ahi * bhi;
  *lo = std::min(std::min(p1, p2), std::min(p3, p4));
  *hi = std::max(std::max(p1, p2), std::max(p3, p4));
}

}  // namespace

Interval::Interval(double lo, double hi)
    : Interval(MatX::Constant(1, 1, lo), MatX::Constant(1, 1, hi)) {}

Interval::Interval(MatX lo, MatX hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.rows() != hi_.rows() || lo_.cols() != hi_.cols()) {
    throw std::invalid_argument("interval: lo/hi shape mismatch");
  }
  if (((hi_ - lo_).array() < -1e-12).any()) {
    throw std::invalid_argument("interval: lo > hi");
  }
}

Interval Interval::point(const MatX& v) { return Interval(v, v); }
Interval Interval::point(double v) { return Interval(v, v); }

bool Interval::contains(const MatX& v, double tol) const {
  if (v.rows() != rows() || v.cols() != cols()) return false;
  return ((v - lo_).array() >= -tol).all() && ((hi_ - v).array() >= -tol).all();
}

bool Interval::contains(const Interval& other, double tol) const {
  return ((other.lo() - lo_).array() >= -tol).all() &&
         ((hi_ - other.hi()).array() >= -tol).all();
}

Interval operator+(const Interval& a, const Interval& b) {
  check_same_shape(a, b, "add");
  return Interval(a.lo_ + b.lo_, a.hi_ + b.hi_);
}

Interval operator-(const Interval& a, const Interval& b) {
  check_same_shape(a, b, "sub");
  return Interval(a.lo_ - b.hi_, a.hi_ - b.lo_);
}

Interval operator-(const Interval& a) {
  return Interval(-a.hi_, -a.lo_);
}

Interval operator*(double s, const Interval& a) {
  if (s >= 0) return Interval(s * a.lo_, s * a.hi_);
  return Interval(s * a.hi_, s * a.lo_);
}

Interval Interval::mul(const Interval& a, const Interval& b) {
  if (a.is_scalar() && !b.is_scalar()) {
    MatX lo(b.rows(), b.cols()), hi(b.rows(), b.cols());
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        scalar_mul(a.lo_(0, 0), a.hi_(0, 0), b.lo_(i, j), b.hi_(i, j),
                   &lo(i, j), &hi(i, j));
    return Interval(lo, hi);
  }
  if (b.is_scalar() && !a.is_scalar()) return mul(b, a);
  check_same_shape(a, b, "mul");
  MatX lo(a.rows(), a.cols()), hi(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      scalar_mul(a.lo_(i, j), a.hi_(i, j), b.lo_(i, j), b.hi_(i, j), &lo(i, j),
                 &hi(i, j));
  return Interval(lo, hi);
}

Interval Interval::matmul(const Interval& a, const Interval& b) {
  if (a.is_scalar() || b.is_scalar()) return mul(a, b);
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("interval matmul: inner dimension mismatch");
  }
  MatX lo = MatX::Zero(a.rows(), b.cols());
  MatX hi = MatX::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double slo = 0.0, shi = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        double plo, phi;
        scalar_mul(a.lo_(i, k), a.hi_(i, k), b.lo_(k, j), b.hi_(k, j), &plo,
                   &phi);
        slo += plo;
        shi += phi;
      }
      lo(i, j) = slo;
      hi(i, j) = shi;
    }
  }
  return Interval(lo, hi);
}

Interval Interval::cross(const Interval& a, const Interval& b) {
  if (a.rows() != 3 || a.cols() != 1 || b.rows() != 3 || b.cols() != 1) {
    throw std::invalid_argument("interval cross: both operands must be 3-vectors");
  }
  // Skew-matrix product: [a]x b.
  MatX slo = MatX::Zero(3, 3), shi = MatX::Zero(3, 3);
  auto put = [&](int r, int c, double lo, double hi) {
    slo(r, c) = lo;
    shi(r, c) = hi;
  };
  put(0, 1, -a.hi_(2, 0), -a.lo_(2, 0));
  put(0, 2, a.lo_(1, 0), a.hi_(1, 0));
  put(1, 0, a.lo_(2, 0), a.hi_(2, 0));
  put(1, 2, -a.hi_(0, 0), -a.lo_(0, 0));
  put(2, 0, -a.hi_(1, 0), -a.lo_(1, 0));
  put(2, 1, a.lo_(0, 0), a.hi_(0, 0));
  return matmul(Interval(slo, shi), b);
}

Interval Interval::pow(int n) const {
  if (!is_scalar()) {
    throw std::invalid_argument("interval pow: scalar only");
  }
  if (n < 0) throw std::invalid_argument("interval pow: negative exponent");
  if (n == 0) return Interval(1.0, 1.0);
  const double lo = lo_(0, 0), hi = hi_(0, 0);
  const double plo = std::pow(lo, n), phi = std::pow(hi, n);
  if (n % 2 == 1) return Interval(plo, phi);
  if (lo >= 0) return Interval(plo, phi);
  if (hi <= 0) return Interval(phi, plo);
  return Interval(0.0, std::max(plo, phi));
}

namespace {

// Range of sin over [lo, hi]; extrema occur at pi/2 + m*pi.
Interval interval_sin(double lo, double hi) {
  if (hi - lo >= 2.0 * M_PI) return Interval(-1.0, 1.0);
  double vlo = std::min(std::sin(lo), std::sin(hi));
  double vhi = std::max(std::sin(lo), std::sin(hi));
  const double mmin = std::ceil((lo - M_PI / 2.0) / M_PI);
  const double mmax = std::floor((hi - M_PI / 2.0) / M_PI);
  for (double m = mmin; m <= mmax; m += 1.0) {
    const double x = M_PI / 2.0 + m * M_PI;
    vlo = std::min(vlo, std::sin(x) < 0 ? -1.0 : 1.0);
    vhi = std::max(vhi, std::sin(x) < 0 ? -1.0 : 1.0);
  }
  return Interval(std::max(vlo, -1.0), std::min(vhi, 1.0));
}

}  // namespace

Interval Interval::sin(const Interval& a) {
  if (!a.is_scalar()) throw std::invalid_argument("interval sin: scalar only");
  return interval_sin(a.lo_scalar(), a.hi_scalar());
}

Interval Interval::cos(const Interval& a) {
  if (!a.is_scalar()) throw std::invalid_argument("interval cos: scalar only");
  return interval_sin(a.lo_scalar() + M_PI / 2.0, a.hi_scalar() + M_PI / 2.0);
}

Interval interval_ops(const Interval& a, const Interval& b, IntervalOp kind) {
  switch (kind) {
    case IntervalOp::add:
      return a + b;
    case IntervalOp::sub:
      return a - b;
    case IntervalOp::mul:
      return Interval::mul(a, b);
    case IntervalOp::matmul:
      return Interval::matmul(a, b);
    case IntervalOp::cross:
      return Interval::cross(a, b);
  }
  throw std::invalid_argument("interval_ops: unknown kind");
}

}  // namespace waiterplan
