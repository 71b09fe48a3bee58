#pragma once

#include <Eigen/Dense>

namespace waiterplan {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Elementwise interval [lo, hi] over a fixed matrix shape. Scalars are 1x1.
class Interval {
 public:
  Interval() : Interval(0.0, 0.0) {}
  Interval(double lo, double hi);
  Interval(MatX lo, MatX hi);
  static Interval point(const MatX& v);
  static Interval point(double v);

  Eigen::Index rows() const { return lo_.rows(); }
  Eigen::Index cols() const { return lo_.cols(); }
  bool is_scalar() const { return rows() == 1 && cols() == 1; }

  const MatX& lo() const { return lo_; }
  const MatX& hi() const { return hi_; }
  double lo_scalar() const { return lo_(0, 0); }
  double hi_scalar() const { return hi_(0, 0); }
  MatX center() const { return 0.5 * (lo_ + hi_); }
  MatX radius() const { return 0.5 * (hi_ - lo_); }
  double width() const { return (hi_ - lo_).maxCoeff(); }

  bool contains(const MatX& v, double tol = 0.0) const;
  bool contains(const Interval& other, double tol = 0.0) const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a);
  friend Interval operator*(double s, const Interval& a);

  /// Elementwise product; either side may be scalar (broadcast).
  static Interval mul(const Interval& a, const Interval& b);
  static Interval matmul(const Interval& a, const Interval& b);
  static Interval cross(const Interval& a, const Interval& b);

  /// Integer power of a scalar interval (exact for even/odd exponents).
  Interval pow(int n) const;

  static Interval sin(const Interval& a);
  static Interval cos(const Interval& a);

 private:
  MatX lo_, hi_;
};

enum class IntervalOp { add, sub, mul, matmul, cross };

Interval interval_ops(const Interval& a, const Interval& b, IntervalOp kind);

}  // namespace waiterplan
