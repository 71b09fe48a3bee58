#pragma once

#include "waiterplan/interval.hpp"

namespace waiterplan {

class Rng;

/// Zonotope: center plus generators, each generator scaled by an
/// indeterminate in [-1,1]. Generators are the columns of a d x n_g matrix.
class Zonotope {
 public:
  Zonotope() = default;
  Zonotope(VecX center, MatX generators);
  static Zonotope point(const VecX& center);

  Eigen::Index dim() const { return center_.size(); }
  Eigen::Index n_generators() const { return generators_.cols(); }
  const VecX& center() const { return center_; }
  const MatX& generators() const { return generators_; }

  /// Interval hull [c - sum|g_i|, c + sum|g_i|].
  Interval to_interval() const;

  VecX at(const VecX& beta) const;
  VecX sample(Rng& rng) const;

 private:
  VecX center_;
  MatX generators_;
};

inline Interval zono_to_interval(const Zonotope& z) { return z.to_interval(); }

}  // namespace waiterplan
