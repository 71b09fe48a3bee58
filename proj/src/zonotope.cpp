#include "waiterplan/zonotope.hpp"

#include <stdexcept>

#include "waiterplan/rng.hpp"

namespace waiterplan {

Zonotope::Zonotope(VecX center, MatX generators)
    : center_(std::move(center)), generators_(std::move(generators)) {
  if (generators_.size() > 0 && generators_.rows() != center_.size()) {
    throw std::invalid_argument("zonotope: generator dimension mismatch");
  }
  if (generators_.size() == 0) {
    generators_.resize(center_.size(), 0);
  }
}

Zonotope Zonotope::point(const VecX& center) {
  return Zonotope(center, MatX::Zero(center.size(), 0));
}

Interval Zonotope::to_interval() const {
  VecX r = VecX::Zero(dim());
  for (Eigen::Index i = 0; i < n_generators(); ++i) {
    r += generators_.col(i).cwiseAbs();
  }
  return Interval(center_ - r, center_ + r);
}

VecX Zonotope::at(const VecX& beta) const {
  if (beta.size() != n_generators()) {
    throw std::invalid_argument("zonotope: indeterminate count mismatch");
  }
  return center_ + generators_ * beta;
}

VecX Zonotope::sample(Rng& rng) const {
  return at(rng.symmetric_vec(static_cast<int>(n_generators())));
}

}  // namespace waiterplan
