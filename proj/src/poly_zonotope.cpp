#include "waiterplan/poly_zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace waiterplan {

/*
 * Monomial
 */

Monomial Monomial::var(VarId id, uint32_t exp) {
  Monomial m;
  if (exp > 0) m.factors_.push_back({id, exp});
  return m;
}

uint32_t Monomial::degree_of(VarId id) const {
  for (const auto& f : factors_) {
    if (f.id == id) return f.exp;
  }
  return 0;
}

uint32_t Monomial::total_degree() const {
  uint32_t d = 0;
  for (const auto& f : factors_) d += f.exp;
  return d;
}

Monomial Monomial::times(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  size_t i = 0, j = 0;
  while (i < factors_.size() && j < other.factors_.size()) {
    if (factors_[i].id < other.factors_[j].id) {
      out.factors_.push_back(factors_[i++]);
    } else if (other.factors_[j].id < factors_[i].id) {
      out.factors_.push_back(other.factors_[j++]);
    } else {
      out.factors_.push_back({factors_[i].id, factors_[i].exp + other.factors_[j].exp});
      ++i;
      ++j;
    }
  }
  for (; i < factors_.size(); ++i) out.factors_.push_back(factors_[i]);
  for (; j < other.factors_.size(); ++j) out.factors_.push_back(other.factors_[j]);
  return out;
}

Monomial Monomial::without(VarId id) const {
  Monomial out;
  out.factors_.reserve(factors_.size());
  for (const auto& f : factors_) {
    if (!(f.id == id)) out.factors_.push_back(f);
  }
  return out;
}

int Monomial::compare(const Monomial& other) const {
  const size_t n = std::min(factors_.size(), other.factors_.size());
  for (size_t i = 0; i < n; ++i) {
    if (factors_[i].id.key() != other.factors_[i].id.key()) {
      return factors_[i].id.key() < other.factors_[i].id.key() ? -1 : 1;
    }
    if (factors_[i].exp != other.factors_[i].exp) {
      return factors_[i].exp < other.factors_[i].exp ? -1 : 1;
    }
  }
  if (factors_.size() != other.factors_.size()) {
    return factors_.size() < other.factors_.size() ? -1 : 1;
  }
  return 0;
}

/*
 * Assignment
 */

void Assignment::set(VarId id, double value) {
  if (std::abs(value) > 1.0 + 1e-12) {
    throw std::domain_error("assignment: value outside [-1,1] for " +
                            to_string(id));
  }
  values_[id.key()] = value;
}

const double* Assignment::find(VarId id) const {
  auto it = values_.find(id.key());
  return it == values_.end() ? nullptr : &it->second;
}

double Assignment::at(VarId id) const {
  const double* v = find(id);
  if (v == nullptr) {
    throw std::runtime_error("assignment: missing value for " + to_string(id));
  }
  return *v;
}

/*
 * PolyZonotope construction
 */

PolyZonotope::PolyZonotope(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("poly zonotope: empty shape");
  }
}

PolyZonotope::PolyZonotope(double c) : rows_(1), cols_(1) {
  if (c != 0.0) {
    terms_.push_back({MatX::Constant(1, 1, c), Monomial::one()});
  }
}

PolyZonotope PolyZonotope::constant(const MatX& c) {
  PolyZonotope p(c.rows(), c.cols());
  p.terms_.push_back({c, Monomial::one()});
  p.canonicalize();
  return p;
}

PolyZonotope PolyZonotope::constant(const VecX& c) {
  return constant(MatX(c));
}

PolyZonotope PolyZonotope::from_terms(Eigen::Index rows, Eigen::Index cols,
                                      std::vector<Term> terms) {
  PolyZonotope p(rows, cols);
  p.terms_ = std::move(terms);
  p.canonicalize();
  return p;
}

PolyZonotope PolyZonotope::scalar_var(double center, double radius, VarId id) {
  PolyZonotope p(1, 1);
  if (center != 0.0) {
    p.terms_.push_back({MatX::Constant(1, 1, center), Monomial::one()});
  }
  if (radius != 0.0) {
    p.terms_.push_back({MatX::Constant(1, 1, radius), Monomial::var(id)});
  }
  p.canonicalize();
  return p;
}

PolyZonotope PolyZonotope::from_interval(const Interval& x) {
  std::vector<VarId> ids(static_cast<size_t>(x.rows() * x.cols()));
  for (auto& id : ids) id = FreshVars::next();
  return from_interval(x, ids);
}

PolyZonotope PolyZonotope::from_interval(const Interval& x,
                                         const std::vector<VarId>& ids) {
  if (static_cast<Eigen::Index>(ids.size()) != x.rows() * x.cols()) {
    throw std::invalid_argument("from_interval: one id per entry required");
  }
  PolyZonotope p(x.rows(), x.cols());
  p.terms_.push_back({x.center(), Monomial::one()});
  const MatX rad = x.radius();
  size_t n = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c, ++n) {
      if (rad(r, c) > 0.0) {
        MatX g = MatX::Zero(x.rows(), x.cols());
        g(r, c) = rad(r, c);
        p.terms_.push_back({g, Monomial::var(ids[n])});
      }
    }
  }
  p.canonicalize();
  return p;
}

PolyZonotope PolyZonotope::from_zonotope(const Zonotope& z) {
  PolyZonotope p(z.dim(), 1);
  p.terms_.push_back({MatX(z.center()), Monomial::one()});
  for (Eigen::Index i = 0; i < z.n_generators(); ++i) {
    p.terms_.push_back({MatX(z.generators().col(i)),
                        Monomial::var(FreshVars::next())});
  }
  p.canonicalize();
  return p;
}

PolyZonotope interval_to_pz(const Interval& x) {
  return PolyZonotope::from_interval(x);
}

void PolyZonotope::canonicalize() {
  for (auto& t : terms_) {
    if (t.coeff.rows() != rows_ || t.coeff.cols() != cols_) {
      throw std::invalid_argument("poly zonotope: term shape mismatch");
    }
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.mono < b.mono; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().mono == t.mono) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  terms_.clear();
  for (auto& t : merged) {
    bool any = false;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      for (Eigen::Index c = 0; c < cols_; ++c) {
        if (std::abs(t.coeff(r, c)) < kCoeffDropTol) {
          t.coeff(r, c) = 0.0;
        } else {
          any = true;
        }
      }
    }
    if (any) terms_.push_back(std::move(t));
  }
}

MatX PolyZonotope::center() const {
  if (!terms_.empty() && terms_.front().mono.is_constant()) {
    return terms_.front().coeff;
  }
  return MatX::Zero(rows_, cols_);
}

bool PolyZonotope::is_point() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.front().mono.is_constant());
}

PolyZonotope PolyZonotope::transpose() const {
  PolyZonotope out(cols_, rows_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    out.terms_.push_back({t.coeff.transpose(), t.mono});
  }
  return out;
}

PolyZonotope PolyZonotope::entry(Eigen::Index r, Eigen::Index c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    throw std::invalid_argument("poly zonotope: entry out of range");
  }
  PolyZonotope out(1, 1);
  for (const auto& t : terms_) {
    if (t.coeff(r, c) != 0.0) {
      out.terms_.push_back({MatX::Constant(1, 1, t.coeff(r, c)), t.mono});
    }
  }
  out.canonicalize();
  return out;
}

PolyZonotope PolyZonotope::stack(const std::vector<PolyZonotope>& entries) {
  if (entries.empty()) {
    throw std::invalid_argument("poly zonotope stack: no entries");
  }
  PolyZonotope out(static_cast<Eigen::Index>(entries.size()), 1);
  for (size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].is_scalar()) {
      throw std::invalid_argument("poly zonotope stack: scalar entries only");
    }
    for (const auto& t : entries[i].terms_) {
      MatX g = MatX::Zero(out.rows_, 1);
      g(static_cast<Eigen::Index>(i), 0) = t.coeff(0, 0);
      out.terms_.push_back({std::move(g), t.mono});
    }
  }
  out.canonicalize();
  return out;
}

/*
 * Arithmetic
 */

PolyZonotope operator+(const PolyZonotope& a, const PolyZonotope& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("poly zonotope add: shape mismatch");
  }
  PolyZonotope out(a.rows(), a.cols());
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  out.terms_.insert(out.terms_.end(), a.terms_.begin(), a.terms_.end());
  out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
  out.canonicalize();
  return out;
}

PolyZonotope operator-(const PolyZonotope& a) {
  PolyZonotope out(a.rows(), a.cols());
  out.terms_.reserve(a.terms_.size());
  for (const auto& t : a.terms_) out.terms_.push_back({-t.coeff, t.mono});
  return out;
}

PolyZonotope operator-(const PolyZonotope& a, const PolyZonotope& b) {
  return a + (-b);
}

PolyZonotope& PolyZonotope::operator+=(const PolyZonotope& other) {
  *this = *this + other;
  return *this;
}

PolyZonotope operator*(const PolyZonotope& a, const PolyZonotope& b) {
  const bool a_scalar = a.is_scalar();
  const bool b_scalar = b.is_scalar();
  Eigen::Index rows, cols;
  if (a_scalar && !b_scalar) {
    rows = b.rows();
    cols = b.cols();
  } else if (b_scalar && !a_scalar) {
    rows = a.rows();
    cols = a.cols();
  } else if (a_scalar && b_scalar) {
    rows = cols = 1;
  } else {
    if (a.cols() != b.rows()) {
      throw std::invalid_argument("poly zonotope mul: inner dimension mismatch");
    }
    rows = a.rows();
    cols = b.cols();
  }
  PolyZonotope out(rows, cols);
  out.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      MatX coeff;
      if (a_scalar && !b_scalar) {
        coeff = ta.coeff(0, 0) * tb.coeff;
      } else if (b_scalar && !a_scalar) {
        coeff = tb.coeff(0, 0) * ta.coeff;
      } else {
        coeff = ta.coeff * tb.coeff;
      }
      out.terms_.push_back({std::move(coeff), ta.mono.times(tb.mono)});
    }
  }
  out.canonicalize();
  return out;
}

PolyZonotope operator*(double s, const PolyZonotope& a) {
  PolyZonotope out(a.rows(), a.cols());
  out.terms_.reserve(a.terms_.size());
  for (const auto& t : a.terms_) out.terms_.push_back({s * t.coeff, t.mono});
  out.canonicalize();
  return out;
}

PolyZonotope PolyZonotope::cross(const PolyZonotope& a, const PolyZonotope& b) {
  if (a.rows() != 3 || a.cols() != 1 || b.rows() != 3 || b.cols() != 1) {
    throw std::invalid_argument("poly zonotope cross: both operands must be 3-vectors");
  }
  // Skew matrix of a, multiplied by b.
  PolyZonotope skew(3, 3);
  skew.terms_.reserve(a.terms_.size());
  for (const auto& t : a.terms_) {
    MatX m = MatX::Zero(3, 3);
    m(0, 1) = -t.coeff(2, 0);
    m(0, 2) = t.coeff(1, 0);
    m(1, 0) = t.coeff(2, 0);
    m(1, 2) = -t.coeff(0, 0);
    m(2, 0) = -t.coeff(1, 0);
    m(2, 1) = t.coeff(0, 0);
    skew.terms_.push_back({std::move(m), t.mono});
  }
  return skew * b;
}

PolyZonotope PolyZonotope::dot(const PolyZonotope& a, const PolyZonotope& b) {
  if (a.cols() != 1 || b.cols() != 1 || a.rows() != b.rows()) {
    throw std::invalid_argument("poly zonotope dot: vector shape mismatch");
  }
  return a.transpose() * b;
}

/*
 * Set operations
 */

PolyZonotope PolyZonotope::slice(VarId id, double sigma, bool* known) const {
  if (std::abs(sigma) > 1.0 + 1e-12) {
    throw std::domain_error("slice: sigma outside [-1,1]");
  }
  bool found = false;
  PolyZonotope out(rows_, cols_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    const uint32_t e = t.mono.degree_of(id);
    if (e == 0) {
      out.terms_.push_back(t);
    } else {
      found = true;
      out.terms_.push_back({std::pow(sigma, e) * t.coeff, t.mono.without(id)});
    }
  }
  if (known != nullptr) *known = found;
  out.canonicalize();
  return out;
}

PolyZonotope PolyZonotope::slice(const std::vector<VarId>& ids,
                                 const VecX& sigma) const {
  if (static_cast<Eigen::Index>(ids.size()) != sigma.size()) {
    throw std::invalid_argument("slice: id/value count mismatch");
  }
  PolyZonotope out = *this;
  for (size_t i = 0; i < ids.size(); ++i) {
    out = out.slice(ids[i], sigma[static_cast<Eigen::Index>(i)]);
  }
  return out;
}

Interval PolyZonotope::bounds() const {
  MatX c = MatX::Zero(rows_, cols_);
  MatX r = MatX::Zero(rows_, cols_);
  for (const auto& t : terms_) {
    if (t.mono.is_constant()) {
      c += t.coeff;
    } else {
      r += t.coeff.cwiseAbs();
    }
  }
  return Interval(c - r, c + r);
}

PolyZonotope PolyZonotope::reduce(int max_terms) const {
  if (max_terms < 1) throw std::invalid_argument("reduce: max_terms < 1");
  std::vector<size_t> dependent;
  dependent.reserve(terms_.size());
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (!terms_[i].mono.is_constant()) dependent.push_back(i);
  }
  if (dependent.size() <= static_cast<size_t>(max_terms)) return *this;

  // Rank by total coefficient mass; ties broken by monomial order so the
  // result does not depend on sort internals.
  std::vector<std::pair<double, size_t>> ranked;
  ranked.reserve(dependent.size());
  for (size_t i : dependent) {
    ranked.push_back({terms_[i].coeff.cwiseAbs().sum(), i});
  }
  std::sort(ranked.begin(), ranked.end(), [this](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return terms_[a.second].mono < terms_[b.second].mono;
  });

  PolyZonotope out(rows_, cols_);
  out.terms_.reserve(static_cast<size_t>(max_terms) + rows_ * cols_ + 1);
  if (!terms_.empty() && terms_.front().mono.is_constant()) {
    out.terms_.push_back(terms_.front());
  }
  MatX dropped = MatX::Zero(rows_, cols_);
  for (size_t n = 0; n < ranked.size(); ++n) {
    if (n < static_cast<size_t>(max_terms)) {
      out.terms_.push_back(terms_[ranked[n].second]);
    } else {
      dropped += terms_[ranked[n].second].coeff.cwiseAbs();
    }
  }
  for (Eigen::Index r = 0; r < rows_; ++r) {
    for (Eigen::Index c = 0; c < cols_; ++c) {
      if (dropped(r, c) > 0.0) {
        MatX g = MatX::Zero(rows_, cols_);
        g(r, c) = dropped(r, c);
        out.terms_.push_back({std::move(g), Monomial::var(FreshVars::next())});
      }
    }
  }
  out.canonicalize();
  return out;
}

MatX PolyZonotope::evaluate(const Assignment& assignment) const {
  MatX out = MatX::Zero(rows_, cols_);
  for (const auto& t : terms_) {
    double m = 1.0;
    for (const auto& f : t.mono.factors()) {
      m *= std::pow(assignment.at(f.id), static_cast<int>(f.exp));
    }
    out += m * t.coeff;
  }
  return out;
}

void PolyZonotope::affine_split(const Assignment& assignment, MatX* value,
                                MatX* radius) const {
  *value = MatX::Zero(rows_, cols_);
  *radius = MatX::Zero(rows_, cols_);
  for (const auto& t : terms_) {
    double m = 1.0;
    bool all_assigned = true;
    for (const auto& f : t.mono.factors()) {
      const double* v = assignment.find(f.id);
      if (v == nullptr) {
        all_assigned = false;
      } else {
        m *= std::pow(*v, static_cast<int>(f.exp));
      }
    }
    if (all_assigned) {
      *value += m * t.coeff;
    } else {
      *radius += std::abs(m) * t.coeff.cwiseAbs();
    }
  }
}

double PolyZonotope::containment_margin(const MatX& point,
                                        const Assignment& assignment) const {
  if (point.rows() != rows_ || point.cols() != cols_) {
    throw std::invalid_argument("containment_margin: shape mismatch");
  }
  MatX value, radius;
  affine_split(assignment, &value, &radius);
  return ((point - value).cwiseAbs() - radius).maxCoeff();
}

bool PolyZonotope::contains(const MatX& point, const Assignment& assignment,
                            double tol) const {
  if (point.rows() != rows_ || point.cols() != cols_) return false;
  return containment_margin(point, assignment) <= tol;
}

PolyZonotope PolyZonotope::differentiate(VarId id) const {
  PolyZonotope out(rows_, cols_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    const uint32_t e = t.mono.degree_of(id);
    if (e == 0) continue;
    Monomial m = t.mono.without(id);
    if (e > 1) m = m.times(Monomial::var(id, e - 1));
    out.terms_.push_back({static_cast<double>(e) * t.coeff, std::move(m)});
  }
  out.canonicalize();
  return out;
}

std::vector<VarId> PolyZonotope::variables() const {
  std::vector<VarId> out;
  for (const auto& t : terms_) {
    for (const auto& f : t.mono.factors()) out.push_back(f.id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/*
 * Analytic functions
 */

namespace {

double trig_derivative(bool is_sin, int order, double c) {
  // d^n/dx^n sin = {sin, cos, -sin, -cos}[n mod 4]; cos is shifted by one.
  const int phase = (order + (is_sin ? 0 : 1)) % 4;
  switch (phase) {
    case 0:
      return std::sin(c);
    case 1:
      return std::cos(c);
    case 2:
      return -std::sin(c);
    default:
      return -std::cos(c);
  }
}

Interval trig_derivative_range(bool is_sin, int order, const Interval& x) {
  const int phase = (order + (is_sin ? 0 : 1)) % 4;
  switch (phase) {
    case 0:
      return Interval::sin(x);
    case 1:
      return Interval::cos(x);
    case 2:
      return -Interval::sin(x);
    default:
      return -Interval::cos(x);
  }
}

}  // namespace

PolyZonotope PolyZonotope::analytic(const PolyZonotope& p, bool is_sin,
                                    int degree, int max_terms) {
  if (!p.is_scalar()) {
    throw std::invalid_argument("sin/cos: scalar poly zonotope required");
  }
  if (degree < 1) throw std::invalid_argument("sin/cos: degree < 1");
  const double c = p.center_scalar();
  PolyZonotope dev = p - PolyZonotope(c);
  if (dev.n_terms() == 0) {
    return PolyZonotope(is_sin ? std::sin(c) : std::cos(c));
  }
  PolyZonotope res(is_sin ? std::sin(c) : std::cos(c));
  PolyZonotope power(1.0);
  double factorial = 1.0;
  for (int n = 1; n <= degree; ++n) {
    factorial *= n;
    power = (power * dev).reduce(max_terms);
    res = res + (trig_derivative(is_sin, n, c) / factorial) * power;
  }
  // Lagrange remainder over the full input range.
  factorial *= degree + 1;
  power = (power * dev).reduce(max_terms);
  const Interval m = trig_derivative_range(is_sin, degree + 1, p.bounds());
  const Interval rem =
      (1.0 / factorial) * Interval::mul(m, power.bounds());
  res = (res + from_interval(rem)).reduce(max_terms);
  return res;
}

PolyZonotope PolyZonotope::sin(const PolyZonotope& p, int degree,
                               int max_terms) {
  return analytic(p, true, degree, max_terms);
}

PolyZonotope PolyZonotope::cos(const PolyZonotope& p, int degree,
                               int max_terms) {
  return analytic(p, false, degree, max_terms);
}

}  // namespace waiterplan
