#pragma once

#include <unordered_map>
#include <vector>

#include "waiterplan/indeterminate.hpp"
#include "waiterplan/interval.hpp"
#include "waiterplan/zonotope.hpp"

namespace waiterplan {

/// Sparse multivariate monomial: sorted (indeterminate, exponent) factors.
class Monomial {
 public:
  struct Factor {
    VarId id;
    uint32_t exp;
  };

  static Monomial one() { return Monomial(); }
  static Monomial var(VarId id, uint32_t exp = 1);

  bool is_constant() const { return factors_.empty(); }
  const std::vector<Factor>& factors() const { return factors_; }
  uint32_t degree_of(VarId id) const;
  uint32_t total_degree() const;

  Monomial times(const Monomial& other) const;
  /// Remove the factor for `id` (if present); used by slice/differentiate.
  Monomial without(VarId id) const;

  int compare(const Monomial& other) const;
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.compare(b) == 0;
  }
  friend bool operator<(const Monomial& a, const Monomial& b) {
    return a.compare(b) < 0;
  }

 private:
  std::vector<Factor> factors_;
  friend class PolyZonotope;
};

/// Assignment of values in [-1,1] to indeterminates.
class Assignment {
 public:
  void set(VarId id, double value);
  const double* find(VarId id) const;
  double at(VarId id) const;
  size_t size() const { return values_.size(); }

 private:
  std::unordered_map<uint64_t, double> values_;
};

struct Term {
  MatX coeff;
  Monomial mono;
};

constexpr int kDefaultTaylorDegree = 6;
constexpr int kDefaultMaxTerms = 40;
/// Coefficient entries below this absolute value are dropped when
/// canonicalizing; equal exponent maps are always merged.
constexpr double kCoeffDropTol = 1e-14;

/// Polynomial zonotope: the set traced by a sparse polynomial with matrix
/// coefficients as its indeterminates range over [-1,1]. Scalars are 1x1,
/// vectors d x 1. Values are immutable after construction; all operations
/// return new values and are safe to run concurrently.
class PolyZonotope {
 public:
  PolyZonotope() : PolyZonotope(1, 1) {}
  PolyZonotope(Eigen::Index rows, Eigen::Index cols);
  explicit PolyZonotope(double c);

  static PolyZonotope constant(const MatX& c);
  static PolyZonotope constant(const VecX& c);
  /// Build from raw terms (canonicalized).
  static PolyZonotope from_terms(Eigen::Index rows, Eigen::Index cols,
                                 std::vector<Term> terms);
  /// center + radius * x_id (scalar).
  static PolyZonotope scalar_var(double center, double radius, VarId id);
  /// Set-equal PZ of an interval; one fresh indeterminate per entry with
  /// nonzero radius, or caller-supplied ids (one per entry, row-major).
  static PolyZonotope from_interval(const Interval& x);
  static PolyZonotope from_interval(const Interval& x,
                                    const std::vector<VarId>& ids);
  /// Zonotope as a PZ with one fresh indeterminate per generator.
  static PolyZonotope from_zonotope(const Zonotope& z);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }
  const std::vector<Term>& terms() const { return terms_; }
  size_t n_terms() const { return terms_.size(); }

  MatX center() const;
  double center_scalar() const { return center()(0, 0); }
  bool is_point() const;

  PolyZonotope transpose() const;
  /// Scalar PZ of one entry.
  PolyZonotope entry(Eigen::Index r, Eigen::Index c = 0) const;
  /// Stack scalar PZs into a column vector.
  static PolyZonotope stack(const std::vector<PolyZonotope>& entries);

  friend PolyZonotope operator+(const PolyZonotope& a, const PolyZonotope& b);
  friend PolyZonotope operator-(const PolyZonotope& a, const PolyZonotope& b);
  friend PolyZonotope operator-(const PolyZonotope& a);
  /// Matrix product; a 1x1 operand multiplies elementwise.
  friend PolyZonotope operator*(const PolyZonotope& a, const PolyZonotope& b);
  friend PolyZonotope operator*(double s, const PolyZonotope& a);
  PolyZonotope& operator+=(const PolyZonotope& other);

  static PolyZonotope cross(const PolyZonotope& a, const PolyZonotope& b);
  static PolyZonotope dot(const PolyZonotope& a, const PolyZonotope& b);

  /// Substitute sigma in [-1,1] for one indeterminate. Unknown ids are a
  /// no-op; `known` reports whether the id appeared.
  PolyZonotope slice(VarId id, double sigma, bool* known = nullptr) const;
  PolyZonotope slice(const std::vector<VarId>& ids, const VecX& sigma) const;

  /// Conservative elementwise range: center +/- sum |coeff| over
  /// non-constant terms (dependencies ignored).
  Interval bounds() const;

  /// Keep the max_terms largest dependent terms; dropped mass becomes fresh
  /// independent generators (one per affected entry). Result contains *this.
  PolyZonotope reduce(int max_terms = kDefaultMaxTerms) const;

  /// Exact evaluation; assignment must cover every indeterminate.
  MatX evaluate(const Assignment& assignment) const;

  /// Split against a partial assignment: `value` collects terms whose
  /// indeterminates are all assigned, evaluated exactly; `radius` bounds the
  /// rest elementwise (unassigned monomial factors range in [-1,1]).
  void affine_split(const Assignment& assignment, MatX* value,
                    MatX* radius) const;
  /// Worst elementwise membership defect of a point under a partial
  /// assignment: max(|point - value| - radius); nonpositive means contained.
  double containment_margin(const MatX& point,
                            const Assignment& assignment) const;
  /// Membership test of a point under a partial assignment.
  bool contains(const MatX& point, const Assignment& assignment,
                double tol) const;

  /// Formal partial derivative with respect to one indeterminate.
  PolyZonotope differentiate(VarId id) const;

  std::vector<VarId> variables() const;

  /// Degree-d Taylor expansion about the center with an interval Lagrange
  /// remainder attached as a fresh independent indeterminate.
  static PolyZonotope sin(const PolyZonotope& p,
                          int degree = kDefaultTaylorDegree,
                          int max_terms = kDefaultMaxTerms);
  static PolyZonotope cos(const PolyZonotope& p,
                          int degree = kDefaultTaylorDegree,
                          int max_terms = kDefaultMaxTerms);

 private:
  void canonicalize();
  static PolyZonotope analytic(const PolyZonotope& p, bool is_sin, int degree,
                               int max_terms);

  Eigen::Index rows_, cols_;
  std::vector<Term> terms_;  // canonical: sorted by monomial, merged
};

PolyZonotope interval_to_pz(const Interval& x);

}  // namespace waiterplan
