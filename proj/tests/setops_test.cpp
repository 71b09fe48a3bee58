#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "waiterplan/serialize.hpp"

using namespace waiterplan;
using namespace waiterplan::testing;

namespace {

PolyZonotope affine(double c, double g, VarId id) {
  return PolyZonotope::scalar_var(c, g, id);
}

}  // namespace

TEST_CASE("interval endpoint arithmetic") {
  const Interval a(1.0, 2.0), b(3.0, 4.0);
  const Interval sum = interval_ops(a, b, IntervalOp::add);
  CHECK(sum.lo_scalar() == doctest::Approx(4.0));
  CHECK(sum.hi_scalar() == doctest::Approx(6.0));

  const Interval prod = interval_ops(Interval(-1.0, 2.0), b, IntervalOp::mul);
  CHECK(prod.lo_scalar() == doctest::Approx(-4.0));
  CHECK(prod.hi_scalar() == doctest::Approx(8.0));

  const Interval e1 = Interval::point(MatX(Vec3(1, 0, 0)));
  const Interval e2 = Interval::point(MatX(Vec3(0, 1, 0)));
  const Interval c = interval_ops(e1, e2, IntervalOp::cross);
  CHECK(c.lo()(2, 0) == doctest::Approx(1.0));
  CHECK(c.hi()(2, 0) == doctest::Approx(1.0));
  CHECK(c.lo().topRows(2).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  CHECK_THROWS_AS(interval_ops(e1, a, IntervalOp::add), std::invalid_argument);
}

TEST_CASE("interval product contains sampled products") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double alo = rng.uniform(-2, 2);
    const Interval a(alo, alo + rng.uniform(0, 2));
    const double blo = rng.uniform(-2, 2);
    const Interval b(blo, blo + rng.uniform(0, 2));
    const Interval p = Interval::mul(a, b);
    for (int s = 0; s < 20; ++s) {
      const double x = rng.uniform(a.lo_scalar(), a.hi_scalar());
      const double y = rng.uniform(b.lo_scalar(), b.hi_scalar());
      CHECK(p.contains(MatX::Constant(1, 1, x * y), 1e-12));
    }
  }
}

TEST_CASE("zonotope interval hull") {
  MatX gens(1, 2);
  gens << 0.5, -0.25;
  const Zonotope z(VecX::Constant(1, 1.0), gens);
  const Interval hull = z.to_interval();
  CHECK(hull.lo_scalar() == doctest::Approx(0.25));
  CHECK(hull.hi_scalar() == doctest::Approx(1.75));

  const Zonotope point = Zonotope::point(VecX::Constant(1, 3.0));
  CHECK(point.to_interval().lo_scalar() == doctest::Approx(3.0));
  CHECK(point.to_interval().hi_scalar() == doctest::Approx(3.0));

  // Dense sampling stays inside the hull.
  Rng rng(5);
  const Zonotope z3(Vec3(0.2, -0.1, 0.4), MatX::Random(3, 5));
  const Interval h3 = z3.to_interval();
  for (int s = 0; s < 10000; ++s) {
    CHECK(h3.contains(MatX(z3.sample(rng)), 1e-12));
  }
}

TEST_CASE("interval to pz is set-equal") {
  const PolyZonotope p = interval_to_pz(Interval(0.0, 2.0));
  CHECK(p.center_scalar() == doctest::Approx(1.0));
  CHECK(p.n_terms() == 2);
  CHECK(p.bounds().lo_scalar() == doctest::Approx(0.0));
  CHECK(p.bounds().hi_scalar() == doctest::Approx(2.0));

  const PolyZonotope degenerate = interval_to_pz(Interval(3.0, 3.0));
  CHECK(degenerate.n_terms() == 1);
  CHECK(degenerate.variables().empty());

  const Interval box(MatX::Constant(2, 1, -3.0), MatX::Constant(2, 1, 5.0));
  const PolyZonotope bp = interval_to_pz(box);
  CHECK(bp.center()(0, 0) == doctest::Approx(1.0));
  CHECK(bp.variables().size() == 2);
  CHECK(bp.bounds().contains(box, 1e-12));
}

TEST_CASE("pz addition") {
  const auto x = param_var(0);
  const auto y = param_var(1);
  const PolyZonotope sum = affine(1, 1, x) + affine(2, 3, x);
  CHECK(sum.center_scalar() == doctest::Approx(3.0));
  CHECK(sum.n_terms() == 2);  // 3 + 4x

  Assignment asg;
  asg.set(x, 0.5);
  CHECK(sum.evaluate(asg)(0, 0) == doctest::Approx(5.0));

  const PolyZonotope disjoint = affine(1, 1, x) + affine(2, 1, y);
  CHECK(disjoint.n_terms() == 3);  // 3 + x + y
}

TEST_CASE("pz addition evaluation oracle") {
  Rng rng(21);
  const auto vars = test_vars(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_pz(rng, 7, vars, 6);
    const auto b = random_pz(rng, 7, vars, 6);
    const auto sum = a + b;
    for (int s = 0; s < 500; ++s) {
      const auto asg = random_assignment(rng, vars);
      const MatX expect = a.evaluate(asg) + b.evaluate(asg);
      CHECK(sum.contains(expect, asg, 1e-10));
    }
  }
}

TEST_CASE("pz multiplication") {
  const auto x = param_var(0);
  const PolyZonotope p = affine(1, 1, x) * affine(1, -1, x);  // 1 - x^2
  Assignment asg;
  asg.set(x, 0.5);
  CHECK(p.evaluate(asg)(0, 0) == doctest::Approx(0.75));
  CHECK(p.bounds().lo_scalar() == doctest::Approx(0.0));
  CHECK(p.bounds().hi_scalar() == doctest::Approx(2.0));

  const PolyZonotope identity = PolyZonotope::constant(MatX(Mat3::Identity()));
  const PolyZonotope v = PolyZonotope::constant(MatX(Vec3(1, 2, 3)));
  const PolyZonotope iv = identity * v;
  CHECK((iv.center() - MatX(Vec3(1, 2, 3))).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pz multiplication evaluation oracle") {
  Rng rng(22);
  const auto vars = test_vars(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_pz(rng, 1, vars, 5);
    const auto b = random_pz(rng, 1, vars, 5);
    const auto prod = a * b;
    for (int s = 0; s < 500; ++s) {
      const auto asg = random_assignment(rng, vars);
      const MatX expect = a.evaluate(asg) * b.evaluate(asg);
      CHECK(prod.contains(expect, asg, 1e-10));
    }
  }
}

TEST_CASE("pz cross product") {
  const PolyZonotope e1 = PolyZonotope::constant(MatX(Vec3(1, 0, 0)));
  const PolyZonotope e2 = PolyZonotope::constant(MatX(Vec3(0, 1, 0)));
  const PolyZonotope e3 = PolyZonotope::cross(e1, e2);
  CHECK((e3.center() - MatX(Vec3(0, 0, 1))).cwiseAbs().maxCoeff() < 1e-15);

  const PolyZonotope self = PolyZonotope::cross(e1, e1);
  CHECK(self.n_terms() == 0);

  Rng rng(23);
  const auto vars = test_vars(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_pz(rng, 3, vars, 4);
    const auto b = random_pz(rng, 3, vars, 4);
    const auto c = PolyZonotope::cross(a, b);
    for (int s = 0; s < 300; ++s) {
      const auto asg = random_assignment(rng, vars);
      const Vec3 expect =
          Vec3(a.evaluate(asg)).cross(Vec3(b.evaluate(asg)));
      CHECK(c.contains(MatX(expect), asg, 1e-10));
    }
  }
}

TEST_CASE("pz slice") {
  const auto xk = param_var(0);
  const auto xt = time_var(0);
  // 1 + 2 x_k + x_t x_k
  std::vector<Term> terms;
  terms.push_back({MatX::Constant(1, 1, 1.0), Monomial::one()});
  terms.push_back({MatX::Constant(1, 1, 2.0), Monomial::var(xk)});
  terms.push_back({MatX::Constant(1, 1, 1.0),
                   Monomial::var(xt).times(Monomial::var(xk))});
  const auto p = PolyZonotope::from_terms(1, 1, terms);

  const auto sliced = p.slice(xk, 0.5);
  CHECK(sliced.center_scalar() == doctest::Approx(2.0));
  CHECK(sliced.n_terms() == 2);  // 2 + 0.5 x_t
  Assignment asg;
  asg.set(xt, 1.0);
  CHECK(sliced.evaluate(asg)(0, 0) == doctest::Approx(2.5));

  const auto zeroed = affine(3, 4, xk).slice(xk, 0.0);
  CHECK(zeroed.center_scalar() == doctest::Approx(3.0));
  CHECK(zeroed.n_terms() == 1);

  bool known = true;
  const auto untouched = p.slice(vel_error_var(9), 0.3, &known);
  CHECK_FALSE(known);
  CHECK(untouched.n_terms() == p.n_terms());

  CHECK_THROWS_AS(p.slice(xk, 1.5), std::domain_error);
}

TEST_CASE("sliced set nests inside the original bounds") {
  Rng rng(24);
  const auto vars = test_vars(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_pz(rng, 2, vars, 8);
    const Interval outer = p.bounds();
    const auto& id = vars[static_cast<size_t>(rng.uniform_int(5))];
    const auto sliced = p.slice(id, rng.symmetric());
    CHECK(outer.contains(sliced.bounds(), 1e-12));
  }
}

TEST_CASE("pz bounds") {
  const auto x = param_var(0);
  const PolyZonotope sq = affine(0, 1, x) * affine(0, 1, x);  // x^2
  const PolyZonotope p = PolyZonotope(1.0) - sq;              // 1 - x^2
  CHECK(p.bounds().lo_scalar() == doctest::Approx(0.0));
  CHECK(p.bounds().hi_scalar() == doctest::Approx(2.0));
  // True range [0, 1] is contained in the conservative [0, 2].
  Rng rng(31);
  Assignment asg;
  for (int s = 0; s < 2000; ++s) {
    asg.set(x, rng.symmetric());
    CHECK(p.bounds().contains(p.evaluate(asg), 1e-12));
  }

  CHECK(PolyZonotope(5.0).bounds().lo_scalar() == doctest::Approx(5.0));
  CHECK(PolyZonotope(5.0).bounds().hi_scalar() == doctest::Approx(5.0));
  CHECK(affine(3, 4, x).bounds().lo_scalar() == doctest::Approx(-1.0));
  CHECK(affine(3, 4, x).bounds().hi_scalar() == doctest::Approx(7.0));
}

TEST_CASE("taylor sin and cos") {
  const PolyZonotope at_half_pi(M_PI / 2.0);
  const PolyZonotope s = PolyZonotope::sin(at_half_pi);
  CHECK(s.n_terms() == 1);
  CHECK(s.center_scalar() == doctest::Approx(1.0));

  const PolyZonotope c = PolyZonotope::cos(PolyZonotope(0.0));
  CHECK(c.center_scalar() == doctest::Approx(1.0));
  CHECK(c.n_terms() == 1);

  // sin over 0.3 + 0.2 x contains 1e5 sampled values.
  const auto x = param_var(0);
  const PolyZonotope arg = affine(0.3, 0.2, x);
  const PolyZonotope sp = PolyZonotope::sin(arg, 6);
  const PolyZonotope cp = PolyZonotope::cos(arg, 6);
  Rng rng(32);
  Assignment asg;
  for (int s_i = 0; s_i < 100000; ++s_i) {
    const double xi = rng.symmetric();
    asg.set(x, xi);
    const double truth = std::sin(0.3 + 0.2 * xi);
    CHECK(sp.contains(MatX::Constant(1, 1, truth), asg, 1e-12));
    const double truth_c = std::cos(0.3 + 0.2 * xi);
    CHECK(cp.contains(MatX::Constant(1, 1, truth_c), asg, 1e-12));
  }
}

TEST_CASE("taylor containment over random inputs") {
  Rng rng(33);
  const auto vars = test_vars(3);
  for (int trial = 0; trial < 10; ++trial) {
    // Keep the input range below pi/2 wide.
    const auto p = random_pz(rng, 1, vars, 4, 2, 0.2);
    const auto sp = PolyZonotope::sin(p, 6);
    const auto cp = PolyZonotope::cos(p, 6);
    for (int s = 0; s < 2000; ++s) {
      const auto asg = random_assignment(rng, vars);
      const double v = p.evaluate(asg)(0, 0);
      CHECK(sp.contains(MatX::Constant(1, 1, std::sin(v)), asg, 1e-12));
      CHECK(cp.contains(MatX::Constant(1, 1, std::cos(v)), asg, 1e-12));
    }
  }
}

TEST_CASE("pz reduce") {
  Rng rng(34);
  const auto vars = test_vars(4);
  const auto small = random_pz(rng, 1, vars, 5);
  CHECK(small.reduce(40).n_terms() == small.n_terms());

  // 1-D PZ with 100 equal-magnitude terms keeps its bounds after reduction.
  std::vector<Term> terms;
  for (uint32_t i = 0; i < 100; ++i) {
    terms.push_back({MatX::Constant(1, 1, 1.0),
                     Monomial::var(param_var(0), i + 1)});
  }
  const auto wide = PolyZonotope::from_terms(1, 1, terms);
  const auto reduced = wide.reduce(40);
  CHECK(reduced.bounds().lo_scalar() == doctest::Approx(wide.bounds().lo_scalar()));
  CHECK(reduced.bounds().hi_scalar() == doctest::Approx(wide.bounds().hi_scalar()));

  // Sampled points of the original stay inside the reduced set.
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_pz(rng, 2, vars, 30);
    const auto r = p.reduce(10);
    CHECK(r.bounds().contains(p.bounds(), 1e-12));
    for (int s = 0; s < 300; ++s) {
      const auto asg = random_assignment(rng, vars);
      CHECK(r.contains(p.evaluate(asg), asg, 1e-10));
    }
  }
}

TEST_CASE("pz evaluate") {
  const auto x = param_var(0);
  Assignment asg;
  asg.set(x, -1.0);
  CHECK(affine(3, 4, x).evaluate(asg)(0, 0) == doctest::Approx(-1.0));

  const PolyZonotope p = PolyZonotope(1.0) - affine(0, 1, x) * affine(0, 1, x);
  Assignment zero;
  zero.set(x, 0.0);
  CHECK(p.evaluate(zero)(0, 0) == doctest::Approx(1.0));

  Assignment empty;
  CHECK_THROWS(affine(3, 4, x).evaluate(empty));
  CHECK_THROWS_AS(zero.set(x, 1.5), std::domain_error);
}

TEST_CASE("canonical form preserves evaluation") {
  Rng rng(35);
  const auto vars = test_vars(4);
  for (int trial = 0; trial < 20; ++trial) {
    // Duplicate monomials on purpose; from_terms merges them.
    std::vector<Term> raw;
    const auto base = random_pz(rng, 1, vars, 8);
    for (const auto& t : base.terms()) {
      raw.push_back({0.5 * t.coeff, t.mono});
      raw.push_back({0.5 * t.coeff, t.mono});
    }
    const auto canonical = PolyZonotope::from_terms(1, 1, raw);
    const auto asg = random_assignment(rng, vars);
    CHECK(canonical.evaluate(asg)(0, 0) ==
          doctest::Approx(base.evaluate(asg)(0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("add and mul associate on canonical forms") {
  Rng rng(36);
  const auto vars = test_vars(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_pz(rng, 1, vars, 4);
    const auto b = random_pz(rng, 1, vars, 4);
    const auto c = random_pz(rng, 1, vars, 4);
    const auto asg = random_assignment(rng, vars);
    CHECK(((a + b) + c).evaluate(asg)(0, 0) ==
          doctest::Approx((a + (b + c)).evaluate(asg)(0, 0)).epsilon(1e-12));
    CHECK(((a * b) * c).evaluate(asg)(0, 0) ==
          doctest::Approx((a * (b * c)).evaluate(asg)(0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("pz differentiate") {
  const auto x = param_var(0);
  const auto d1 = affine(3, 4, x).differentiate(x);
  CHECK(d1.n_terms() == 1);
  CHECK(d1.center_scalar() == doctest::Approx(4.0));

  const auto p = PolyZonotope(1.0) - affine(0, 1, x) * affine(0, 1, x);
  const auto d2 = p.differentiate(x);  // -2x
  Assignment asg;
  asg.set(x, 0.25);
  CHECK(d2.evaluate(asg)(0, 0) == doctest::Approx(-0.5));

  // Matches central finite differences of evaluate.
  Rng rng(37);
  const auto vars = test_vars(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_pz(rng, 1, vars, 6);
    const auto& id = vars[static_cast<size_t>(rng.uniform_int(3))];
    const auto dq = q.differentiate(id);
    Assignment a = random_assignment(rng, vars);
    const double x0 = 0.5 * a.at(id);  // keep x0 +- h inside the box
    const double h = 1e-6;
    a.set(id, x0 + h);
    const double up = q.evaluate(a)(0, 0);
    a.set(id, x0 - h);
    const double dn = q.evaluate(a)(0, 0);
    a.set(id, x0);
    const double analytic = dq.evaluate(a)(0, 0);
    const double fd = (up - dn) / (2 * h);
    CHECK(analytic == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("wpz dump round-trips bit-exact") {
  Rng rng(38);
  const auto vars = test_vars(5);
  std::vector<std::pair<std::string, PolyZonotope>> entries;
  entries.emplace_back("a", random_pz(rng, 3, vars, 10));
  entries.emplace_back("b", PolyZonotope::sin(random_pz(rng, 1, vars, 4, 2, 0.3)));
  entries.emplace_back("c", PolyZonotope(2.5));

  std::ostringstream os1;
  write_pz_dump(os1, entries);
  std::istringstream is(os1.str());
  const auto loaded = read_pz_dump(is);
  REQUIRE(loaded.size() == entries.size());
  std::ostringstream os2;
  write_pz_dump(os2, loaded);
  CHECK(os1.str() == os2.str());

  std::istringstream bad("nope");
  CHECK_THROWS(read_pz_dump(bad));
}
