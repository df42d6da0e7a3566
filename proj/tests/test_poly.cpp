#include "doctest.h"
#include "oracles.hpp"

#include "ratdyn/poly.hpp"

using namespace ratdyn::poly;

namespace {

struct Fixture {
  VarTablePtr vars = make_vars({"x", "y", "z"});
  Poly x = Poly::variable(vars, "x"), y = Poly::variable(vars, "y"), z = Poly::variable(vars, "z");
  Poly c(long n, long d = 1) const { return Poly(vars, Rational(n, d)); }
};

Rational Q(long n, long d) {
  Rational v(n, d);
  v.canonicalize();
  return v;
}

Rational rat(oracle::Gen& g) {
  Rational v(static_cast<long>(g.next() % 41) - 20, static_cast<long>(1 + g.next() % 9));
  v.canonicalize();
  return v;
}

Poly random_poly(const Fixture& f, oracle::Gen& g, int terms, unsigned max_exp) {
  Poly p(f.vars);
  for (int i = 0; i < terms; ++i) {
    Poly t = Poly(f.vars, rat(g));
    t *= f.x.pow(static_cast<unsigned>(g.next() % (max_exp + 1)));
    t *= f.y.pow(static_cast<unsigned>(g.next() % (max_exp + 1)));
    t *= f.z.pow(static_cast<unsigned>(g.next() % (max_exp + 1)));
    p += t;
  }
  return p;
}

}  // namespace

TEST_CASE("variable table") {
  auto v = make_vars({"a", "b"});
  CHECK(v->index("b") == 1);
  CHECK_FALSE(v->find("c"));
  CHECK_THROWS_AS(v->index("c"), std::out_of_range);
  std::vector<std::string> many;
  for (int i = 0; i < 17; ++i) many.push_back("v" + std::to_string(i));
  CHECK_THROWS(make_vars(many));
  CHECK_THROWS(make_vars({"a", "a"}));
}

TEST_CASE("arithmetic identities are structural") {
  Fixture f;
  CHECK((f.x + f.y) * (f.x - f.y) == f.x * f.x - f.y * f.y);
  CHECK((f.x + f.c(1)).pow(3) == f.x.pow(3) + f.x.pow(2).scaled(3) + f.x.scaled(3) + f.c(1));
  CHECK((f.x - f.x).is_zero());
  CHECK(f.c(5).is_constant());
  CHECK((f.x * f.y * f.y).total_degree() == 3);
  CHECK((f.x * f.y * f.y).degree_in(1) == 2);
  CHECK_FALSE((f.x * f.y).mentions(2));
  Monomial m;
  m.set_exponent(0, 1);
  m.set_exponent(1, 2);
  CHECK((f.x * f.y * f.y).scaled(Rational(3, 2)).coefficient(m) == Rational(3, 2));
}

TEST_CASE("evaluation is a ring homomorphism") {
  Fixture f;
  oracle::Gen g(41);
  for (int i = 0; i < 50; ++i) {
    const Poly a = random_poly(f, g, 6, 3), b = random_poly(f, g, 5, 2);
    const std::vector<Rational> pt{rat(g), rat(g), rat(g)};
    CHECK((a + b).eval(pt) == a.eval(pt) + b.eval(pt));
    CHECK((a - b).eval(pt) == a.eval(pt) - b.eval(pt));
    CHECK((a * b).eval(pt) == a.eval(pt) * b.eval(pt));
    Rational a3 = a.eval(pt);
    CHECK(a.pow(3).eval(pt) == a3 * a3 * a3);
  }
}

TEST_CASE("parse and to_string round trip") {
  Fixture f;
  oracle::Gen g(42);
  for (int i = 0; i < 30; ++i) {
    const Poly a = random_poly(f, g, 5, 3);
    CHECK(Poly::parse(f.vars, a.to_string()) == a);
  }
  CHECK(Poly::parse(f.vars, "2*x^2*y - 1/3*z + 4") == f.x * f.x * f.y * f.c(2) - f.z * f.c(1, 3) + f.c(4));
  CHECK_THROWS(Poly::parse(f.vars, "2*w"));
  CHECK_THROWS(Poly::parse(f.vars, "x^"));
}

TEST_CASE("substitution commutes with evaluation") {
  Fixture f;
  oracle::Gen g(43);
  for (int i = 0; i < 30; ++i) {
    const Poly a = random_poly(f, g, 6, 3), v = random_poly(f, g, 3, 2);
    const std::vector<Rational> pt{rat(g), rat(g), rat(g)};
    std::vector<Rational> moved = pt;
    moved[0] = v.eval(pt);
    CHECK(a.substitute(0, v).eval(pt) == a.eval(moved));
    moved = pt;
    moved[1] = Rational(2, 7);
    CHECK(a.specialize(1, Rational(2, 7)).eval(pt) == a.eval(moved));
  }
}

TEST_CASE("content and exact division") {
  Fixture f;
  const Poly a = (f.x.scaled(Rational(2, 3)) + f.y.scaled(Rational(4, 9)));
  CHECK(a.content() == Rational(2, 9));
  const Poly prod = (f.x + f.y) * (f.x - f.z + f.c(3));
  auto q = prod.divide_exact(f.x + f.y);
  REQUIRE(q);
  CHECK(*q == f.x - f.z + f.c(3));
  CHECK_FALSE(prod.divide_exact(f.x + f.c(7)));
}

TEST_CASE("coefficient report") {
  Fixture f;
  const Poly a = f.x.scaled(3) - f.y.scaled(Rational(5, 2)) + f.x * f.y * f.z;
  const auto r = a.coefficient_report();
  CHECK(r.n_terms == 3);
  CHECK(r.n_negative == 1);
  CHECK(r.min_coeff == Rational(-5, 2));
  CHECK(r.max_coeff == 3);
  CHECK(r.max_total_degree == 3);
  REQUIRE(r.negative_witness);
  CHECK(r.negative_witness->find("y") != std::string::npos);
}

TEST_CASE("rational functions") {
  Fixture f;
  const RatFn a(f.x, f.y + f.c(1)), b(f.c(1), f.x);
  const std::vector<Rational> pt{Rational(2), Rational(3), Rational(0)};
  CHECK((a + b).eval(pt) == 1);
  CHECK((a * b).eval(pt) == Rational(1, 4));
  CHECK((a / b).eval(pt) == Rational(1));
  CHECK((a - a).is_zero());
  CHECK(RatFn(f.x * f.c(2), f.y * f.c(2)).equivalent(RatFn(f.x, f.y)));
  CHECK_THROWS_AS(b.eval(std::vector<Rational>{0, 0, 0}), std::domain_error);
}

TEST_CASE("substitute_all clears each denominator factor once") {
  auto vars = make_vars({"x", "y", "s", "t"});
  auto V = [&](const char* n) { return Poly::variable(vars, n); };
  const Poly one(vars, Rational(1));
  const Poly ds = one + V("s");
  const Poly target = V("x") * V("x") * V("y") + V("x") - V("y");
  const Substitution subs[] = {{"x", RatFn(V("t"), ds), {{ds, 1}}}, {"y", RatFn(one, ds), {{ds, 1}}}};
  const auto res = substitute_all(target, subs);
  REQUIRE(res.den_factors.size() == 1);
  CHECK(res.den_factors[0].first == ds);
  CHECK(res.den_factors[0].second == 3);
  oracle::Gen g(44);
  for (int i = 0; i < 20; ++i) {
    const Rational s = Q(static_cast<long>(g.next() % 9), 1 + static_cast<long>(g.next() % 5));
    const Rational t = Q(static_cast<long>(g.next() % 9), 1 + static_cast<long>(g.next() % 5));
    const std::vector<Rational> pt{0, 0, s, t};
    const Rational x = t / (1 + s), y = 1 / (1 + s);
    CHECK(res.value.eval(pt) == x * x * y + x - y);
  }
  CHECK(substitute(RatFn(target), subs).equivalent(res.value));
}

TEST_CASE("compose_map iterates a rational map") {
  auto vars = make_vars({"x", "y"});
  const Poly x = Poly::variable(vars, "x"), y = Poly::variable(vars, "y"), one(vars, Rational(1));
  const std::pair<RatFn, RatFn> T{RatFn(y), RatFn(one + y, x)};  // Lyness, period 5
  std::pair<RatFn, RatFn> it{RatFn(x), RatFn(y)};
  for (int k = 0; k < 5; ++k) it = compose_map(T, it, "x", "y");
  const std::vector<Rational> pt{Rational(3, 2), Rational(5, 7)};
  CHECK(it.first.eval(pt) == pt[0]);
  CHECK(it.second.eval(pt) == pt[1]);
}

TEST_CASE("products do not depend on the thread count") {
  Fixture f;
  oracle::Gen g(45);
  const Poly a = random_poly(f, g, 300, 12), b = random_poly(f, g, 300, 12);
  set_threads(1);
  const Poly one = a * b;
  set_threads(4);
  const Poly four = a * b;
  set_threads(0);
  CHECK(one == four);
  CHECK(one.to_string() == four.to_string());
}
