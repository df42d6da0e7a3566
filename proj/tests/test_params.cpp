#include "doctest.h"
#include "oracles.hpp"

#include "ratdyn/dynamics.hpp"
#include "ratdyn/params.hpp"

#include <cmath>
#include <limits>

using namespace ratdyn;

TEST_CASE("validate flags each kind of problem") {
  CHECK(validate({1, 1, 1, 1, 1, 1}).valid());
  CHECK(validate({1, 1, 1, 1, 1, 1}).strictly_positive);
  CHECK_FALSE(validate({1, 1, 1, 0, 1, 1}).strictly_positive);
  CHECK(validate({1, 1, 1, 0, 1, 1}).valid());

  auto neg = validate({1, -1, 1, 1, 1, 1});
  CHECK_FALSE(neg.nonnegative);
  CHECK_FALSE(neg.valid());
  CHECK(neg.problems.size() == 1);

  CHECK_FALSE(validate({1, 1, 1, 1, 0, 0}).denominator_ok);
  CHECK_FALSE(validate({0, 0, 0, 1, 1, 1}).numerator_ok);
  CHECK_FALSE(validate({std::numeric_limits<double>::quiet_NaN(), 1, 1, 1, 1, 1}).finite);
  CHECK_FALSE(validate({INFINITY, 1, 1, 1, 1, 1}).valid());
}

TEST_CASE("equilibrium is the fixed point and matches bisection") {
  oracle::Gen gen(11);
  for (int i = 0; i < 500; ++i) {
    const double p = gen.log_uniform(1e-2, 1e2), q = gen.log_uniform(1e-2, 1e2), r = gen.uniform(0, 50);
    const double y = equilibrium(p, q, r);
    CHECK(y > 0);
    CHECK(std::abs(oracle::f(p, q, r, y, y) - y) < 1e-12 * std::max(1.0, y));
    CHECK(std::abs(y - oracle::equilibrium_bisect(p, q, r)) < 1e-12 * std::max(1.0, y));
  }
  // p = q = r = 1: 2y^2 - 2y - 1 = 0.
  CHECK(equilibrium(1, 1, 1) == doctest::Approx((1 + std::sqrt(3.0)) / 2).epsilon(1e-15));
  CHECK(equilibrium(1, 1, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(equilibrium(1, -2, 1), std::domain_error);
}

TEST_CASE("make_norm and make_norm_l reject inadmissible input") {
  CHECK_NOTHROW(make_norm(1, 1, 0));
  CHECK_THROWS_AS(make_norm(0, 1, 1), std::domain_error);
  CHECK_THROWS_AS(make_norm(1, 0, 1), std::domain_error);
  CHECK_THROWS_AS(make_norm(1, 1, -0.1), std::domain_error);
  CHECK_NOTHROW(make_norm_l(2, 1, -0.5, 0.5));
  CHECK_THROWS_AS(make_norm_l(2, 1, -0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(make_norm_l(2, 1, -0.5, 0.0), std::domain_error);
  CHECK(std::string(to_string(Form::ThreeTwo)) == "3-2");
  CHECK(std::string(to_string(Form::ThreeTwoL)) == "3-2-L");
}

TEST_CASE("six-parameter orbits are conjugate to the L-form") {
  oracle::Gen gen(12);
  for (int i = 0; i < 100; ++i) {
    const Params33 v{gen.uniform(0.1, 5), gen.uniform(0.1, 5), gen.uniform(0.1, 5),
                     gen.uniform(0.1, 5), gen.uniform(0.1, 5), gen.uniform(0.1, 5)};
    const auto [norm, map] = to_pqr_l(v);
    CHECK(norm.form == Form::ThreeTwoL);
    CHECK(norm.L > 0);
    CHECK(norm.L < 1);
    CHECK(norm.q == doctest::Approx(v.B / v.C));
    const double x0 = gen.uniform(0.1, 10), x1 = gen.uniform(0.1, 10);
    // Direct iteration of the six-parameter map as the reference.
    double a = x0, b = x1;
    const Orbit o = simulate(norm, map.invert(x0), map.invert(x1), 100);
    CHECK(map.invert(x0) >= norm.L);
    for (std::size_t k = 2; k < o.length(); ++k) {
      const double c = (v.alpha + v.beta * b + v.gamma * a) / (v.A + v.B * b + v.C * a);
      a = b;
      b = c;
      CHECK(std::abs(map.apply(o.at(k)) - c) < 1e-9 * std::max(1.0, c));
    }
  }
  CHECK_THROWS_AS(to_pqr_l({1, 1, 1, 0, 1, 1}), std::domain_error);
}

TEST_CASE("A = 0 reduction scales by gamma / C") {
  const Params33 v{2, 3, 1.5, 0, 0.5, 2};
  const NormParams n = to_pqr(v);
  CHECK(n.p == doctest::Approx(2.0));
  CHECK(n.q == doctest::Approx(0.25));
  CHECK(n.r == doctest::Approx(2 * 2 / (1.5 * 1.5)));
  const double s = v.gamma / v.C;
  auto xs = simulate33(v, 1.3, 0.7, 50);
  const Orbit o = simulate(n, 1.3 / s, 0.7 / s, 50);
  for (std::size_t k = 0; k < xs.size(); ++k) CHECK(std::abs(s * o.at(k) - xs[k]) < 1e-12 * std::max(1.0, xs[k]));
  CHECK_THROWS_AS(to_pqr({1, 1, 1, 1, 1, 1}), std::domain_error);
  CHECK_THROWS_AS(to_pqr({1, 0, 1, 0, 1, 1}), std::domain_error);
}

TEST_CASE("z-form rescales orbits by 1/p and round-trips") {
  oracle::Gen gen(13);
  for (int i = 0; i < 50; ++i) {
    const NormParams n = make_norm(gen.uniform(0.2, 5), gen.uniform(0.2, 5), gen.uniform(0, 5));
    const ZForm z = to_zform(n);
    CHECK(z.u == doctest::Approx(n.equilibrium / n.p));
    // z' = (a + z + g z_-) / (b z + z_-) is the 3-2 map in z = y / p.
    const Orbit o = simulate(n, 1.0, 2.0, 30);
    double zm = 1.0 / n.p, zc = 2.0 / n.p;
    for (std::size_t k = 2; k < o.length(); ++k) {
      const double zn = (z.a + zc + z.g * zm) / (z.b * zc + zm);
      zm = zc;
      zc = zn;
      CHECK(zc * n.p == doctest::Approx(o.at(k)).epsilon(1e-12));
    }
    const NormParams back = from_zform(z);
    CHECK(back.p == doctest::Approx(n.p));
    CHECK(back.q == doctest::Approx(n.q));
    CHECK(back.r == doctest::Approx(n.r));
  }
  // u is the fixed point of the z-equation.
  const ZForm z = to_zform(make_norm(3, 0.5, 2));
  CHECK((z.a + z.u + z.g * z.u) / (z.b * z.u + z.u) == doctest::Approx(z.u));
}

TEST_CASE("json round trip keeps field names") {
  const Params33 v{1, 2, 3, 4, 5, 6};
  nlohmann::json j = v;
  CHECK(j.contains("alpha"));
  CHECK(j.contains("C"));
  CHECK(j.get<Params33>().gamma == 3);

  auto [norm, map] = to_pqr_l(v);
  nlohmann::json jn = norm;
  CHECK(jn.at("form") == "3-2-L");
  const NormParams back = jn.get<NormParams>();
  CHECK(back.p == norm.p);
  CHECK(back.L == norm.L);
  CHECK(back.origin.has_value());

  nlohmann::json jm = map;
  CHECK(jm.get<AffineMap>().scale == map.scale);

  nlohmann::json plain = make_norm(1, 2, 3);
  CHECK(plain.at("form") == "3-2");
  CHECK(plain.get<NormParams>().equilibrium == doctest::Approx(equilibrium(1, 2, 3)));
  CHECK_THROWS(nlohmann::json({{"form", "bogus"}, {"p", 1}, {"q", 1}, {"r", 1}}).get<NormParams>());
}
