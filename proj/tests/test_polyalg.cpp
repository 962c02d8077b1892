#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace msr;
using msr::testing::chart_field;
using msr::testing::chart_xy;
using msr::testing::random_point;
using msr::testing::random_poly;

TEST_CASE("arithmetic on small polynomials", "[polyalg]") {
    auto c = chart_xy();
    Poly x = Poly::variable(c, "x");
    Poly y = Poly::variable(c, "y");

    SECTION("sum collapses cancelling terms") {
        // (x+y) + (x-y) = 2x
        Poly s = (x + y) + (x - y);
        REQUIRE(s == Rational(2) * x);
        REQUIRE(s.terms().size() == 1);
    }

    SECTION("product of conjugates") {
        // (x+y)(x-y) = x^2 - y^2
        Poly p = (x + y) * (x - y);
        REQUIRE(p == x * x - y * y);
        REQUIRE(p.str() == "x^2 - y^2");
    }

    SECTION("multiplication by zero yields the canonical zero") {
        Poly z = (x * y) * Poly::zero(c);
        REQUIRE(z.is_zero());
        REQUIRE(z.terms().empty()); // no explicit zero coefficients stored
    }

    SECTION("scalar multiples and negation") {
        Poly p = Rational(3, 2) * x - y;
        REQUIRE((-p) + p == Poly::zero(c));
        REQUIRE((Rational(0) * p).is_zero());
    }

    SECTION("pow") {
        Poly b = x + Poly::constant(c, Rational(1));
        REQUIRE(b.pow(0) == Poly::constant(c, Rational(1)));
        REQUIRE(b.pow(3) == b * b * b);
    }
}

TEST_CASE("partial derivatives", "[polyalg]") {
    auto c = chart_xy();
    Poly x = Poly::variable(c, "x");
    Poly y = Poly::variable(c, "y");

    // d/dx (x^2 y) = 2xy
    REQUIRE((x * x * y).derivative("x") == Rational(2) * x * y);
    // d/dy (x^2 y) = x^2
    REQUIRE((x * x * y).derivative("y") == x * x);
    REQUIRE(Poly::constant(c, Rational(7)).derivative("x").is_zero());
    REQUIRE_THROWS_AS(x.derivative("q"), EngineError);

    auto cf = chart_field();
    Poly q = Poly::variable(cf, "q");
    REQUIRE((q * q).derivative("q") == Rational(2) * q);
}

TEST_CASE("evaluation", "[polyalg]") {
    auto c = chart_xy();
    Poly x = Poly::variable(c, "x");
    Poly y = Poly::variable(c, "y");
    Poly f = x * x * y - Rational(3) * y;

    // f(2,3) = 4*3 - 9 = 3
    REQUIRE(f.evaluate({Rational(2), Rational(3)}) == Rational(3));
    // rational point: f(1/2, 4) = 1 - 12 = -11
    REQUIRE(f.evaluate({Rational(1, 2), Rational(4)}) == Rational(-11));
    REQUIRE_THROWS_AS(f.evaluate({Rational(1)}), EngineError);
}

TEST_CASE("substitution", "[polyalg]") {
    auto cf = chart_field();
    Poly q = Poly::variable(cf, "q");
    Poly p1 = Poly::variable(cf, "p1");

    // q^2 p1 with q -> 0 vanishes
    Poly g = q * q * p1;
    REQUIRE(g.substitute({{"q", Poly::zero(cf)}}).is_zero());

    auto c = chart_xy();
    Poly x = Poly::variable(c, "x");
    Poly y = Poly::variable(c, "y");
    // xy with y -> x becomes x^2
    REQUIRE((x * y).substitute({{"y", x}}) == x * x);
    // simultaneous swap x<->y on x^2 - y
    Poly f = x * x - y;
    REQUIRE(f.substitute({{"x", y}, {"y", x}}) == y * y - x);
    REQUIRE_THROWS_AS(f.substitute({{"zz", x}}), EngineError);
}

TEST_CASE("printing is canonical", "[polyalg]") {
    auto c = chart_xy();
    Poly x = Poly::variable(c, "x");
    Poly y = Poly::variable(c, "y");

    REQUIRE(Poly::zero(c).str() == "0");
    REQUIRE(Poly::constant(c, Rational(-5, 3)).str() == "-5/3");
    REQUIRE((Rational(2) * x * y - x + Poly::constant(c, Rational(1))).str() ==
            "2*x*y - x + 1");
    // built in any order, same string
    Poly a = x * x + y;
    Poly b = y + x * x;
    REQUIRE(a.str() == b.str());
}

TEST_CASE("monomial order comparators", "[polyalg]") {
    // on (x,y,z): grevlex ranks x^2 > xy > y^2 > xz > yz > z^2 in degree 2
    Exps x2 = {2, 0, 0}, xy = {1, 1, 0}, y2 = {0, 2, 0}, xz = {1, 0, 1},
         yz = {0, 1, 1}, z2 = {0, 0, 2};
    auto less = [](const Exps& a, const Exps& b) {
        return mono_less(a, b, MonomialOrder::grevlex);
    };
    REQUIRE(less(xy, x2));
    REQUIRE(less(y2, xy));
    REQUIRE(less(xz, y2));
    REQUIRE(less(yz, xz));
    REQUIRE(less(z2, yz));
    // degree dominates
    REQUIRE(less(x2, Exps{1, 1, 1}));

    // lex: x beats any power of y
    REQUIRE(mono_less(Exps{0, 9, 0}, Exps{1, 0, 0}, MonomialOrder::lex));
    REQUIRE_FALSE(mono_less(Exps{1, 0, 0}, Exps{0, 9, 0}, MonomialOrder::lex));
}

TEST_CASE("ring laws on random polynomials", "[polyalg]") {
    std::mt19937 rng(20240811);
    auto c = chart_xy();
    for (int trial = 0; trial < 60; ++trial) {
        Poly f = random_poly(rng, c), g = random_poly(rng, c), h = random_poly(rng, c);
        REQUIRE(f + g == g + f);
        REQUIRE(f * g == g * f);
        REQUIRE((f + g) + h == f + (g + h));
        REQUIRE((f * g) * h == f * (g * h));
        REQUIRE(f * (g + h) == f * g + f * h);
        REQUIRE(f - f == Poly::zero(c));
    }
}

TEST_CASE("derivative is a derivation", "[polyalg]") {
    std::mt19937 rng(7);
    auto c = chart_field();
    for (int trial = 0; trial < 40; ++trial) {
        Poly f = random_poly(rng, c), g = random_poly(rng, c);
        for (const auto& v : c->vars) {
            // Leibniz: d(fg) = df g + f dg
            REQUIRE((f * g).derivative(v) ==
                    f.derivative(v) * g + f * g.derivative(v));
        }
        // mixed partials commute
        REQUIRE(f.derivative("q").derivative("p1") ==
                f.derivative("p1").derivative("q"));
    }
}

TEST_CASE("evaluation is a ring homomorphism", "[polyalg]") {
    std::mt19937 rng(99);
    auto c = chart_xy();
    for (int trial = 0; trial < 40; ++trial) {
        Poly f = random_poly(rng, c), g = random_poly(rng, c);
        auto pt = random_point(rng, c->dim());
        REQUIRE((f + g).evaluate(pt) == f.evaluate(pt) + g.evaluate(pt));
        REQUIRE((f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt));
    }
}

TEST_CASE("substitution commutes with evaluation", "[polyalg]") {
    std::mt19937 rng(123);
    auto c = chart_xy();
    for (int trial = 0; trial < 30; ++trial) {
        Poly f = random_poly(rng, c);
        Poly img = random_poly(rng, c, 2, 3);
        auto pt = random_point(rng, c->dim(), 3);
        // evaluate(f[x := img]) == evaluate f at (img(pt), pt_y)
        Rational lhs = f.substitute({{"x", img}}).evaluate(pt);
        Rational rhs = f.evaluate({img.evaluate(pt), pt[1]});
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("canonical representation has no zero terms", "[polyalg]") {
    std::mt19937 rng(5150);
    auto c = chart_xy();
    for (int trial = 0; trial < 60; ++trial) {
        Poly f = random_poly(rng, c), g = random_poly(rng, c);
        for (const Poly* p : {&f, &g}) {
            for (const auto& [e, coef] : p->terms()) REQUIRE(coef != 0);
        }
        Poly diff = f * g - g * f;
        REQUIRE(diff.terms().empty());
    }
}

TEST_CASE("chart mismatch is rejected", "[polyalg]") {
    Poly a = Poly::variable(chart_xy(), "x");
    Poly b = Poly::variable(msr::testing::chart_xyz(), "x");
    REQUIRE_THROWS_AS(a + b, EngineError);
    REQUIRE_THROWS_AS(a * b, EngineError);
}
