#include "helpers.hpp"
#include "msr/plectic.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace msr;
using msr::testing::chart_field;
using msr::testing::chart_xy;
using msr::testing::chart_xyz;
using msr::testing::random_poly;
using msr::testing::theta_field;
using msr::testing::v_field;

namespace {

PlecticStructure symplectic_plane() {
    auto c = chart_xy();
    return PlecticStructure(
        c, wedge(FormExpr::coframe(c, "x"), FormExpr::coframe(c, "y")), 1);
}

PlecticStructure field_structure() {
    auto c = chart_field();
    return PlecticStructure(c, exterior_derivative(theta_field()), 2);
}

// degree-0 observable from a function on a symplectic chart
Observable obs(const PlecticStructure& p, const Poly& f) {
    FormExpr a = FormExpr::scalar(f);
    return Observable::pair(p, hamiltonian_field_for(p, a), a);
}

// the four frame observables of the field structure, with hand-solved forms
std::vector<Observable> field_frame_sample(const PlecticStructure& p) {
    auto c = p.chart();
    Poly s1 = Poly::variable(c, "s1"), s2 = Poly::variable(c, "s2");
    Poly q = Poly::variable(c, "q");
    Poly p1 = Poly::variable(c, "p1"), p2 = Poly::variable(c, "p2");
    FormExpr ds1 = FormExpr::coframe(c, "s1"), ds2 = FormExpr::coframe(c, "s2");
    FormExpr dp = FormExpr::coframe(c, "p");
    FormExpr dp1 = FormExpr::coframe(c, "p1"), dp2 = FormExpr::coframe(c, "p2");
    return {
        Observable::pair(p, FieldExpr::frame(c, "s1"), -(s2 * dp) - q * dp1),
        Observable::pair(p, FieldExpr::frame(c, "s2"), s1 * dp - q * dp2),
        Observable::pair(p, FieldExpr::frame(c, "q"), -(p1 * ds1) - p2 * ds2),
        Observable::pair(p, FieldExpr::frame(c, "p"), -(s1 * ds2)),
    };
}

} // namespace

TEST_CASE("structure construction is validated", "[plectic]") {
    auto c = chart_xyz();
    Poly z = Poly::variable(c, "z");
    FormExpr dxdy = wedge(FormExpr::coframe(c, "x"), FormExpr::coframe(c, "y"));
    // z dx^dy is not closed
    REQUIRE_THROWS_AS(PlecticStructure(c, z * dxdy, 1), EngineError);
    // degree bookkeeping: a 2-form is not a 3-plectic structure
    REQUIRE_THROWS_AS(PlecticStructure(c, dxdy, 2), EngineError);
    REQUIRE_NOTHROW(PlecticStructure(c, dxdy, 1));
}

TEST_CASE("nondegeneracy certificates", "[plectic]") {
    SECTION("standard symplectic plane") {
        PlecticStructure p = symplectic_plane();
        REQUIRE(p.nondegenerate() == Tristate::yes);
        REQUIRE(p.certificate().rows.size() == 2);
        REQUIRE(p.certificate().minor != 0);
    }

    SECTION("canonical 2-plectic structure on the field chart") {
        PlecticStructure p = field_structure();
        REQUIRE(p.nondegenerate() == Tristate::yes);
        REQUIRE(p.certificate().rows.size() == 6);
    }

    SECTION("zero form fails with a frame witness") {
        auto c = chart_xy();
        PlecticStructure p(c, FormExpr::zero(c, 2), 1);
        REQUIRE(p.nondegenerate() == Tristate::no);
        REQUIRE(p.certificate().kernel == std::vector<Rational>{Rational(1), Rational(0)});
    }

    SECTION("rank drop at a sampled point") {
        auto c = chart_xy();
        Poly x = Poly::variable(c, "x");
        FormExpr omega = x * wedge(FormExpr::coframe(c, "x"), FormExpr::coframe(c, "y"));
        PlecticStructure p(c, omega, 1);
        REQUIRE(p.nondegenerate() == Tristate::no);
        // the witness is a genuine kernel vector at the recorded point
        const auto& cert = p.certificate();
        FieldExpr w(c, {Poly::constant(c, cert.kernel[0]),
                        Poly::constant(c, cert.kernel[1])});
        FormExpr contracted = interior_product(w, omega);
        for (const auto& [t, coef] : contracted.terms())
            REQUIRE(coef.evaluate(cert.point) == 0);
    }

    SECTION("everywhere nondegenerate without constant minor is unknown") {
        auto c = chart_xy();
        Poly x = Poly::variable(c, "x");
        Poly one = Poly::constant(c, Rational(1));
        FormExpr omega = (one + x * x) *
                         wedge(FormExpr::coframe(c, "x"), FormExpr::coframe(c, "y"));
        PlecticStructure p(c, omega, 1);
        REQUIRE(p.nondegenerate() == Tristate::unknown);
    }
}

TEST_CASE("hamiltonian field solver", "[plectic]") {
    PlecticStructure p = symplectic_plane();
    auto c = p.chart();
    Poly x = Poly::variable(c, "x");
    Poly y = Poly::variable(c, "y");

    SECTION("coordinate functions") {
        REQUIRE(hamiltonian_field_for(p, FormExpr::scalar(x)) ==
                FieldExpr::frame(c, "y"));
        REQUIRE(hamiltonian_field_for(p, FormExpr::scalar(y)) ==
                -FieldExpr::frame(c, "x"));
    }

    SECTION("closed forms get the zero field") {
        REQUIRE(hamiltonian_field_for(p, FormExpr::scalar(Poly::constant(c, Rational(5))))
                    .is_zero());
    }

    SECTION("the contraction of the potential recovers the prolonged field") {
        PlecticStructure pf = field_structure();
        FieldExpr V = v_field();
        FormExpr mu = interior_product(V, theta_field());
        REQUIRE(hamiltonian_field_for(pf, mu) == V);
        REQUIRE(hamiltonian_field_for(pf, -mu) == -V);
    }

    SECTION("inconsistent right-hand side is rejected") {
        PlecticStructure pf = field_structure();
        auto cf = pf.chart();
        Poly q = Poly::variable(cf, "q");
        FormExpr bad = q * FormExpr::coframe(cf, "p1");
        REQUIRE_THROWS_WITH(hamiltonian_field_for(pf, bad),
                            Catch::Matchers::ContainsSubstring("not Hamiltonian"));
    }

    SECTION("degenerate structures are refused") {
        auto cxy = chart_xy();
        PlecticStructure z(cxy, FormExpr::zero(cxy, 2), 1);
        REQUIRE_THROWS_WITH(hamiltonian_field_for(z, FormExpr::scalar(Poly::variable(cxy, "x"))),
                            Catch::Matchers::ContainsSubstring("degenerate"));
    }

    SECTION("solver roundtrip on random observables") {
        std::mt19937 rng(7212);
        for (int t = 0; t < 25; ++t) {
            Poly f = random_poly(rng, c, 3, 4);
            FieldExpr v = hamiltonian_field_for(p, FormExpr::scalar(f));
            REQUIRE(is_hamiltonian_pair(p, v, FormExpr::scalar(f)));
        }
        // and on the 2-plectic volume of R^3, where forms are 1-forms
        auto c3 = chart_xyz();
        FormExpr vol = wedge(wedge(FormExpr::coframe(c3, "x"), FormExpr::coframe(c3, "y")),
                             FormExpr::coframe(c3, "z"));
        PlecticStructure p3(c3, vol, 2);
        REQUIRE(p3.nondegenerate() == Tristate::yes);
        for (int t = 0; t < 25; ++t) {
            FormExpr a = msr::testing::random_form(rng, c3, 1);
            FieldExpr v = hamiltonian_field_for(p3, a);
            REQUIRE(is_hamiltonian_pair(p3, v, a));
        }
    }
}

TEST_CASE("hamiltonian pair predicate", "[plectic]") {
    PlecticStructure p = symplectic_plane();
    auto c = p.chart();
    Poly x = Poly::variable(c, "x");

    REQUIRE(is_hamiltonian_pair(p, FieldExpr::frame(c, "y"), FormExpr::scalar(x)));
    REQUIRE_FALSE(is_hamiltonian_pair(p, FieldExpr::frame(c, "x"), FormExpr::scalar(x)));

    SECTION("prolonged pair on the field structure") {
        PlecticStructure pf = field_structure();
        REQUIRE(is_hamiltonian_pair(pf, v_field(),
                                    interior_product(v_field(), theta_field())));
    }

    SECTION("works for degenerate structures") {
        PlecticStructure z(c, FormExpr::zero(c, 2), 1);
        REQUIRE(is_hamiltonian_pair(z, FieldExpr::frame(c, "x"),
                                    FormExpr::scalar(Poly::constant(c, Rational(3)))));
        REQUIRE_FALSE(is_hamiltonian_pair(z, FieldExpr::frame(c, "x"), FormExpr::scalar(x)));
    }

    SECTION("nondegeneracy pins the field") {
        FieldExpr v = hamiltonian_field_for(p, FormExpr::scalar(x));
        REQUIRE_FALSE(is_hamiltonian_pair(p, v + FieldExpr::frame(c, "x"),
                                          FormExpr::scalar(x)));
    }
}

TEST_CASE("koszul sign table", "[plectic]") {
    REQUIRE(koszul_sign(1) == 1);
    REQUIRE(koszul_sign(2) == 1);
    REQUIRE(koszul_sign(3) == -1);
    REQUIRE(koszul_sign(4) == -1);
    REQUIRE(koszul_sign(5) == 1);
    REQUIRE_THROWS_AS(koszul_sign(0), EngineError);
}

TEST_CASE("observable construction", "[plectic]") {
    PlecticStructure p = field_structure();
    auto c = p.chart();
    Poly q = Poly::variable(c, "q");

    // a pair must satisfy the defining relation exactly
    REQUIRE_THROWS_AS(Observable::pair(p, v_field(), FormExpr::coframe(c, "q")),
                      EngineError);
    Observable good = Observable::pair(p, v_field(),
                                       interior_product(v_field(), theta_field()));
    REQUIRE(good.degree() == 0);

    // lower observables: degree -1 carries a 0-form here
    Observable low = Observable::lower(p, -1, FormExpr::scalar(q));
    REQUIRE(low.degree() == -1);
    REQUIRE_THROWS_AS(Observable::lower(p, -2, FormExpr::scalar(q)), EngineError);
    REQUIRE_THROWS_AS(Observable::lower(p, -1, FormExpr::coframe(c, "q")), EngineError);
}

TEST_CASE("multibrackets", "[plectic]") {
    PlecticStructure p = symplectic_plane();
    auto c = p.chart();
    Poly x = Poly::variable(c, "x");
    Poly y = Poly::variable(c, "y");
    Observable ox = obs(p, x);
    Observable oy = obs(p, y);

    SECTION("unary bracket kills degree zero") {
        REQUIRE(multibracket(p, {ox}).is_zero());
    }

    SECTION("binary bracket of the coordinate pair") {
        Observable b = multibracket(p, {ox, oy});
        REQUIRE(b.degree() == 0);
        REQUIRE(b.field().is_zero());
        REQUIRE(b.form() == FormExpr::scalar(Poly::constant(c, Rational(1))));
    }

    SECTION("graded antisymmetry in degree zero") {
        std::mt19937 rng(3141);
        for (int t = 0; t < 15; ++t) {
            Observable a = obs(p, random_poly(rng, c, 3, 3));
            Observable b = obs(p, random_poly(rng, c, 3, 3));
            REQUIRE(multibracket(p, {a, b}) == -multibracket(p, {b, a}));
        }
    }

    SECTION("arity above n+1 collapses") {
        REQUIRE(multibracket(p, {ox, oy, ox}).is_zero());
    }

    PlecticStructure pf = field_structure();
    auto cf = pf.chart();
    auto sample = field_frame_sample(pf);
    const Observable& os1 = sample[0];
    const Observable& os2 = sample[1];
    const Observable& oq = sample[2];
    const Observable& op = sample[3];

    SECTION("unary bracket on lower degrees is the differential") {
        Poly q = Poly::variable(cf, "q");
        Observable low = Observable::lower(pf, -1, FormExpr::scalar(q));
        Observable d = multibracket(pf, {low});
        REQUIRE(d.degree() == 0);
        REQUIRE(d.field().is_zero());
        REQUIRE(d.form() == FormExpr::coframe(cf, "q"));
    }

    SECTION("ternary bracket on the field structure") {
        // no term of omega holds all three of ds1, ds2, dq
        REQUIRE(multibracket(pf, {os1, os2, oq}).is_zero());
        // but (s1, s2, p) contracts to the constant 1, scaled by sigma(3) = -1
        Observable b = multibracket(pf, {os1, os2, op});
        REQUIRE(b.degree() == -1);
        REQUIRE(b.form() == FormExpr::scalar(Poly::constant(cf, Rational(-1))));
    }

    SECTION("mixed degrees vanish for arity >= 2") {
        Observable low = Observable::lower(pf, -1,
                                           FormExpr::scalar(Poly::variable(cf, "q")));
        REQUIRE(multibracket(pf, {os1, low}).is_zero());
        REQUIRE(multibracket(pf, {low, os1, os2}).is_zero());
    }

    SECTION("ternary bracket picks up a sign under transposition") {
        Observable b123 = multibracket(pf, {os1, os2, op});
        Observable b213 = multibracket(pf, {os2, os1, op});
        REQUIRE(b123 == -b213);
    }

    SECTION("empty argument list is an error") {
        REQUIRE_THROWS_AS(multibracket(pf, {}), EngineError);
    }
}

TEST_CASE("leibniz bracket", "[plectic]") {
    PlecticStructure p = symplectic_plane();
    auto c = p.chart();
    Poly x = Poly::variable(c, "x");
    Poly y = Poly::variable(c, "y");
    Observable ox = obs(p, x);
    Observable oy = obs(p, y);

    SECTION("self bracket vanishes") {
        Observable s = leibniz_bracket(p, ox, ox);
        REQUIRE(s.is_zero());
    }

    SECTION("coordinate pair") {
        Observable b = leibniz_bracket(p, ox, oy);
        REQUIRE(b.field().is_zero());
        REQUIRE(b.form() == FormExpr::scalar(Poly::constant(c, Rational(1))));
    }

    SECTION("self bracket of the prolonged observable") {
        PlecticStructure pf = field_structure();
        Observable ov = Observable::pair(pf, v_field(),
                                         interior_product(v_field(), theta_field()));
        REQUIRE(leibniz_bracket(pf, ov, ov).is_zero());
    }

    SECTION("Leibniz identity on sample triples") {
        std::mt19937 rng(2024);
        std::vector<Observable> sample = {ox, oy, obs(p, x * y), obs(p, x + y),
                                          obs(p, random_poly(rng, c, 2, 3))};
        for (std::size_t i = 0; i < sample.size(); ++i)
            for (std::size_t j = 0; j < sample.size(); ++j)
                for (std::size_t k = 0; k < sample.size(); ++k) {
                    const Observable &a = sample[i], &b = sample[j], &cc = sample[k];
                    Observable lhs = leibniz_bracket(p, a, leibniz_bracket(p, b, cc));
                    Observable rhs = leibniz_bracket(p, leibniz_bracket(p, a, b), cc) +
                                     leibniz_bracket(p, b, leibniz_bracket(p, a, cc));
                    REQUIRE(lhs == rhs);
                }
    }

    SECTION("differs from the binary bracket by an exact term") {
        std::mt19937 rng(4096);
        for (int t = 0; t < 10; ++t) {
            Observable a = obs(p, random_poly(rng, c, 3, 3));
            Observable b = obs(p, random_poly(rng, c, 3, 3));
            FormExpr gap = leibniz_bracket(p, a, b).form() -
                           multibracket(p, {a, b}).form();
            REQUIRE(gap == exterior_derivative(interior_product(a.field(), b.form())));
        }
    }

    SECTION("degree mismatch is an error") {
        PlecticStructure pf = field_structure();
        Observable low = Observable::lower(pf, -1,
                                           FormExpr::scalar(Poly::variable(pf.chart(), "q")));
        auto sample = field_frame_sample(pf);
        REQUIRE_THROWS_AS(leibniz_bracket(pf, sample[0], low), EngineError);
    }
}

TEST_CASE("higher jacobi identities", "[plectic]") {
    SECTION("poisson algebra of the plane") {
        PlecticStructure p = symplectic_plane();
        auto c = p.chart();
        Poly x = Poly::variable(c, "x");
        Poly y = Poly::variable(c, "y");
        std::vector<Observable> sample = {obs(p, x), obs(p, y), obs(p, x + y),
                                          obs(p, x * y)};
        JacobiReport r = check_higher_jacobi(p, sample, 3);
        REQUIRE(r.ok());
        // arity 1: 4 multisets; arity 2: 10; arity 3: 20
        REQUIRE(r.identities_checked == 34);
    }

    SECTION("field structure up to arity four") {
        PlecticStructure pf = field_structure();
        auto sample = field_frame_sample(pf);
        JacobiReport r = check_higher_jacobi(pf, sample, 4);
        REQUIRE(r.ok());
        REQUIRE(r.identities_checked > 0);
    }

    SECTION("samples with lower-degree observables") {
        PlecticStructure pf = field_structure();
        auto cf = pf.chart();
        auto sample = field_frame_sample(pf);
        sample.push_back(Observable::lower(pf, -1, FormExpr::scalar(Poly::variable(cf, "q"))));
        sample.push_back(Observable::pair(pf, v_field(),
                                          interior_product(v_field(), theta_field())));
        JacobiReport r = check_higher_jacobi(pf, sample, 3);
        REQUIRE(r.ok());
    }

    SECTION("empty sample is vacuous") {
        PlecticStructure p = symplectic_plane();
        JacobiReport r = check_higher_jacobi(p, {}, 3);
        REQUIRE(r.ok());
        REQUIRE(r.identities_checked == 0);
    }

    SECTION("arity bound is enforced") {
        PlecticStructure p = symplectic_plane();
        REQUIRE_THROWS_AS(check_higher_jacobi(p, {}, 4), EngineError);
    }
}
