// Shared fixtures for the unit tests: common charts and seeded random
// generators for polynomials, forms, and fields used by the property tests.
#pragma once

#include "msr/cartan.hpp"
#include "msr/poly.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace msr::testing {

inline ChartPtr chart_xy() {
    static ChartPtr c = make_chart("R2", {"x", "y"});
    return c;
}

inline ChartPtr chart_xyz() {
    static ChartPtr c = make_chart("R3", {"x", "y", "z"});
    return c;
}

// Six coordinates of the scalar-field example: base s1,s2 and fiber q,p,p1,p2.
inline ChartPtr chart_field() {
    static ChartPtr c = make_chart("field", {"s1", "s2", "q", "p", "p1", "p2"});
    return c;
}

inline Poly random_poly(std::mt19937& rng, const ChartPtr& c,
                        unsigned max_deg = 3, unsigned max_terms = 4,
                        long coeff_abs = 6) {
    std::uniform_int_distribution<unsigned> nterms(0, max_terms);
    std::uniform_int_distribution<unsigned> expo(0, max_deg);
    std::uniform_int_distribution<long> coeff(-coeff_abs, coeff_abs);
    Poly p = Poly::zero(c);
    unsigned n = nterms(rng);
    for (unsigned t = 0; t < n; ++t) {
        Exps e(c->dim(), 0);
        // keep total degree bounded so products stay small
        unsigned budget = max_deg;
        for (std::size_t i = 0; i < e.size() && budget; ++i) {
            unsigned k = expo(rng) % (budget + 1);
            e[i] = k;
            budget -= k;
        }
        p += Poly::monomial(c, e, Rational(coeff(rng)));
    }
    return p;
}

inline std::vector<Rational> random_point(std::mt19937& rng, std::size_t dim,
                                          long abs = 5) {
    std::uniform_int_distribution<long> v(-abs, abs);
    std::vector<Rational> pt;
    pt.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) pt.emplace_back(v(rng));
    return pt;
}

inline FormExpr random_form(std::mt19937& rng, const ChartPtr& c, unsigned degree,
                            unsigned max_terms = 3) {
    if (degree > c->dim()) return FormExpr::zero(c, degree);
    std::uniform_int_distribution<unsigned> nterms(0, max_terms);
    FormExpr a = FormExpr::zero(c, degree);
    unsigned n = nterms(rng);
    std::vector<unsigned> all(c->dim());
    std::iota(all.begin(), all.end(), 0u);
    for (unsigned t = 0; t < n; ++t) {
        std::shuffle(all.begin(), all.end(), rng);
        IndexTuple tup(all.begin(), all.begin() + degree);
        std::sort(tup.begin(), tup.end());
        Poly coef = random_poly(rng, c, 2, 2);
        a += FormExpr::from_terms(c, degree, {{tup, coef}});
    }
    return a;
}

inline FieldExpr random_field(std::mt19937& rng, const ChartPtr& c,
                              unsigned max_deg = 2) {
    std::vector<Poly> comps;
    std::uniform_int_distribution<int> keep(0, 2);
    for (std::size_t i = 0; i < c->dim(); ++i)
        comps.push_back(keep(rng) ? random_poly(rng, c, max_deg, 2) : Poly::zero(c));
    return FieldExpr(c, std::move(comps));
}

// The worked scalar-field potential p ds1^ds2 + p1 ds1^dq + p2 ds2^dq on the
// chart (s1, s2, q, p, p1, p2).
inline FormExpr theta_field() {
    auto c = chart_field();
    return FormExpr::from_terms(
        c, 2,
        {{{0, 1}, Poly::variable(c, "p")},
         {{0, 2}, Poly::variable(c, "p1")},
         {{1, 2}, Poly::variable(c, "p2")}});
}

// Prolongation of q^2 d/dq to the covariant phase-space chart.
inline FieldExpr v_field() {
    auto c = chart_field();
    Poly q = Poly::variable(c, "q");
    Poly p1 = Poly::variable(c, "p1");
    Poly p2 = Poly::variable(c, "p2");
    FieldExpr v = FieldExpr::zero(c);
    v += (q * q) * FieldExpr::frame(c, "q");
    v += (Rational(-2) * q * p1) * FieldExpr::frame(c, "p1");
    v += (Rational(-2) * q * p2) * FieldExpr::frame(c, "p2");
    return v;
}

} // namespace msr::testing
