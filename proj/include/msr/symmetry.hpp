// Infinitesimal Lie algebra actions by fundamental vector fields, covariant
// moment maps, level-set ideals, and prolongation of base fields to
// multiphase charts by solving L_v theta = 0 for the fiber components.
#pragma once

#include "msr/groebner.hpp"
#include "msr/linalg.hpp"
#include "msr/plectic.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace msr {

// A g-action given by fundamental fields and structure constants
// [xi_i, xi_j] = sum_k c[i][j][k] xi_k.  An empty constants table means
// abelian.
struct LieAlgebraAction {
    ChartPtr chart;
    std::vector<FieldExpr> basis_fields;
    std::vector<std::vector<std::vector<Rational>>> structure_constants;

    std::size_t dim() const { return basis_fields.size(); }

    Rational c(std::size_t i, std::size_t j, std::size_t k) const {
        if (structure_constants.empty()) return Rational(0);
        return structure_constants.at(i).at(j).at(k);
    }

    static LieAlgebraAction abelian(ChartPtr chart, std::vector<FieldExpr> fields) {
        LieAlgebraAction a;
        a.chart = std::move(chart);
        a.basis_fields = std::move(fields);
        return a;
    }
};

struct ActionReport {
    bool ok = true;
    std::vector<std::string> violations;
};

inline ActionReport verify_action(const LieAlgebraAction& a) {
    ActionReport rep;
    const std::size_t m = a.dim();
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };
    if (!a.structure_constants.empty()) {
        if (a.structure_constants.size() != m)
            fail("structure constant table does not match the basis size");
        // antisymmetry and the constants' own Jacobi identity
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t k = 0; k < m; ++k)
                    if (a.c(i, j, k) != -a.c(j, i, k)) {
                        std::ostringstream os;
                        os << "structure constants not antisymmetric at ("
                           << i << "," << j << "," << k << ")";
                        fail(os.str());
                    }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t l = 0; l < m; ++l) {
                        Rational s(0);
                        for (std::size_t t = 0; t < m; ++t)
                            s += a.c(i, j, t) * a.c(t, k, l) +
                                 a.c(j, k, t) * a.c(t, i, l) +
                                 a.c(k, i, t) * a.c(t, j, l);
                        if (s != 0) {
                            std::ostringstream os;
                            os << "structure constants violate Jacobi at ("
                               << i << "," << j << "," << k << ")";
                            fail(os.str());
                        }
                    }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            FieldExpr want = FieldExpr::zero(a.chart);
            for (std::size_t k = 0; k < m; ++k)
                want += a.c(i, j, k) * a.basis_fields[k];
            FieldExpr got = lie_bracket(a.basis_fields[i], a.basis_fields[j]);
            if (got != want) {
                std::ostringstream os;
                os << "[xi_" << i + 1 << ", xi_" << j + 1 << "] = " << got.str()
                   << " but the constants demand " << want.str();
                fail(os.str());
            }
        }
    return rep;
}

// mu assigns each basis element a form of degree n-1; phi (the level) is a
// closed form of the same degree per component, zero by default.
struct MomentMap {
    LieAlgebraAction action;
    std::vector<FormExpr> components;
    std::vector<FormExpr> level;

    static MomentMap at_zero_level(LieAlgebraAction a, std::vector<FormExpr> mu,
                                   unsigned n) {
        MomentMap m;
        m.level.assign(mu.size(), FormExpr::zero(a.chart, n - 1));
        m.action = std::move(a);
        m.components = std::move(mu);
        return m;
    }
};

struct MomentReport {
    bool ok = true;
    bool moment_identity = true; // d mu_xi = -iota_xi omega
    bool equivariance = true;    // L_xi mu_zeta = mu_[xi,zeta]
    std::vector<std::string> violations;
};

inline MomentReport check_covariant_moment_map(const PlecticStructure& p,
                                               const MomentMap& m) {
    MomentReport rep;
    const std::size_t dim = m.action.dim();
    auto fail = [&](bool& flag, std::string msg) {
        rep.ok = false;
        flag = false;
        rep.violations.push_back(std::move(msg));
    };
    if (m.components.size() != dim)
        throw EngineError("moment map component count does not match the action");
    if (!m.level.empty() && m.level.size() != dim)
        throw EngineError("level component count does not match the action");

    for (std::size_t i = 0; i < dim; ++i) {
        FormExpr residual = exterior_derivative(m.components[i]) +
                            interior_product(m.action.basis_fields[i], p.omega());
        if (!residual.is_zero())
            fail(rep.moment_identity,
                 "d mu_" + std::to_string(i + 1) + " + iota omega = " + residual.str());
        if (i < m.level.size() && !exterior_derivative(m.level[i]).is_zero())
            fail(rep.moment_identity,
                 "level component " + std::to_string(i + 1) + " is not closed");
    }
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            FormExpr lhs = lie_derivative(m.action.basis_fields[i], m.components[j]);
            FormExpr rhs = FormExpr::zero(m.action.chart, lhs.degree());
            for (std::size_t k = 0; k < dim; ++k)
                rhs += m.action.c(i, j, k) * m.components[k];
            if (lhs != rhs)
                fail(rep.equivariance,
                     "L_xi_" + std::to_string(i + 1) + " mu_" + std::to_string(j + 1) +
                         " != mu_[xi_" + std::to_string(i + 1) + ",xi_" +
                         std::to_string(j + 1) + "]");
        }
    return rep;
}

// With an invariant potential theta (d theta = omega, L_xi theta = 0), the
// contractions iota_xi theta assemble a covariant moment map at level zero.
inline MomentMap moment_from_potential(const PlecticStructure& p,
                                       const LieAlgebraAction& a,
                                       const FormExpr& theta) {
    if (exterior_derivative(theta) != p.omega())
        throw EngineError("not a potential: d theta differs from omega");
    std::vector<FormExpr> mu;
    mu.reserve(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        FormExpr lt = lie_derivative(a.basis_fields[i], theta);
        if (!lt.is_zero())
            throw EngineError("not invariant: L_xi_" + std::to_string(i + 1) +
                              " theta = " + lt.str());
        mu.push_back(interior_product(a.basis_fields[i], theta));
    }
    return MomentMap::at_zero_level(a, std::move(mu), p.n());
}

// Ideal of the equalizer mu^{-1}(phi): every coframe coefficient of every
// component difference.
inline Ideal level_set_ideal(const MomentMap& m,
                             MonomialOrder ord = MonomialOrder::grevlex) {
    std::vector<Poly> gens;
    for (std::size_t i = 0; i < m.components.size(); ++i) {
        FormExpr diff = m.components[i];
        if (i < m.level.size()) diff -= m.level[i];
        for (const auto& [t, coef] : diff.terms()) gens.push_back(coef);
    }
    return Ideal(m.action.chart, std::move(gens), ord);
}

// Declared fibration: base coordinates sit inside a multiphase total chart;
// sigma optionally marks source coordinates for the projectability test.
struct Fibration {
    ChartPtr base;
    ChartPtr total;
    std::vector<std::string> sigma;
};

namespace detail {

inline Poly embed_poly(const Poly& p, const ChartPtr& total,
                       const std::vector<std::size_t>& var_map) {
    Poly out = Poly::zero(total);
    for (const auto& [e, c] : p.terms()) {
        Exps te(total->dim(), 0);
        for (std::size_t i = 0; i < e.size(); ++i) te[var_map[i]] = e[i];
        out += Poly::monomial(total, te, c);
    }
    return out;
}

inline std::vector<Exps> base_monomials_upto(const ChartPtr& total,
                                             const std::vector<std::size_t>& base_ix,
                                             unsigned maxdeg) {
    std::vector<Exps> out;
    Exps current(total->dim(), 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t pos, unsigned left) {
        if (pos == base_ix.size()) {
            out.push_back(current);
            return;
        }
        for (unsigned d = 0; d <= left; ++d) {
            current[base_ix[pos]] = d;
            rec(pos + 1, left - d);
        }
        current[base_ix[pos]] = 0;
    };
    rec(0, maxdeg);
    return out;
}

} // namespace detail

// Lift a base vector field to the total chart so that L_v theta = 0, solving
// linearly for the fiber components.  The ansatz takes each fiber component
// affine in the fiber coordinates with base-polynomial coefficients, which
// covers canonical (multi)phase potentials.
inline FieldExpr prolong_field(const Fibration& fib, const FormExpr& theta,
                               const FieldExpr& v) {
    require_same_chart(fib.base, v.chart());
    require_same_chart(fib.total, theta.chart());

    std::vector<std::size_t> var_map; // base index -> total index
    for (const std::string& name : fib.base->vars) {
        int ti = fib.total->index_of(name);
        if (ti < 0)
            throw EngineError("fibration: base variable '" + name +
                              "' missing from the total chart");
        var_map.push_back(static_cast<std::size_t>(ti));
    }

    // projectability: sigma components may only depend on sigma variables
    if (!fib.sigma.empty()) {
        std::set<std::size_t> sigma_ix;
        for (const std::string& s : fib.sigma) {
            int bi = fib.base->index_of(s);
            if (bi < 0)
                throw EngineError("fibration: sigma variable '" + s +
                                  "' is not a base variable");
            sigma_ix.insert(static_cast<std::size_t>(bi));
        }
        for (std::size_t s : sigma_ix) {
            const Poly& comp = v.component(s);
            for (const auto& [e, c] : comp.terms())
                for (std::size_t i = 0; i < e.size(); ++i)
                    if (e[i] && !sigma_ix.count(i))
                        throw EngineError(
                            "not projectable: sigma component depends on a "
                            "fiber-direction base variable");
        }
    }

    // embed the base components; collect fiber coordinate indices
    std::vector<Poly> comps(fib.total->dim(), Poly::zero(fib.total));
    long vdeg = 0;
    for (std::size_t i = 0; i < fib.base->dim(); ++i) {
        comps[var_map[i]] = detail::embed_poly(v.component(i), fib.total, var_map);
        vdeg = std::max(vdeg, v.component(i).total_degree());
    }
    std::vector<bool> is_base(fib.total->dim(), false);
    for (std::size_t t : var_map) is_base[t] = true;
    std::vector<std::size_t> fiber_ix, base_ix;
    for (std::size_t i = 0; i < fib.total->dim(); ++i)
        (is_base[i] ? base_ix : fiber_ix).push_back(i);
    FieldExpr embedded(fib.total, comps);
    if (fiber_ix.empty()) {
        if (!lie_derivative(embedded, theta).is_zero())
            throw EngineError("no invariant lift: the potential obstructs the field");
        return embedded;
    }

    FormExpr rhs = -lie_derivative(embedded, theta);

    // When theta carries no fiber coframes -- true of every canonical
    // multiphase potential -- contraction is function-linear in the fiber
    // components, so
    //   L_v theta = L_emb theta + sum_f A_f iota_{e_f} dtheta
    // and the fiber components solve an exact module membership problem.
    bool fiber_coframe_free = true;
    for (std::size_t f : fiber_ix)
        if (!interior_product(FieldExpr::frame(fib.total, f), theta).is_zero()) {
            fiber_coframe_free = false;
            break;
        }
    if (fiber_coframe_free) {
        FormExpr dtheta = exterior_derivative(theta);
        std::vector<FormExpr> gen_forms;
        for (std::size_t f : fiber_ix)
            gen_forms.push_back(
                interior_product(FieldExpr::frame(fib.total, f), dtheta));

        std::map<IndexTuple, std::size_t> slot;
        for (const FormExpr& w : gen_forms)
            for (const auto& [t, c] : w.terms()) slot.emplace(t, slot.size());
        for (const auto& [t, c] : rhs.terms()) slot.emplace(t, slot.size());
        if (slot.empty()) {
            // nothing constrains the fiber components; the embedding serves
            if (!lie_derivative(embedded, theta).is_zero())
                throw EngineError("prolongation verification failed");
            return embedded;
        }
        auto to_vec = [&](const FormExpr& w) {
            PolyVec v = vec_zero(fib.total, slot.size());
            for (const auto& [t, c] : w.terms()) v[slot.at(t)] = c;
            return v;
        };
        std::vector<PolyVec> gens;
        gens.reserve(gen_forms.size());
        for (const FormExpr& w : gen_forms) gens.push_back(to_vec(w));
        SubmoduleBasis mod(fib.total, slot.size(), gens);
        auto mem = mod.contains(to_vec(rhs));
        if (!mem.member)
            throw EngineError(
                "no invariant lift: L_v theta = 0 has no polynomial solution");
        FieldExpr lift = embedded;
        for (std::size_t k = 0; k < fiber_ix.size(); ++k)
            lift += mem.witness[k] * FieldExpr::frame(fib.total, fiber_ix[k]);
        if (!lie_derivative(lift, theta).is_zero())
            throw EngineError("prolongation verification failed");
        return lift;
    }

    // Ansatz: each fiber component is affine in the fiber coordinates with
    // base-polynomial coefficients of bounded degree.  Start the bound at the
    // field's own degree and widen once before giving up.
    auto attempt = [&](unsigned maxdeg) -> std::optional<FieldExpr> {
        std::vector<Exps> monos =
            detail::base_monomials_upto(fib.total, base_ix, maxdeg);
        std::vector<Exps> ansatz_monos = monos;
        for (const Exps& m : monos)
            for (std::size_t f : fiber_ix) {
                Exps e = m;
                e[f] += 1;
                ansatz_monos.push_back(e);
            }

        struct Unknown {
            std::size_t fiber;
            Exps mono;
        };
        std::vector<Unknown> unknowns;
        std::vector<FormExpr> columns;
        for (std::size_t f : fiber_ix)
            for (const Exps& m : ansatz_monos) {
                FieldExpr bf = Poly::monomial(fib.total, m, Rational(1)) *
                               FieldExpr::frame(fib.total, f);
                FormExpr lb = lie_derivative(bf, theta);
                if (lb.is_zero()) continue; // contributes nothing; keep it out
                unknowns.push_back({f, m});
                columns.push_back(std::move(lb));
            }

        // assemble the sparse linear system over (index tuple, monomial) rows
        std::map<std::pair<IndexTuple, Exps>, std::size_t> row_ix;
        auto row_of = [&](const IndexTuple& t, const Exps& e) {
            auto key = std::make_pair(t, e);
            auto it = row_ix.find(key);
            if (it != row_ix.end()) return it->second;
            std::size_t r = row_ix.size();
            row_ix.emplace(std::move(key), r);
            return r;
        };
        std::vector<std::vector<std::pair<std::size_t, Rational>>> sparse_cols(
            columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j)
            for (const auto& [t, coef] : columns[j].terms())
                for (const auto& [e, c] : coef.terms())
                    sparse_cols[j].emplace_back(row_of(t, e), c);
        std::vector<Rational> b(row_ix.size(), Rational(0));
        for (const auto& [t, coef] : rhs.terms())
            for (const auto& [e, c] : coef.terms()) b[row_of(t, e)] = c;
        b.resize(row_ix.size(), Rational(0));

        QMatrix a(row_ix.size(), std::vector<Rational>(columns.size(), Rational(0)));
        for (std::size_t j = 0; j < sparse_cols.size(); ++j)
            for (const auto& [r, c] : sparse_cols[j]) a[r][j] += c;

        auto sol = solve_particular(a, b);
        if (!sol) return std::nullopt;
        FieldExpr lift = embedded;
        for (std::size_t j = 0; j < unknowns.size(); ++j) {
            if ((*sol)[j] == 0) continue;
            lift += Poly::monomial(fib.total, unknowns[j].mono, (*sol)[j]) *
                    FieldExpr::frame(fib.total, unknowns[j].fiber);
        }
        return lift;
    };

    unsigned d0 = static_cast<unsigned>(std::max<long>(vdeg, 1));
    std::optional<FieldExpr> lift = attempt(d0);
    if (!lift) lift = attempt(d0 + 2);
    if (!lift)
        throw EngineError("no invariant lift: L_v theta = 0 has no polynomial "
                          "solution in the ansatz degree bound");
    if (!lie_derivative(*lift, theta).is_zero())
        throw EngineError("prolongation verification failed");
    return *lift;
}

} // namespace msr
