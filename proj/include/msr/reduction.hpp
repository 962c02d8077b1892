// Constraint-set reduction: tangency, vanishing ideals of fields, forms, and
// observables, reducibility predicates, quotient equality, bounded-degree
// reduced bases, and the symplectic comparison predicates.
#pragma once

#include "msr/groebner.hpp"
#include "msr/symmetry.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace msr {

struct TangencyResult {
    bool tangent = true;
    std::size_t generator_index = 0; // first failing constraint generator
    std::optional<Poly> residual;    // v(g) that escaped the ideal
};

// Audit record attached to reducibility and vanishing queries.  A false
// verdict from the generator criterion means "not certified"; it upgrades to
// a disproof only when a counterexample point on the constraint set is found.
struct ReductionVerdict {
    bool reducible = false;
    bool in_vanishing_ideal = false;
    std::vector<std::string> certificates;
    std::optional<std::vector<Rational>> counterexample;
};

namespace detail {

// Tangent fields u satisfy u(g_j) = sum_k c_k g_k; solutions (u, c) are
// syzygies of the derivative columns joined with the constraint multiples.
inline SubmoduleBasis compute_tangent_module(const ChartPtr& chart, const Ideal& constraints) {
    const std::size_t dim = chart->dim();
    const auto& gens = constraints.generators();
    std::vector<PolyVec> fields;
    if (gens.empty()) {
        for (std::size_t i = 0; i < dim; ++i) {
            PolyVec e = vec_zero(chart, dim);
            e[i] = Poly::constant(chart, Rational(1));
            fields.push_back(std::move(e));
        }
        return SubmoduleBasis(chart, dim, fields);
    }
    const std::size_t m = gens.size();
    std::vector<PolyVec> columns;
    for (std::size_t i = 0; i < dim; ++i) {
        PolyVec col = vec_zero(chart, m);
        for (std::size_t j = 0; j < m; ++j) col[j] = gens[j].derivative(i);
        columns.push_back(std::move(col));
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
            PolyVec col = vec_zero(chart, m);
            col[j] = -gens[k];
            columns.push_back(std::move(col));
        }
    // project each syzygy onto its first dim coordinates: the field part
    for (const PolyVec& s : syzygy_basis(columns, chart, m)) {
        PolyVec f(s.begin(), s.begin() + static_cast<long>(dim));
        if (!vec_is_zero(f)) fields.push_back(std::move(f));
    }
    // the vanishing fields g * e_i always belong to the tangent module
    for (const Poly& g : gens)
        for (std::size_t i = 0; i < dim; ++i) {
            PolyVec e = vec_zero(chart, dim);
            e[i] = g;
            fields.push_back(std::move(e));
        }
    return SubmoduleBasis(chart, dim, fields);
}

inline SubmoduleBasis compute_sum_module(const ChartPtr& chart, const Ideal& constraints,
                                         const LieAlgebraAction& action) {
    const std::size_t dim = chart->dim();
    std::vector<PolyVec> gens;
    for (const FieldExpr& xi : action.basis_fields) gens.push_back(xi.components());
    for (const Poly& g : constraints.generators())
        for (std::size_t i = 0; i < dim; ++i) {
            PolyVec e = vec_zero(chart, dim);
            e[i] = g;
            gens.push_back(std::move(e));
        }
    return SubmoduleBasis(chart, dim, gens);
}

// Search the constraint variety for a point where r does not vanish: a
// certified disproof of "r vanishes on N".
inline std::optional<std::vector<Rational>> variety_counterexample(
    const Ideal& constraints, const Poly& r) {
    const std::size_t dim = constraints.chart()->dim();
    auto on_variety = [&](const std::vector<Rational>& pt) {
        for (const Poly& g : constraints.generators())
            if (g.evaluate(pt) != 0) return false;
        return true;
    };
    auto probe = [&](const std::vector<Rational>& pt)
        -> std::optional<std::vector<Rational>> {
        if (on_variety(pt) && r.evaluate(pt) != 0) return pt;
        return std::nullopt;
    };
    const long range = 2;
    double total = 1;
    for (std::size_t i = 0; i < dim; ++i) total *= 2 * range + 1;
    if (total <= 20000) {
        std::vector<long> odo(dim, -range);
        while (true) {
            std::vector<Rational> pt(odo.begin(), odo.end());
            if (auto hit = probe(pt)) return hit;
            std::size_t i = 0;
            while (i < dim && odo[i] == range) odo[i++] = -range;
            if (i == dim) break;
            ++odo[i];
        }
        return std::nullopt;
    }
    std::mt19937 rng(424242);
    std::uniform_int_distribution<long> val(-3, 3);
    for (int trial = 0; trial < 4000; ++trial) {
        std::vector<Rational> pt;
        pt.reserve(dim);
        for (std::size_t i = 0; i < dim; ++i) pt.emplace_back(val(rng));
        if (auto hit = probe(pt)) return hit;
    }
    return std::nullopt;
}

} // namespace detail

// The triple: an ambient plectic structure, a constraint ideal cutting out N,
// and an infinitesimal action tangent to N.  The tangent module and the
// module X_g(M) + I_X(N) are computed once at construction.
class ConstraintAction {
public:
    ConstraintAction(PlecticStructure plectic, Ideal constraints, LieAlgebraAction action);

    const PlecticStructure& plectic() const { return plectic_; }
    const Ideal& constraints() const { return constraints_; }
    const LieAlgebraAction& action() const { return action_; }
    const SubmoduleBasis& tangent_module() const { return tangent_; }
    const SubmoduleBasis& sum_module() const { return sum_; }

    // canonical tangent generators as vector fields
    const std::vector<FieldExpr>& tangent_generator_fields() const { return tangent_fields_; }

private:
    PlecticStructure plectic_;
    Ideal constraints_;
    LieAlgebraAction action_;
    SubmoduleBasis tangent_;
    SubmoduleBasis sum_;
    std::vector<FieldExpr> tangent_fields_;
};

inline TangencyResult is_tangent(const ConstraintAction& ca, const FieldExpr& v) {
    require_same_chart(ca.constraints().chart(), v.chart());
    const auto& gens = ca.constraints().generators();
    for (std::size_t j = 0; j < gens.size(); ++j) {
        Poly dg = v.apply(gens[j]);
        if (!ca.constraints().contains(dg).member)
            return TangencyResult{false, j, dg};
    }
    return TangencyResult{};
}

inline bool in_vanishing_field_ideal(const ConstraintAction& ca, const FieldExpr& v) {
    require_same_chart(ca.constraints().chart(), v.chart());
    for (const Poly& comp : v.components())
        if (!ca.constraints().contains(comp).member) return false;
    return true;
}

inline ModuleMembership in_fundamental_plus_vanishing(const ConstraintAction& ca,
                                                      const FieldExpr& v) {
    require_same_chart(ca.constraints().chart(), v.chart());
    return ca.sum_module().contains(v.components());
}

namespace detail {

struct FormIdealCheck {
    bool member = true;
    Poly residual;                  // first contraction that escaped I_N
    std::vector<std::size_t> tuple; // indices of the offending generators
};

// Generator criterion for the vanishing de Rham ideal: contract with every
// k-subset of the tangent generators and test the scalars in I_N.
// Multilinearity over the ring makes generator subsets sufficient.
inline FormIdealCheck form_ideal_check(const ConstraintAction& ca, const FormExpr& a) {
    FormIdealCheck res;
    res.residual = Poly::zero(ca.constraints().chart());
    if (a.is_zero()) return res;
    const unsigned k = a.degree();
    if (k == 0) {
        Poly s = a.scalar_part();
        if (!ca.constraints().contains(s).member) {
            res.member = false;
            res.residual = s;
        }
        return res;
    }
    const auto& gens = ca.tangent_generator_fields();
    if (gens.size() < k) return res; // every contraction degenerates to zero
    std::vector<std::size_t> idx(k);
    for (unsigned i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::vector<FieldExpr> args;
        args.reserve(k);
        for (std::size_t i : idx) args.push_back(gens[i]);
        Poly c = contract_all(args, a).scalar_part();
        if (!ca.constraints().contains(c).member) {
            res.member = false;
            res.residual = c;
            res.tuple = idx;
            return res;
        }
        // next k-combination in lexicographic order
        long pos = static_cast<long>(k) - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] ==
                               gens.size() - k + static_cast<std::size_t>(pos))
            --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < k; ++i)
            idx[i] = idx[i - 1] + 1;
    }
    return res;
}

inline std::string tuple_label(const ConstraintAction& ca,
                               const std::vector<std::size_t>& tuple) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i) os << ", ";
        os << ca.tangent_generator_fields()[tuple[i]].str();
    }
    os << ")";
    return os.str();
}

inline void note_form_failure(const ConstraintAction& ca, ReductionVerdict& verdict,
                              const std::string& label, const FormIdealCheck& chk) {
    std::ostringstream os;
    os << label << " contracted with " << tuple_label(ca, chk.tuple) << " gives "
       << chk.residual.str() << ", not certified in the constraint ideal";
    verdict.certificates.push_back(os.str());
    if (!verdict.counterexample)
        verdict.counterexample =
            variety_counterexample(ca.constraints(), chk.residual);
    if (verdict.counterexample)
        verdict.certificates.back() += " (counterexample point on N found)";
}

} // namespace detail

inline bool in_vanishing_form_ideal(const ConstraintAction& ca, const FormExpr& a) {
    require_same_chart(ca.constraints().chart(), a.chart());
    return detail::form_ideal_check(ca, a).member;
}

// A reducible form: L_xi a and iota_xi a vanish on N for every basis xi.
inline ReductionVerdict is_reducible_form(const ConstraintAction& ca, const FormExpr& a) {
    require_same_chart(ca.constraints().chart(), a.chart());
    ReductionVerdict verdict;
    verdict.reducible = true;
    const auto& fields = ca.action().basis_fields;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        auto lie = detail::form_ideal_check(ca, lie_derivative(fields[i], a));
        if (!lie.member) {
            verdict.reducible = false;
            detail::note_form_failure(ca, verdict,
                                      "L_xi_" + std::to_string(i + 1) + " alpha", lie);
        }
        auto con = detail::form_ideal_check(ca, interior_product(fields[i], a));
        if (!con.member) {
            verdict.reducible = false;
            detail::note_form_failure(
                ca, verdict, "iota_xi_" + std::to_string(i + 1) + " alpha", con);
        }
    }
    if (verdict.reducible)
        verdict.certificates.push_back(
            "all Lie derivatives and contractions along the action vanish on N");
    return verdict;
}

// A reducible field: tangent to N, and brackets with the action stay inside
// X_g(M) + I_X(N).
inline ReductionVerdict is_reducible_field(const ConstraintAction& ca, const FieldExpr& v) {
    require_same_chart(ca.constraints().chart(), v.chart());
    ReductionVerdict verdict;
    verdict.reducible = true;
    auto tan = is_tangent(ca, v);
    if (!tan.tangent) {
        verdict.reducible = false;
        std::ostringstream os;
        os << "not tangent: applying the field to constraint generator "
           << tan.generator_index + 1 << " gives " << tan.residual->str();
        verdict.certificates.push_back(os.str());
    }
    const auto& fields = ca.action().basis_fields;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        FieldExpr br = lie_bracket(v, fields[i]);
        auto mem = in_fundamental_plus_vanishing(ca, br);
        if (!mem.member) {
            verdict.reducible = false;
            std::ostringstream os;
            os << "[v, xi_" << i + 1 << "] = " << br.str()
               << " is not certified in X_g(M) + I_X(N)";
            verdict.certificates.push_back(os.str());
        }
    }
    if (verdict.reducible)
        verdict.certificates.push_back(
            "tangent to N with action brackets inside X_g(M) + I_X(N)");
    return verdict;
}

inline ReductionVerdict is_reducible_observable(const ConstraintAction& ca,
                                                const Observable& o) {
    if (o.degree() == 0) {
        ReductionVerdict field_part = is_reducible_field(ca, o.field());
        ReductionVerdict form_part = is_reducible_form(ca, o.form());
        ReductionVerdict verdict;
        verdict.reducible = field_part.reducible && form_part.reducible;
        verdict.certificates = std::move(field_part.certificates);
        for (auto& c : form_part.certificates)
            verdict.certificates.push_back(std::move(c));
        verdict.counterexample = form_part.counterexample;
        return verdict;
    }
    return is_reducible_form(ca, o.form());
}

namespace detail {

// the membership conditions of the vanishing observable ideal, without the
// reducibility precondition
inline ReductionVerdict vanishing_conditions(const ConstraintAction& ca,
                                             const Observable& o) {
    ReductionVerdict verdict;
    verdict.reducible = true;
    verdict.in_vanishing_ideal = true;
    if (o.degree() == 0) {
        auto mem = in_fundamental_plus_vanishing(ca, o.field());
        if (!mem.member) {
            verdict.in_vanishing_ideal = false;
            verdict.certificates.push_back(
                "the Hamiltonian field is not certified in X_g(M) + I_X(N)");
        } else {
            verdict.certificates.push_back("field certified in X_g(M) + I_X(N)");
        }
    }
    auto chk = form_ideal_check(ca, o.form());
    if (!chk.member) {
        verdict.in_vanishing_ideal = false;
        note_form_failure(ca, verdict, "the observable form", chk);
    } else {
        verdict.certificates.push_back("form certified in the vanishing de Rham ideal");
    }
    return verdict;
}

} // namespace detail

// Membership in the vanishing observable ideal; only reducible observables
// may be asked (the ideal lives inside the reducible subalgebra).
inline ReductionVerdict in_vanishing_observable_ideal(const ConstraintAction& ca,
                                                      const Observable& o) {
    ReductionVerdict red = is_reducible_observable(ca, o);
    if (!red.reducible)
        throw EngineError("not reducible: the vanishing observable ideal lives "
                          "inside the reducible subalgebra");
    return detail::vanishing_conditions(ca, o);
}

// Equality in the reduced algebra: the difference lies in the vanishing
// observable ideal.  Differences of reducible observables are reducible, so
// only the arguments need the precondition.
inline bool reduced_equal(const ConstraintAction& ca, const Observable& o1,
                          const Observable& o2) {
    if (!is_reducible_observable(ca, o1).reducible ||
        !is_reducible_observable(ca, o2).reducible)
        throw EngineError("not reducible: reduced equality needs reducible "
                          "representatives");
    return detail::vanishing_conditions(ca, o1 + (-o2)).in_vanishing_ideal;
}

namespace detail {

// Coordinates of an observable modulo the vanishing ideal: Groebner normal
// forms of the field components (against the sum module) and of all
// generator-tuple contractions of the form (against I_N).  Linear in the
// observable, and zero exactly on the vanishing conditions above.
using NfKey = std::tuple<int, std::size_t, Exps>;

inline std::map<NfKey, Rational> vanishing_coordinates(const ConstraintAction& ca,
                                                       const Observable& o) {
    std::map<NfKey, Rational> coords;
    if (o.degree() == 0) {
        PolyVec nf = ca.sum_module().normal_form(o.field().components());
        for (std::size_t i = 0; i < nf.size(); ++i)
            for (const auto& [e, c] : nf[i].terms()) coords[{0, i, e}] = c;
    }
    const FormExpr& a = o.form();
    if (a.is_zero()) return coords;
    const unsigned k = a.degree();
    if (k == 0) {
        Poly nf = ca.constraints().normal_form(a.scalar_part());
        for (const auto& [e, c] : nf.terms()) coords[{1, 0, e}] = c;
        return coords;
    }
    const auto& gens = ca.tangent_generator_fields();
    if (gens.size() < k) return coords;
    std::vector<std::size_t> idx(k);
    for (unsigned i = 0; i < k; ++i) idx[i] = i;
    std::size_t combo = 0;
    while (true) {
        std::vector<FieldExpr> args;
        for (std::size_t i : idx) args.push_back(gens[i]);
        Poly nf = ca.constraints().normal_form(contract_all(args, a).scalar_part());
        for (const auto& [e, c] : nf.terms()) coords[{1, combo, e}] = c;
        ++combo;
        long pos = static_cast<long>(k) - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] ==
                               gens.size() - k + static_cast<std::size_t>(pos))
            --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < k; ++i)
            idx[i] = idx[i - 1] + 1;
    }
    return coords;
}

// Incremental exact rank tracking over sparse rational vectors.
class RankTracker {
public:
    // true (and the vector is absorbed) when it enlarges the span
    bool absorb(std::map<NfKey, Rational> v) {
        for (const auto& [pivot, row] : rows_) {
            auto it = v.find(pivot);
            if (it == v.end() || it->second == 0) continue;
            Rational factor = it->second;
            for (const auto& [k, c] : row) {
                Rational& slot = v[k];
                slot -= factor * c;
                if (slot == 0) v.erase(k);
            }
        }
        for (auto it = v.begin(); it != v.end();) {
            if (it->second == 0)
                it = v.erase(it);
            else
                ++it;
        }
        if (v.empty()) return false;
        NfKey pivot = v.begin()->first;
        Rational lead = v.begin()->second;
        for (auto& [k, c] : v) c /= lead;
        rows_.emplace_back(pivot, std::move(v));
        return true;
    }

private:
    std::vector<std::pair<NfKey, std::map<NfKey, Rational>>> rows_;
};

inline std::vector<Exps> monomials_of_degree(const ChartPtr& chart, unsigned deg) {
    std::vector<Exps> out;
    Exps cur(chart->dim(), 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t pos, unsigned left) {
        if (pos + 1 == cur.size()) {
            cur[pos] = left;
            out.push_back(cur);
            cur[pos] = 0;
            return;
        }
        for (unsigned d = 0; d <= left; ++d) {
            cur[pos] = d;
            rec(pos + 1, left - d);
        }
        cur[pos] = 0;
    };
    if (chart->dim() == 0) return out;
    rec(0, deg);
    std::sort(out.begin(), out.end(), [](const Exps& a, const Exps& b) {
        return mono_less(a, b, MonomialOrder::grevlex);
    });
    return out;
}

} // namespace detail

// Independent reducible representatives drawn from a candidate list, modulo
// the vanishing observable ideal; earlier candidates win ties.
inline std::vector<Observable> reduced_basis_from_ansatz(
    const ConstraintAction& ca, const std::vector<Observable>& candidates) {
    std::vector<Observable> basis;
    detail::RankTracker rank;
    for (const Observable& o : candidates) {
        if (!is_reducible_observable(ca, o).reducible) continue;
        if (rank.absorb(detail::vanishing_coordinates(ca, o))) basis.push_back(o);
    }
    return basis;
}

// Symplectic enumeration: monomial observables of total degree <= d, filtered
// for reducibility and independence.  Ascending degree-then-order enumeration
// makes the representative choice canonical.
inline std::vector<Observable> reduced_basis_upto_degree(const ConstraintAction& ca,
                                                         unsigned d) {
    const PlecticStructure& p = ca.plectic();
    if (p.n() != 1)
        throw EngineError("reduced basis enumeration needs an ansatz space when "
                          "n > 1");
    std::vector<Observable> candidates;
    for (unsigned deg = 0; deg <= d; ++deg)
        for (const Exps& e : detail::monomials_of_degree(p.chart(), deg)) {
            Poly f = Poly::monomial(p.chart(), e, Rational(1));
            FormExpr alpha = FormExpr::scalar(f);
            FieldExpr v = FieldExpr::zero(p.chart());
            try {
                v = hamiltonian_field_for(p, alpha);
            } catch (const EngineError&) {
                continue; // no Hamiltonian field, hence not an observable
            }
            candidates.push_back(Observable::pair(p, v, alpha));
        }
    return reduced_basis_from_ansatz(ca, candidates);
}

struct SymplecticVerdicts {
    bool first_class = false;
    std::optional<bool> in_momentum_ideal; // absent without a declared moment map
    bool casimir_along_n = false;
    bool reducible = false;
    bool vanishing = false;
};

// The symplectic comparison predicates for a function on a (1-plectic,
// nondegenerate) phase space.  Convention: {f, h} = omega(v_f, v_h) = v_f(h).
inline SymplecticVerdicts symplectic_predicates(
    const ConstraintAction& ca, const Poly& f,
    const std::optional<Ideal>& momentum_ideal = std::nullopt) {
    const PlecticStructure& p = ca.plectic();
    if (p.n() != 1 || p.nondegenerate() != Tristate::yes)
        throw EngineError("not symplectic: these predicates need n = 1 and "
                          "nondegenerate omega");
    require_same_chart(p.chart(), f.chart());
    SymplecticVerdicts out;
    FieldExpr vf = hamiltonian_field_for(p, FormExpr::scalar(f));
    out.first_class = true;
    for (const Poly& g : ca.constraints().generators())
        if (!ca.constraints().contains(vf.apply(g)).member) {
            out.first_class = false;
            break;
        }
    if (momentum_ideal) out.in_momentum_ideal = momentum_ideal->contains(f).member;
    out.casimir_along_n = in_vanishing_field_ideal(ca, vf);
    Observable o = Observable::pair(p, vf, FormExpr::scalar(f));
    out.reducible = is_reducible_observable(ca, o).reducible;
    out.vanishing =
        out.reducible && detail::vanishing_conditions(ca, o).in_vanishing_ideal;
    return out;
}

struct DescentReport {
    bool ok = true;
    unsigned pairs_checked = 0;
    unsigned pairs_skipped = 0;
    std::vector<std::string> violations;
    std::vector<std::string> notes;
};

// Spot-check that products and Poisson brackets descend: reducibles stay
// reducible, and pairs touching the vanishing set stay in it.
inline DescentReport check_poisson_descent(const ConstraintAction& ca,
                                           const std::vector<Poly>& sample) {
    const PlecticStructure& p = ca.plectic();
    if (p.n() != 1 || p.nondegenerate() != Tristate::yes)
        throw EngineError("not symplectic: Poisson descent needs n = 1 and "
                          "nondegenerate omega");
    DescentReport rep;
    struct Entry {
        Poly f;
        FieldExpr v;
        bool reducible;
        bool vanishing;
    };
    std::vector<Entry> entries;
    for (const Poly& f : sample) {
        FieldExpr v = hamiltonian_field_for(p, FormExpr::scalar(f));
        Observable o = Observable::pair(p, v, FormExpr::scalar(f));
        bool red = is_reducible_observable(ca, o).reducible;
        bool van = red && detail::vanishing_conditions(ca, o).in_vanishing_ideal;
        entries.push_back({f, v, red, van});
    }
    auto classify = [&](const Poly& f, const char* what, bool need_vanishing,
                        const std::string& label) {
        FieldExpr v = hamiltonian_field_for(p, FormExpr::scalar(f));
        Observable o = Observable::pair(p, v, FormExpr::scalar(f));
        bool red = is_reducible_observable(ca, o).reducible;
        if (!red) {
            rep.ok = false;
            rep.violations.push_back(label + ": " + what + " is not reducible");
            return;
        }
        if (need_vanishing &&
            !detail::vanishing_conditions(ca, o).in_vanishing_ideal) {
            rep.ok = false;
            rep.violations.push_back(label + ": " + what +
                                     " escapes the vanishing set");
        }
    };
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i; j < entries.size(); ++j) {
            const Entry& a = entries[i];
            const Entry& b = entries[j];
            if (!a.reducible || !b.reducible) {
                ++rep.pairs_skipped;
                rep.notes.push_back("pair (" + a.f.str() + ", " + b.f.str() +
                                    ") skipped: not reducible");
                continue;
            }
            ++rep.pairs_checked;
            std::string label = "(" + a.f.str() + ", " + b.f.str() + ")";
            bool touch_vanishing = a.vanishing || b.vanishing;
            classify(a.f * b.f, "the product", touch_vanishing, label);
            classify(a.v.apply(b.f), "the Poisson bracket", touch_vanishing, label);
        }
    return rep;
}

// Assemble the constraint data of a level set mu = phi: restrict to the
// isotropy subalgebra of the level, take the level-set ideal, and verify the
// tangency and omega-reducibility conclusions by construction.
inline ConstraintAction check_level_set_reduction_inputs(const PlecticStructure& p,
                                                         const MomentMap& m) {
    auto rep = check_covariant_moment_map(p, m);
    if (!rep.ok)
        throw EngineError("moment map fails covariance: " +
                          (rep.violations.empty() ? std::string("unknown")
                                                  : rep.violations.front()));
    const std::size_t dim = m.action.dim();
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < dim; ++i) {
        bool isotropic = true;
        for (std::size_t j = 0; j < dim && isotropic; ++j) {
            FormExpr lhs = m.level.empty()
                               ? FormExpr::zero(m.action.chart, p.n() - 1)
                               : lie_derivative(m.action.basis_fields[i], m.level[j]);
            FormExpr rhs = FormExpr::zero(m.action.chart, p.n() - 1);
            if (!m.level.empty())
                for (std::size_t k = 0; k < dim; ++k)
                    rhs += m.action.c(i, j, k) * m.level[k];
            if (lhs != rhs) isotropic = false;
        }
        if (isotropic) keep.push_back(i);
    }
    LieAlgebraAction sub;
    sub.chart = m.action.chart;
    for (std::size_t i : keep) sub.basis_fields.push_back(m.action.basis_fields[i]);
    if (!m.action.structure_constants.empty()) {
        const std::size_t s = keep.size();
        sub.structure_constants.assign(
            s, std::vector<std::vector<Rational>>(s, std::vector<Rational>(s, Rational(0))));
        std::vector<long> back(dim, -1);
        for (std::size_t a = 0; a < s; ++a) back[keep[a]] = static_cast<long>(a);
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = 0; b < s; ++b)
                for (std::size_t k = 0; k < dim; ++k) {
                    Rational c = m.action.c(keep[a], keep[b], k);
                    if (c == 0) continue;
                    if (back[k] < 0)
                        throw EngineError("the isotropy condition does not select "
                                          "a subalgebra of the given basis");
                    sub.structure_constants[a][b][static_cast<std::size_t>(back[k])] = c;
                }
    }
    return ConstraintAction(p, level_set_ideal(m), std::move(sub));
}

inline ConstraintAction::ConstraintAction(PlecticStructure plectic, Ideal constraints,
                                          LieAlgebraAction action)
    : plectic_(std::move(plectic)),
      constraints_(std::move(constraints)),
      action_(std::move(action)),
      tangent_(detail::compute_tangent_module(plectic_.chart(), constraints_)),
      sum_(detail::compute_sum_module(plectic_.chart(), constraints_, action_)) {
    require_same_chart(plectic_.chart(), constraints_.chart());
    if (!action_.basis_fields.empty())
        require_same_chart(plectic_.chart(), action_.chart);
    for (const PolyVec& v : tangent_.basis())
        tangent_fields_.emplace_back(plectic_.chart(), v);
    for (std::size_t i = 0; i < action_.basis_fields.size(); ++i) {
        auto tan = is_tangent(*this, action_.basis_fields[i]);
        if (!tan.tangent) {
            std::ostringstream os;
            os << "action field " << i + 1
               << " is not tangent to the constraint set (witness: "
               << tan.residual->str() << ")";
            throw EngineError(os.str());
        }
    }
    auto omega_ok = is_reducible_form(*this, plectic_.omega());
    if (!omega_ok.reducible)
        throw EngineError("omega is not reducible over the constraint set: " +
                          (omega_ok.certificates.empty()
                               ? std::string("unknown")
                               : omega_ok.certificates.front()));
}

inline const SubmoduleBasis& tangent_generators(const ConstraintAction& ca) {
    return ca.tangent_module();
}

} // namespace msr
