// Buchberger-style Groebner machinery for ideals in Q[x1..xm] and for
// submodules of free modules R^s (position-over-term order).  Division keeps
// quotient witnesses so every membership verdict can print a certificate.
#pragma once

#include "msr/poly.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

namespace msr {

// ---------------------------------------------------------------------------
// ideal side
// ---------------------------------------------------------------------------

struct DivisionResult {
    std::vector<Poly> quotients; // one per divisor
    Poly remainder;
};

namespace detail {

inline std::pair<Exps, Rational> leading_term(const Poly& p, MonomialOrder ord) {
    const Exps* e = p.leading_exps(ord);
    if (!e) throw EngineError("leading term of zero polynomial");
    return {*e, p.terms().at(*e)};
}

} // namespace detail

// Multivariate division: f = sum q_k * divisors_k + r, no term of r divisible
// by any divisor's leading term.
inline DivisionResult divide(const Poly& f, const std::vector<Poly>& divisors,
                             MonomialOrder ord) {
    DivisionResult res;
    res.quotients.assign(divisors.size(), Poly::zero(f.chart()));
    res.remainder = Poly::zero(f.chart());
    Poly work = f;
    while (!work.is_zero()) {
        auto [we, wc] = detail::leading_term(work, ord);
        bool reduced = false;
        for (std::size_t k = 0; k < divisors.size(); ++k) {
            if (divisors[k].is_zero()) continue;
            auto [ge, gc] = detail::leading_term(divisors[k], ord);
            if (!exps_divides(ge, we)) continue;
            Poly m = Poly::monomial(f.chart(), exps_quotient(we, ge), wc / gc);
            res.quotients[k] += m;
            work -= m * divisors[k];
            reduced = true;
            break;
        }
        if (!reduced) {
            Poly t = Poly::monomial(f.chart(), we, wc);
            res.remainder += t;
            work -= t;
        }
    }
    return res;
}

inline Poly normal_form(const Poly& f, const std::vector<Poly>& basis,
                        MonomialOrder ord) {
    return divide(f, basis, ord).remainder;
}

namespace detail {

// Basis element together with its expression in the original generators.
struct Tracked {
    Poly p;
    std::vector<Poly> rep; // p = sum rep_j * gens_j
};

inline void tracked_divide(Tracked& f, const std::vector<Tracked>& basis,
                           MonomialOrder ord) {
    Poly work = f.p;
    Poly rem = Poly::zero(f.p.chart());
    while (!work.is_zero()) {
        auto [we, wc] = leading_term(work, ord);
        bool reduced = false;
        for (const Tracked& g : basis) {
            if (g.p.is_zero()) continue;
            auto [ge, gc] = leading_term(g.p, ord);
            if (!exps_divides(ge, we)) continue;
            Poly m = Poly::monomial(work.chart(), exps_quotient(we, ge), wc / gc);
            work -= m * g.p;
            for (std::size_t j = 0; j < f.rep.size(); ++j) f.rep[j] -= m * g.rep[j];
            reduced = true;
            break;
        }
        if (!reduced) {
            Poly t = Poly::monomial(work.chart(), we, wc);
            rem += t;
            work -= t;
        }
    }
    f.p = rem;
}

// Buchberger with the coprime-leading-term and chain criteria, normal
// selection (smallest lcm first).  Returns the reduced monic basis, each
// element carrying its representation in the input generators.
inline std::vector<Tracked> buchberger_tracked(const ChartPtr& chart,
                                               const std::vector<Poly>& gens,
                                               MonomialOrder ord) {
    std::vector<Tracked> basis;
    for (std::size_t j = 0; j < gens.size(); ++j) {
        if (gens[j].is_zero()) continue;
        Tracked t{gens[j], std::vector<Poly>(gens.size(), Poly::zero(chart))};
        t.rep[j] = Poly::constant(chart, Rational(1));
        basis.push_back(std::move(t));
    }

    auto pair_key = [&](std::size_t i, std::size_t j) {
        auto [ei, ci] = leading_term(basis[i].p, ord);
        auto [ej, cj] = leading_term(basis[j].p, ord);
        return exps_lcm(ei, ej);
    };
    auto pair_less = [ord](const std::tuple<Exps, std::size_t, std::size_t>& a,
                           const std::tuple<Exps, std::size_t, std::size_t>& b) {
        const auto& [ea, ia, ja] = a;
        const auto& [eb, ib, jb] = b;
        if (ea != eb) return mono_less(ea, eb, ord);
        if (ia != ib) return ia < ib;
        return ja < jb;
    };
    std::set<std::tuple<Exps, std::size_t, std::size_t>, decltype(pair_less)>
        pending(pair_less);
    std::set<std::pair<std::size_t, std::size_t>> pending_ix;
    auto push_pair = [&](std::size_t i, std::size_t j) {
        pending.insert({pair_key(i, j), i, j});
        pending_ix.insert({i, j});
    };
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j) push_pair(i, j);

    while (!pending.empty()) {
        auto [lcm, i, j] = *pending.begin();
        pending.erase(pending.begin());
        pending_ix.erase({i, j});

        auto [ei, ci] = leading_term(basis[i].p, ord);
        auto [ej, cj] = leading_term(basis[j].p, ord);
        // coprime criterion: lcm equals the product of the leading monomials
        if (lcm == exps_mul(ei, ej)) continue;
        // chain criterion, strict variant: some k with LT(k) | lcm(i,j), both
        // side lcms strictly smaller, and both side pairs already treated.
        // Strictness keeps the elimination order well-founded.
        bool chained = false;
        for (std::size_t k = 0; k < basis.size() && !chained; ++k) {
            if (k == i || k == j) continue;
            auto [ek, ck] = leading_term(basis[k].p, ord);
            if (!exps_divides(ek, lcm)) continue;
            if (exps_lcm(ei, ek) == lcm || exps_lcm(ej, ek) == lcm) continue;
            auto mk = [&](std::size_t a, std::size_t b) {
                return std::make_pair(std::min(a, b), std::max(a, b));
            };
            if (!pending_ix.count(mk(i, k)) && !pending_ix.count(mk(j, k)))
                chained = true;
        }
        if (chained) continue;

        Poly mi = Poly::monomial(chart, exps_quotient(lcm, ei), Rational(1) / ci);
        Poly mj = Poly::monomial(chart, exps_quotient(lcm, ej), Rational(1) / cj);
        Tracked s;
        s.p = mi * basis[i].p - mj * basis[j].p;
        s.rep.assign(gens.size(), Poly::zero(chart));
        for (std::size_t t = 0; t < gens.size(); ++t)
            s.rep[t] = mi * basis[i].rep[t] - mj * basis[j].rep[t];
        tracked_divide(s, basis, ord);
        if (s.p.is_zero()) continue;
        std::size_t n = basis.size();
        basis.push_back(std::move(s));
        for (std::size_t k = 0; k < n; ++k) push_pair(k, n);
    }

    // minimalize: drop elements whose leading term another element divides
    std::vector<Tracked> minimal;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        auto [ei, ci] = leading_term(basis[i].p, ord);
        bool redundant = false;
        for (std::size_t j = 0; j < basis.size() && !redundant; ++j) {
            if (i == j) continue;
            auto [ej, cj] = leading_term(basis[j].p, ord);
            if (ej == ei)
                redundant = j < i; // keep the earliest of equal leading terms
            else
                redundant = exps_divides(ej, ei);
        }
        if (!redundant) minimal.push_back(basis[i]);
    }

    // tail-reduce each element against the others, then normalize monic
    for (std::size_t i = 0; i < minimal.size(); ++i) {
        std::vector<Tracked> others;
        for (std::size_t j = 0; j < minimal.size(); ++j)
            if (j != i) others.push_back(minimal[j]);
        tracked_divide(minimal[i], others, ord);
        auto [e, c] = leading_term(minimal[i].p, ord);
        if (c != 1) {
            Rational inv = Rational(1) / c;
            minimal[i].p = inv * minimal[i].p;
            for (Poly& r : minimal[i].rep) r = inv * r;
        }
    }
    std::sort(minimal.begin(), minimal.end(),
              [ord](const Tracked& a, const Tracked& b) {
                  return mono_less(*a.p.leading_exps(ord), *b.p.leading_exps(ord), ord);
              });
    return minimal;
}

} // namespace detail

struct IdealMembership {
    bool member = false;
    std::vector<Poly> witness; // candidate = sum witness_j * generators_j
};

// An ideal of Q[chart], held by an explicit generating set.  The reduced
// monic Groebner basis is computed eagerly, with representation tracking so
// membership witnesses refer back to the original generators.
class Ideal {
public:
    Ideal(ChartPtr chart, std::vector<Poly> gens,
          MonomialOrder ord = MonomialOrder::grevlex)
        : chart_(std::move(chart)), gens_(std::move(gens)), ord_(ord) {
        for (const Poly& g : gens_) require_same_chart(chart_, g.chart());
        auto tracked = detail::buchberger_tracked(chart_, gens_, ord_);
        for (auto& t : tracked) {
            basis_.push_back(std::move(t.p));
            reps_.push_back(std::move(t.rep));
        }
    }

    const ChartPtr& chart() const { return chart_; }
    MonomialOrder order() const { return ord_; }
    const std::vector<Poly>& generators() const { return gens_; }
    const std::vector<Poly>& basis() const { return basis_; }

    bool is_zero_ideal() const { return basis_.empty(); }
    bool is_unit_ideal() const {
        return basis_.size() == 1 && basis_[0].is_constant();
    }

    Poly normal_form(const Poly& f) const {
        require_same_chart(chart_, f.chart());
        return msr::normal_form(f, basis_, ord_);
    }

    IdealMembership contains(const Poly& f) const {
        require_same_chart(chart_, f.chart());
        DivisionResult d = divide(f, basis_, ord_);
        IdealMembership m;
        m.member = d.remainder.is_zero();
        if (m.member) {
            m.witness.assign(gens_.size(), Poly::zero(chart_));
            for (std::size_t k = 0; k < basis_.size(); ++k)
                for (std::size_t j = 0; j < gens_.size(); ++j)
                    m.witness[j] += d.quotients[k] * reps_[k][j];
        }
        return m;
    }

    bool contains_ideal(const Ideal& other) const {
        for (const Poly& g : other.gens_)
            if (!normal_form(g).is_zero()) return false;
        return true;
    }

    bool same_ideal(const Ideal& other) const {
        return contains_ideal(other) && other.contains_ideal(*this);
    }

private:
    ChartPtr chart_;
    std::vector<Poly> gens_;
    MonomialOrder ord_;
    std::vector<Poly> basis_;
    std::vector<std::vector<Poly>> reps_; // basis_k = sum reps_[k][j] * gens_j
};

inline std::vector<Poly> groebner_basis(const std::vector<Poly>& gens,
                                        const ChartPtr& chart,
                                        MonomialOrder ord = MonomialOrder::grevlex) {
    return Ideal(chart, gens, ord).basis();
}

// ---------------------------------------------------------------------------
// module side: submodules of R^s under position-over-term order (e_0 largest)
// ---------------------------------------------------------------------------

using PolyVec = std::vector<Poly>;

inline PolyVec vec_zero(const ChartPtr& c, std::size_t rank) {
    return PolyVec(rank, Poly::zero(c));
}

inline bool vec_is_zero(const PolyVec& v) {
    for (const Poly& p : v)
        if (!p.is_zero()) return false;
    return true;
}

inline PolyVec vec_add(PolyVec a, const PolyVec& b) {
    if (a.size() != b.size()) throw EngineError("module vector length mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline PolyVec vec_sub(PolyVec a, const PolyVec& b) {
    if (a.size() != b.size()) throw EngineError("module vector length mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline PolyVec vec_scale(const Poly& s, PolyVec v) {
    for (Poly& p : v) p = s * p;
    return v;
}

namespace detail {

struct ModLead {
    std::size_t pos;
    Exps e;
    Rational c;
};

// Leading module term under POT: the first nonzero component dominates.
inline std::optional<ModLead> vec_lead(const PolyVec& v, MonomialOrder ord) {
    for (std::size_t pos = 0; pos < v.size(); ++pos) {
        if (v[pos].is_zero()) continue;
        auto [e, c] = leading_term(v[pos], ord);
        return ModLead{pos, e, c};
    }
    return std::nullopt;
}

struct TrackedVec {
    PolyVec v;
    std::vector<Poly> rep;
};

inline void tracked_vec_divide(TrackedVec& f, const std::vector<TrackedVec>& basis,
                               MonomialOrder ord, const ChartPtr& chart) {
    PolyVec work = f.v;
    PolyVec rem = vec_zero(chart, f.v.size());
    while (auto wl = vec_lead(work, ord)) {
        bool reduced = false;
        for (const TrackedVec& g : basis) {
            auto gl = vec_lead(g.v, ord);
            if (!gl || gl->pos != wl->pos || !exps_divides(gl->e, wl->e)) continue;
            Poly m = Poly::monomial(chart, exps_quotient(wl->e, gl->e), wl->c / gl->c);
            work = vec_sub(std::move(work), vec_scale(m, g.v));
            for (std::size_t j = 0; j < f.rep.size(); ++j) f.rep[j] -= m * g.rep[j];
            reduced = true;
            break;
        }
        if (!reduced) {
            Poly t = Poly::monomial(chart, wl->e, wl->c);
            rem[wl->pos] += t;
            work[wl->pos] -= t;
        }
    }
    f.v = rem;
}

// Module Buchberger.  Pairs only form between elements with the same leading
// position; the ideal-case pair criteria are not sound here, so none are used
// (the bases in play are small enough not to care).
inline std::vector<TrackedVec> module_buchberger_tracked(
    const ChartPtr& chart, std::size_t rank, const std::vector<PolyVec>& gens,
    MonomialOrder ord) {
    std::vector<TrackedVec> basis;
    for (std::size_t j = 0; j < gens.size(); ++j) {
        if (gens[j].size() != rank)
            throw EngineError("module generator has wrong length");
        if (vec_is_zero(gens[j])) continue;
        TrackedVec t{gens[j], std::vector<Poly>(gens.size(), Poly::zero(chart))};
        t.rep[j] = Poly::constant(chart, Rational(1));
        basis.push_back(std::move(t));
    }

    std::vector<std::pair<std::size_t, std::size_t>> pending;
    auto push_pairs_for = [&](std::size_t n) {
        auto ln = vec_lead(basis[n].v, ord);
        for (std::size_t k = 0; k < n; ++k) {
            auto lk = vec_lead(basis[k].v, ord);
            if (lk && ln && lk->pos == ln->pos) pending.emplace_back(k, n);
        }
    };
    for (std::size_t n = 1; n < basis.size(); ++n) push_pairs_for(n);

    while (!pending.empty()) {
        auto [i, j] = pending.back();
        pending.pop_back();
        auto li = vec_lead(basis[i].v, ord);
        auto lj = vec_lead(basis[j].v, ord);
        Exps lcm = exps_lcm(li->e, lj->e);
        Poly mi = Poly::monomial(chart, exps_quotient(lcm, li->e), Rational(1) / li->c);
        Poly mj = Poly::monomial(chart, exps_quotient(lcm, lj->e), Rational(1) / lj->c);
        TrackedVec s;
        s.v = vec_sub(vec_scale(mi, basis[i].v), vec_scale(mj, basis[j].v));
        s.rep.assign(gens.size(), Poly::zero(chart));
        for (std::size_t t = 0; t < gens.size(); ++t)
            s.rep[t] = mi * basis[i].rep[t] - mj * basis[j].rep[t];
        tracked_vec_divide(s, basis, ord, chart);
        if (vec_is_zero(s.v)) continue;
        basis.push_back(std::move(s));
        push_pairs_for(basis.size() - 1);
    }

    // minimal + reduced + monic, as in the ideal case
    auto lead_divides = [&](const TrackedVec& a, const TrackedVec& b) {
        auto la = vec_lead(a.v, ord), lb = vec_lead(b.v, ord);
        return la->pos == lb->pos && exps_divides(la->e, lb->e);
    };
    std::vector<TrackedVec> minimal;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        bool redundant = false;
        for (std::size_t j = 0; j < basis.size() && !redundant; ++j) {
            if (i == j) continue;
            auto li = vec_lead(basis[i].v, ord), lj = vec_lead(basis[j].v, ord);
            if (li->pos == lj->pos && li->e == lj->e)
                redundant = j < i;
            else
                redundant = lead_divides(basis[j], basis[i]);
        }
        if (!redundant) minimal.push_back(basis[i]);
    }
    for (std::size_t i = 0; i < minimal.size(); ++i) {
        std::vector<TrackedVec> others;
        for (std::size_t j = 0; j < minimal.size(); ++j)
            if (j != i) others.push_back(minimal[j]);
        tracked_vec_divide(minimal[i], others, ord, chart);
        auto l = vec_lead(minimal[i].v, ord);
        if (l->c != 1) {
            Rational inv = Rational(1) / l->c;
            minimal[i].v = vec_scale(Poly::constant(chart, inv), minimal[i].v);
            for (Poly& r : minimal[i].rep) r = inv * r;
        }
    }
    std::sort(minimal.begin(), minimal.end(),
              [ord](const TrackedVec& a, const TrackedVec& b) {
                  auto la = vec_lead(a.v, ord), lb = vec_lead(b.v, ord);
                  if (la->pos != lb->pos) return la->pos > lb->pos; // smaller term first
                  return mono_less(la->e, lb->e, ord);
              });
    return minimal;
}

} // namespace detail

struct ModuleMembership {
    bool member = false;
    std::vector<Poly> witness; // candidate = sum witness_j * generators_j
};

// A finitely generated submodule of Q[chart]^rank with eager reduced
// Groebner basis under position-over-term order.
class SubmoduleBasis {
public:
    SubmoduleBasis(ChartPtr chart, std::size_t rank, std::vector<PolyVec> gens,
                   MonomialOrder ord = MonomialOrder::grevlex)
        : chart_(std::move(chart)), rank_(rank), gens_(std::move(gens)), ord_(ord) {
        if (rank_ == 0) throw EngineError("module rank must be positive");
        for (const PolyVec& g : gens_)
            for (const Poly& p : g) require_same_chart(chart_, p.chart());
        auto tracked = detail::module_buchberger_tracked(chart_, rank_, gens_, ord_);
        for (auto& t : tracked) {
            basis_.push_back(std::move(t.v));
            reps_.push_back(std::move(t.rep));
        }
    }

    const ChartPtr& chart() const { return chart_; }
    std::size_t rank() const { return rank_; }
    MonomialOrder order() const { return ord_; }
    const std::vector<PolyVec>& generators() const { return gens_; }
    const std::vector<PolyVec>& basis() const { return basis_; }

    PolyVec normal_form(const PolyVec& v) const {
        if (v.size() != rank_) throw EngineError("module vector length mismatch");
        detail::TrackedVec t{v, {}};
        std::vector<detail::TrackedVec> b;
        for (const PolyVec& g : basis_) b.push_back({g, {}});
        detail::tracked_vec_divide(t, b, ord_, chart_);
        return t.v;
    }

    ModuleMembership contains(const PolyVec& v) const {
        if (v.size() != rank_) throw EngineError("module vector length mismatch");
        detail::TrackedVec t{v, std::vector<Poly>(basis_.size(), Poly::zero(chart_))};
        // rep here tracks -quotients against the basis; recombine via reps_
        std::vector<detail::TrackedVec> b;
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            detail::TrackedVec tb{basis_[k], std::vector<Poly>(basis_.size(), Poly::zero(chart_))};
            tb.rep[k] = Poly::constant(chart_, Rational(1));
            b.push_back(std::move(tb));
        }
        detail::tracked_vec_divide(t, b, ord_, chart_);
        ModuleMembership m;
        m.member = vec_is_zero(t.v);
        if (m.member) {
            m.witness.assign(gens_.size(), Poly::zero(chart_));
            for (std::size_t k = 0; k < basis_.size(); ++k) {
                Poly q = -t.rep[k]; // v = sum q_k basis_k
                for (std::size_t j = 0; j < gens_.size(); ++j)
                    m.witness[j] += q * reps_[k][j];
            }
        }
        return m;
    }

private:
    ChartPtr chart_;
    std::size_t rank_;
    std::vector<PolyVec> gens_;
    MonomialOrder ord_;
    std::vector<PolyVec> basis_;
    std::vector<std::vector<Poly>> reps_;
};

inline std::vector<PolyVec> module_basis(const std::vector<PolyVec>& gens,
                                         const ChartPtr& chart, std::size_t rank,
                                         MonomialOrder ord = MonomialOrder::grevlex) {
    return SubmoduleBasis(chart, rank, gens, ord).basis();
}

inline ModuleMembership module_contains(const SubmoduleBasis& mod, const PolyVec& v) {
    return mod.contains(v);
}

inline IdealMembership ideal_contains(const Ideal& ideal, const Poly& f) {
    return ideal.contains(f);
}

// First syzygies of (g_1..g_m), g_i in R^rank: generators of
// { (a_1..a_m) : sum a_i g_i = 0 }.  Computed by the usual elimination trick:
// append unit tags, take a module Groebner basis where the original block
// dominates, and keep the tag blocks of elements whose original block died.
inline std::vector<PolyVec> syzygy_basis(const std::vector<PolyVec>& gens,
                                         const ChartPtr& chart, std::size_t rank,
                                         MonomialOrder ord = MonomialOrder::grevlex) {
    const std::size_t m = gens.size();
    if (m == 0) return {};
    std::vector<PolyVec> aug;
    aug.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (gens[i].size() != rank)
            throw EngineError("module generator has wrong length");
        PolyVec a = gens[i];
        for (std::size_t j = 0; j < m; ++j)
            a.push_back(i == j ? Poly::constant(chart, Rational(1)) : Poly::zero(chart));
        aug.push_back(std::move(a));
    }
    auto tracked = detail::module_buchberger_tracked(chart, rank + m, aug, ord);
    std::vector<PolyVec> syz;
    for (const auto& t : tracked) {
        bool top_zero = true;
        for (std::size_t i = 0; i < rank && top_zero; ++i)
            top_zero = t.v[i].is_zero();
        if (!top_zero) continue;
        PolyVec s(t.v.begin() + static_cast<long>(rank), t.v.end());
        if (!vec_is_zero(s)) syz.push_back(std::move(s));
    }
    return syz;
}

} // namespace msr
