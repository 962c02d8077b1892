// Differential forms and vector fields with polynomial coefficients on a
// chart, and the Cartan calculus: wedge, d, interior product (contraction in
// the first slot), Lie bracket and Lie derivative (defined by Cartan's magic
// formula), and pullback to coordinate-aligned subspaces.
#pragma once

#include "msr/poly.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace msr {

using IndexTuple = std::vector<unsigned>; // strictly increasing coframe indices

namespace detail {

// Sign of the merge of two internally sorted index tuples; 0 on collision.
// Counts the transpositions needed to interleave b into a.
inline int merge_sign(const IndexTuple& a, const IndexTuple& b, IndexTuple& out) {
    out.clear();
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    long inversions = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return 0;
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            // b[j] jumps over the remaining entries of a
            inversions += static_cast<long>(a.size() - i);
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return (inversions % 2 == 0) ? 1 : -1;
}

} // namespace detail

class FieldExpr; // forward

// Homogeneous differential form: map from strictly increasing index tuples
// to polynomial coefficients.  The zero form of any degree has no terms.
class FormExpr {
public:
    FormExpr() = default;
    FormExpr(ChartPtr chart, unsigned degree)
        : chart_(std::move(chart)), degree_(degree) {}

    static FormExpr zero(ChartPtr c, unsigned degree = 0) {
        return FormExpr(std::move(c), degree);
    }

    static FormExpr scalar(const Poly& f) {
        FormExpr a(f.chart(), 0);
        if (!f.is_zero()) a.terms_[IndexTuple{}] = f;
        return a;
    }

    // dx_i
    static FormExpr coframe(const ChartPtr& c, std::size_t i) {
        if (i >= c->dim()) throw EngineError("coframe index out of range");
        FormExpr a(c, 1);
        a.terms_[IndexTuple{static_cast<unsigned>(i)}] = Poly::constant(c, Rational(1));
        return a;
    }

    static FormExpr coframe(const ChartPtr& c, const std::string& var) {
        int i = c->index_of(var);
        if (i < 0) throw EngineError("unknown variable: " + var);
        return coframe(c, static_cast<std::size_t>(i));
    }

    static FormExpr from_terms(ChartPtr c, unsigned degree,
                               std::map<IndexTuple, Poly> terms) {
        FormExpr a(std::move(c), degree);
        for (auto& [t, coef] : terms) {
            if (t.size() != degree) throw EngineError("index tuple has wrong length");
            for (std::size_t k = 0; k + 1 < t.size(); ++k)
                if (t[k] >= t[k + 1])
                    throw EngineError("index tuple not strictly increasing");
            if (!t.empty() && t.back() >= a.chart_->dim())
                throw EngineError("coframe index out of range");
            if (!coef.is_zero()) a.terms_[t] = std::move(coef);
        }
        return a;
    }

    const ChartPtr& chart() const { return chart_; }
    unsigned degree() const { return degree_; }
    const std::map<IndexTuple, Poly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Poly coefficient(const IndexTuple& t) const {
        auto it = terms_.find(t);
        return it == terms_.end() ? Poly::zero(chart_) : it->second;
    }

    // scalar content of a degree-0 form
    Poly scalar_part() const {
        if (degree_ != 0) throw EngineError("form has positive degree");
        return coefficient({});
    }

    FormExpr operator-() const {
        FormExpr r(chart_, degree_);
        for (const auto& [t, c] : terms_) r.terms_[t] = -c;
        return r;
    }

    FormExpr& operator+=(const FormExpr& o) {
        require_same_chart(chart_, o.chart_);
        if (is_zero())
            degree_ = o.degree_;
        else if (!o.is_zero() && degree_ != o.degree_)
            throw EngineError("cannot add forms of different degrees");
        for (const auto& [t, c] : o.terms_) add_term(t, c);
        return *this;
    }

    FormExpr& operator-=(const FormExpr& o) { return *this += (-o); }

    friend FormExpr operator+(FormExpr a, const FormExpr& b) { a += b; return a; }
    friend FormExpr operator-(FormExpr a, const FormExpr& b) { a -= b; return a; }

    friend FormExpr operator*(const Poly& s, const FormExpr& a) {
        require_same_chart(s.chart(), a.chart_);
        FormExpr r(a.chart_, a.degree_);
        for (const auto& [t, c] : a.terms_) r.add_term(t, s * c);
        return r;
    }
    friend FormExpr operator*(const Rational& s, const FormExpr& a) {
        return Poly::constant(a.chart_, s) * a;
    }

    bool operator==(const FormExpr& o) const {
        if (is_zero() && o.is_zero()) return true; // degree of zero is immaterial
        if (!same_chart(chart_, o.chart_)) return false;
        return degree_ == o.degree_ && terms_ == o.terms_;
    }
    bool operator!=(const FormExpr& o) const { return !(*this == o); }

    std::string str() const;

private:
    friend FormExpr wedge(const FormExpr&, const FormExpr&);
    friend FormExpr exterior_derivative(const FormExpr&);
    friend FormExpr interior_product(const FieldExpr&, const FormExpr&);

    void add_term(const IndexTuple& t, const Poly& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(t);
        if (it == terms_.end()) {
            terms_.emplace(t, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    ChartPtr chart_;
    unsigned degree_ = 0;
    std::map<IndexTuple, Poly> terms_;
};

// Polynomial vector field: one component per chart coordinate.
class FieldExpr {
public:
    FieldExpr() = default;
    FieldExpr(ChartPtr chart, std::vector<Poly> components)
        : chart_(std::move(chart)), comps_(std::move(components)) {
        if (comps_.size() != chart_->dim())
            throw EngineError("field component count does not match chart dimension");
        for (const Poly& p : comps_) require_same_chart(chart_, p.chart());
    }

    static FieldExpr zero(const ChartPtr& c) {
        return FieldExpr(c, std::vector<Poly>(c->dim(), Poly::zero(c)));
    }

    // coordinate field e(x_i)
    static FieldExpr frame(const ChartPtr& c, std::size_t i) {
        if (i >= c->dim()) throw EngineError("frame index out of range");
        FieldExpr v = zero(c);
        v.comps_[i] = Poly::constant(c, Rational(1));
        return v;
    }

    static FieldExpr frame(const ChartPtr& c, const std::string& var) {
        int i = c->index_of(var);
        if (i < 0) throw EngineError("unknown variable: " + var);
        return frame(c, static_cast<std::size_t>(i));
    }

    const ChartPtr& chart() const { return chart_; }
    const std::vector<Poly>& components() const { return comps_; }
    const Poly& component(std::size_t i) const { return comps_.at(i); }
    bool is_zero() const {
        for (const Poly& p : comps_)
            if (!p.is_zero()) return false;
        return true;
    }

    FieldExpr operator-() const {
        FieldExpr r = *this;
        for (Poly& p : r.comps_) p = -p;
        return r;
    }

    FieldExpr& operator+=(const FieldExpr& o) {
        require_same_chart(chart_, o.chart_);
        for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
        return *this;
    }
    FieldExpr& operator-=(const FieldExpr& o) { return *this += (-o); }
    friend FieldExpr operator+(FieldExpr a, const FieldExpr& b) { a += b; return a; }
    friend FieldExpr operator-(FieldExpr a, const FieldExpr& b) { a -= b; return a; }
    friend FieldExpr operator*(const Poly& s, FieldExpr v) {
        require_same_chart(s.chart(), v.chart_);
        for (Poly& p : v.comps_) p = s * p;
        return v;
    }
    friend FieldExpr operator*(const Rational& s, FieldExpr v) {
        for (Poly& p : v.comps_) p = s * p;
        return v;
    }

    // v acting on a function as a derivation
    Poly apply(const Poly& f) const {
        require_same_chart(chart_, f.chart());
        Poly acc = Poly::zero(chart_);
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            if (comps_[i].is_zero()) continue;
            acc += comps_[i] * f.derivative(i);
        }
        return acc;
    }

    bool operator==(const FieldExpr& o) const {
        if (!same_chart(chart_, o.chart_)) return is_zero() && o.is_zero();
        return comps_ == o.comps_;
    }
    bool operator!=(const FieldExpr& o) const { return !(*this == o); }

    std::string str() const;

private:
    ChartPtr chart_;
    std::vector<Poly> comps_;
};

inline FormExpr wedge(const FormExpr& a, const FormExpr& b) {
    require_same_chart(a.chart(), b.chart());
    FormExpr r(a.chart(), a.degree() + b.degree());
    IndexTuple merged;
    for (const auto& [ta, ca] : a.terms())
        for (const auto& [tb, cb] : b.terms()) {
            int sign = detail::merge_sign(ta, tb, merged);
            if (sign == 0) continue;
            r.add_term(merged, Rational(sign) * (ca * cb));
        }
    return r;
}

inline FormExpr exterior_derivative(const FormExpr& a) {
    FormExpr r(a.chart(), a.degree() + 1);
    IndexTuple merged;
    for (const auto& [t, c] : a.terms()) {
        for (std::size_t i = 0; i < a.chart()->dim(); ++i) {
            Poly dc = c.derivative(i);
            if (dc.is_zero()) continue;
            IndexTuple di{static_cast<unsigned>(i)};
            int sign = detail::merge_sign(di, t, merged);
            if (sign == 0) continue;
            r.add_term(merged, Rational(sign) * dc);
        }
    }
    return r;
}

// Contraction in the first slot: on decomposables,
//   i_v(a ^ b) = (i_v a) ^ b + (-1)^{|a|} a ^ (i_v b).
inline FormExpr interior_product(const FieldExpr& v, const FormExpr& a) {
    require_same_chart(v.chart(), a.chart());
    if (a.degree() == 0) return FormExpr::zero(a.chart(), 0);
    FormExpr r(a.chart(), a.degree() - 1);
    for (const auto& [t, c] : a.terms()) {
        int sign = 1;
        for (std::size_t j = 0; j < t.size(); ++j) {
            const Poly& vj = v.component(t[j]);
            if (!vj.is_zero()) {
                IndexTuple rest;
                rest.reserve(t.size() - 1);
                for (std::size_t k = 0; k < t.size(); ++k)
                    if (k != j) rest.push_back(t[k]);
                r.add_term(rest, Rational(sign) * (c * vj));
            }
            sign = -sign;
        }
    }
    return r;
}

// [u,v]^i = u(v^i) - v(u^i)
inline FieldExpr lie_bracket(const FieldExpr& u, const FieldExpr& v) {
    require_same_chart(u.chart(), v.chart());
    std::vector<Poly> comps;
    comps.reserve(u.chart()->dim());
    for (std::size_t i = 0; i < u.chart()->dim(); ++i)
        comps.push_back(u.apply(v.component(i)) - v.apply(u.component(i)));
    return FieldExpr(u.chart(), std::move(comps));
}

// Cartan's magic formula; the flow derivation formula lives in the tests as
// an independent oracle.
inline FormExpr lie_derivative(const FieldExpr& v, const FormExpr& a) {
    return interior_product(v, exterior_derivative(a)) +
           exterior_derivative(interior_product(v, a));
}

// iota(v_1 ^ ... ^ v_k) a = i_{v_k} ... i_{v_1} a: the first argument lands
// in the first slot.
inline FormExpr contract_all(const std::vector<FieldExpr>& vs, const FormExpr& a) {
    FormExpr r = a;
    for (const FieldExpr& v : vs) r = interior_product(v, r);
    return r;
}

// Pullback along the inclusion of the coordinate-aligned subspace obtained by
// substituting the given variables; images must be polynomials in the
// remaining variables.  The result lives on the sub-chart of kept variables.
inline FormExpr restrict(const FormExpr& a,
                         const std::map<std::string, Poly>& substitution) {
    const ChartPtr& parent = a.chart();
    std::vector<bool> removed(parent->dim(), false);
    for (const auto& [var, img] : substitution) {
        int i = parent->index_of(var);
        if (i < 0) throw EngineError("unknown variable: " + var);
        require_same_chart(parent, img.chart());
        removed[static_cast<std::size_t>(i)] = true;
    }
    // images may only mention kept variables
    for (const auto& [var, img] : substitution)
        for (const auto& [e, c] : img.terms())
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i] && removed[i])
                    throw EngineError(
                        "restrict: unsupported substitution; images must use "
                        "only the remaining variables");

    std::vector<std::string> kept;
    std::vector<int> new_index(parent->dim(), -1);
    for (std::size_t i = 0; i < parent->dim(); ++i) {
        if (removed[i]) continue;
        new_index[i] = static_cast<int>(kept.size());
        kept.push_back(parent->vars[i]);
    }
    ChartPtr sub = make_chart(parent->name + "|sub", kept);

    // transfer a parent polynomial with no removed-variable dependence
    auto project = [&](const Poly& p) {
        Poly q = Poly::zero(sub);
        for (const auto& [e, c] : p.terms()) {
            Exps se(sub->dim(), 0);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i]) continue;
                if (removed[i])
                    throw EngineError("restrict: internal projection failure");
                se[static_cast<std::size_t>(new_index[i])] = e[i];
            }
            q += Poly::monomial(sub, se, c);
        }
        return q;
    };

    // j* dx_i for every parent coordinate
    std::vector<FormExpr> pullback_coframe;
    pullback_coframe.reserve(parent->dim());
    for (std::size_t i = 0; i < parent->dim(); ++i) {
        if (!removed[i]) {
            pullback_coframe.push_back(
                FormExpr::coframe(sub, static_cast<std::size_t>(new_index[i])));
            continue;
        }
        Poly img = project(substitution.at(parent->vars[i]));
        FormExpr dimg = FormExpr::zero(sub, 1);
        for (std::size_t k = 0; k < sub->dim(); ++k) {
            Poly dk = img.derivative(k);
            if (!dk.is_zero()) dimg += dk * FormExpr::coframe(sub, k);
        }
        pullback_coframe.push_back(dimg);
    }

    FormExpr result = FormExpr::zero(sub, a.degree());
    for (const auto& [t, c] : a.terms()) {
        // substitute the removed variables inside the coefficient, then project
        std::map<std::string, Poly> assign;
        for (const auto& [var, img] : substitution) assign.emplace(var, img);
        FormExpr piece = FormExpr::scalar(project(c.substitute(assign)));
        for (unsigned idx : t) piece = wedge(piece, pullback_coframe[idx]);
        result += piece;
    }
    return result;
}

// ---------------------------------------------------------------------------
// printing, in the DSL's surface syntax
// ---------------------------------------------------------------------------

namespace detail {

inline std::string coefficient_piece(const Poly& c, const std::string& symbol,
                                     bool& negated) {
    negated = false;
    if (symbol.empty()) return c.str();
    if (c.is_constant()) {
        Rational v = c.constant_value();
        if (v == 1) return symbol;
        if (v == -1) {
            negated = true;
            return symbol;
        }
        if (v < 0) {
            negated = true;
            return rat_str(-v) + "*" + symbol;
        }
        return rat_str(v) + "*" + symbol;
    }
    if (c.terms().size() == 1) {
        std::string s = c.str();
        if (!s.empty() && s[0] == '-') {
            negated = true;
            return s.substr(1) + "*" + symbol;
        }
        return s + "*" + symbol;
    }
    return "(" + c.str() + ")*" + symbol;
}

inline void append_piece(std::string& out, const Poly& c, const std::string& symbol) {
    bool neg = false;
    std::string piece = coefficient_piece(c, symbol, neg);
    if (out.empty()) {
        out = neg ? "-" + piece : piece;
    } else {
        out += neg ? " - " : " + ";
        out += piece;
    }
}

} // namespace detail

inline std::string FormExpr::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [t, c] : terms_) {
        std::string symbol;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (k) symbol += "^";
            symbol += "d(" + chart_->vars[t[k]] + ")";
        }
        detail::append_piece(out, c, symbol);
    }
    return out;
}

inline std::string FieldExpr::str() const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (comps_[i].is_zero()) continue;
        detail::append_piece(out, comps_[i], "e(" + chart_->vars[i] + ")");
    }
    return out;
}

} // namespace msr
