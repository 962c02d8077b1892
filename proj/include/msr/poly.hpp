// Exact multivariate polynomials over Q on a chart.  Dense exponent vectors,
// canonical term maps (no zero coefficients), purely functional operations.
#pragma once

#include "msr/chart.hpp"
#include "msr/rational.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace msr {

using Exps = std::vector<unsigned>;

inline long exps_degree(const Exps& e) {
    long d = 0;
    for (unsigned x : e) d += x;
    return d;
}

inline bool exps_divides(const Exps& a, const Exps& b) { // a | b
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline Exps exps_quotient(const Exps& b, const Exps& a) { // b / a, assumes a | b
    Exps q(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) q[i] = b[i] - a[i];
    return q;
}

inline Exps exps_lcm(const Exps& a, const Exps& b) {
    Exps l(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) l[i] = std::max(a[i], b[i]);
    return l;
}

inline Exps exps_mul(const Exps& a, const Exps& b) {
    Exps m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) m[i] = a[i] + b[i];
    return m;
}

// Monomial orders.  grevlex is the workhorse; lex is kept for the CLI flag
// and for the order-independence property tests.
enum class MonomialOrder { grevlex, lex };

inline bool mono_less(const Exps& a, const Exps& b, MonomialOrder ord) {
    if (ord == MonomialOrder::lex) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    }
    long da = exps_degree(a), db = exps_degree(b);
    if (da != db) return da < db;
    // graded reverse lex: smaller means *larger* entry at the last difference
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

class Poly {
public:
    Poly() = default; // zero with no chart; usable only as a container default
    explicit Poly(ChartPtr chart) : chart_(std::move(chart)) {}

    static Poly zero(ChartPtr c) { return Poly(std::move(c)); }

    static Poly constant(ChartPtr c, const Rational& v) {
        Poly p(std::move(c));
        if (v != 0) p.terms_[Exps(p.chart_->dim(), 0)] = v;
        return p;
    }

    static Poly monomial(ChartPtr c, Exps e, const Rational& coef) {
        Poly p(std::move(c));
        if (e.size() != p.chart_->dim()) throw EngineError("exponent vector has wrong length");
        if (coef != 0) p.terms_[std::move(e)] = coef;
        return p;
    }

    static Poly variable(const ChartPtr& c, std::size_t idx) {
        if (idx >= c->dim()) throw EngineError("variable index out of range");
        Exps e(c->dim(), 0);
        e[idx] = 1;
        return monomial(c, std::move(e), Rational(1));
    }

    static Poly variable(const ChartPtr& c, const std::string& name) {
        int i = c->index_of(name);
        if (i < 0) throw EngineError("unknown variable: " + name);
        return variable(c, static_cast<std::size_t>(i));
    }

    const ChartPtr& chart() const { return chart_; }
    const std::map<Exps, Rational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        if (terms_.empty()) return true;
        return terms_.size() == 1 && exps_degree(terms_.begin()->first) == 0;
    }

    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw EngineError("polynomial is not constant");
        return terms_.begin()->second;
    }

    long total_degree() const { // -1 for the zero polynomial
        long d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, exps_degree(e));
        return d;
    }

    Poly operator-() const {
        Poly r(chart_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    Poly& operator+=(const Poly& o) {
        require_same_chart(chart_, o.chart_);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    Poly& operator-=(const Poly& o) {
        require_same_chart(chart_, o.chart_);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
    friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        require_same_chart(a.chart_, b.chart_);
        Poly r(a.chart_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_)
                r.add_term(exps_mul(ea, eb), ca * cb);
        return r;
    }

    friend Poly operator*(const Rational& s, Poly p) {
        if (s == 0) return Poly::zero(p.chart_);
        for (auto& [e, c] : p.terms_) c *= s;
        return p;
    }
    friend Poly operator*(Poly p, const Rational& s) { return s * std::move(p); }

    Poly pow(unsigned k) const {
        Poly acc = Poly::constant(chart_, Rational(1));
        Poly b = *this;
        while (k) {
            if (k & 1u) acc = acc * b;
            b = b * b;
            k >>= 1u;
        }
        return acc;
    }

    Poly derivative(std::size_t var) const {
        if (var >= chart_->dim()) throw EngineError("variable index out of range");
        Poly r(chart_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exps d = e;
            d[var] -= 1;
            r.add_term(d, c * Rational(e[var]));
        }
        return r;
    }

    Poly derivative(const std::string& var) const {
        int i = chart_->index_of(var);
        if (i < 0) throw EngineError("unknown variable: " + var);
        return derivative(static_cast<std::size_t>(i));
    }

    Rational evaluate(const std::vector<Rational>& pt) const {
        if (pt.size() != chart_->dim()) throw EngineError("evaluation point has wrong length");
        Rational acc(0);
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) t *= rat_pow(pt[i], e[i]);
            acc += t;
        }
        return acc;
    }

    // Simultaneous substitution; images live on the same chart.
    Poly substitute(const std::map<std::string, Poly>& assign) const {
        std::vector<const Poly*> image(chart_->dim(), nullptr);
        for (const auto& [v, img] : assign) {
            int i = chart_->index_of(v);
            if (i < 0) throw EngineError("unknown variable: " + v);
            require_same_chart(chart_, img.chart());
            image[static_cast<std::size_t>(i)] = &img;
        }
        Poly acc(chart_);
        for (const auto& [e, c] : terms_) {
            Poly t = Poly::constant(chart_, c);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i]) continue;
                if (image[i])
                    t = t * image[i]->pow(e[i]);
                else {
                    Exps m(chart_->dim(), 0);
                    m[i] = e[i];
                    t = t * Poly::monomial(chart_, std::move(m), Rational(1));
                }
            }
            acc += t;
        }
        return acc;
    }

    bool operator==(const Poly& o) const {
        if (!same_chart(chart_, o.chart_)) return terms_.empty() && o.terms_.empty();
        return terms_ == o.terms_;
    }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    // Leading term data under a monomial order.
    const Exps* leading_exps(MonomialOrder ord) const {
        const Exps* best = nullptr;
        for (const auto& [e, c] : terms_)
            if (!best || mono_less(*best, e, ord)) best = &e;
        return best;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        // print descending grevlex: natural "big terms first" reading
        std::vector<const std::pair<const Exps, Rational>*> ts;
        for (const auto& t : terms_) ts.push_back(&t);
        std::sort(ts.begin(), ts.end(), [](auto* a, auto* b) {
            return mono_less(b->first, a->first, MonomialOrder::grevlex);
        });
        std::ostringstream out;
        bool first = true;
        for (auto* t : ts) {
            Rational c = t->second;
            bool neg = c < 0;
            if (first) {
                if (neg) out << "-";
                first = false;
            } else {
                out << (neg ? " - " : " + ");
            }
            if (neg) c = -c;
            std::string mono = mono_str(t->first);
            if (mono.empty())
                out << rat_str(c);
            else if (c == 1)
                out << mono;
            else
                out << rat_str(c) << "*" << mono;
        }
        return out.str();
    }

private:
    std::string mono_str(const Exps& e) const {
        std::ostringstream out;
        bool first = true;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            if (!first) out << "*";
            first = false;
            out << chart_->vars[i];
            if (e[i] > 1) out << "^" << e[i];
        }
        return out.str();
    }

    void add_term(const Exps& e, const Rational& c) {
        if (c == 0) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    ChartPtr chart_;
    std::map<Exps, Rational> terms_;
};

} // namespace msr
