// Pre-n-plectic structures and their observable algebra: nondegeneracy
// certificates for omega-flat, the Hamiltonian field solver, Hamiltonian
// pairs, the L-infinity multibrackets, the Leibniz bracket, and a
// sample-based higher-Jacobi verifier.
#pragma once

#include "msr/cartan.hpp"
#include "msr/linalg.hpp"

#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace msr {

enum class Tristate { yes, no, unknown };

inline std::string tristate_str(Tristate t) {
    switch (t) {
        case Tristate::yes: return "yes";
        case Tristate::no: return "no";
        default: return "unknown";
    }
}

// Certificate backing a nondegeneracy verdict.  "yes" names coframe tuples
// whose maximal minor of the contraction matrix is a nonzero constant; "no"
// carries a sampled point together with a constant kernel direction there.
struct NondegCertificate {
    Tristate verdict = Tristate::unknown;
    std::vector<IndexTuple> rows;
    Rational minor = Rational(0);
    std::vector<Rational> point;
    std::vector<Rational> kernel;
    std::string note;
};

namespace detail {

inline std::vector<IndexTuple> all_index_tuples(std::size_t dim, unsigned k) {
    std::vector<IndexTuple> out;
    if (k > dim) return out;
    IndexTuple t(k);
    for (unsigned i = 0; i < k; ++i) t[i] = i;
    while (true) {
        out.push_back(t);
        // advance the combination
        long pos = static_cast<long>(k) - 1;
        while (pos >= 0 && t[pos] == dim - k + static_cast<std::size_t>(pos)) --pos;
        if (pos < 0) break;
        ++t[pos];
        for (std::size_t j = static_cast<std::size_t>(pos) + 1; j < k; ++j)
            t[j] = t[j - 1] + 1;
    }
    return out;
}

} // namespace detail

// A closed (n+1)-form regarded as a pre-n-plectic structure.  Closedness is
// checked at construction; the nondegeneracy certificate is computed once.
class PlecticStructure {
public:
    PlecticStructure(ChartPtr chart, FormExpr omega, unsigned n)
        : chart_(std::move(chart)), omega_(std::move(omega)), n_(n) {
        if (n_ == 0) throw EngineError("plectic degree n must be positive");
        if (!omega_.is_zero() && omega_.degree() != n_ + 1)
            throw EngineError("omega degree does not equal n+1");
        require_same_chart(chart_, omega_.chart());
        if (!exterior_derivative(omega_).is_zero())
            throw EngineError("omega is not closed");
        build_matrix();
        compute_certificate();
    }

    const ChartPtr& chart() const { return chart_; }
    const FormExpr& omega() const { return omega_; }
    unsigned n() const { return n_; }
    const NondegCertificate& certificate() const { return cert_; }
    Tristate nondegenerate() const { return cert_.verdict; }

    // Rows of the contraction matrix: tuple index t, frame index i holds the
    // coefficient of dx_{tuples[t]} in iota_{e_i} omega.
    const std::vector<IndexTuple>& tuples() const { return tuples_; }
    const std::vector<std::vector<Poly>>& matrix() const { return matrix_; }

private:
    void build_matrix() {
        tuples_ = detail::all_index_tuples(chart_->dim(), n_);
        matrix_.assign(tuples_.size(), std::vector<Poly>());
        std::vector<FormExpr> contractions;
        contractions.reserve(chart_->dim());
        for (std::size_t i = 0; i < chart_->dim(); ++i)
            contractions.push_back(
                interior_product(FieldExpr::frame(chart_, i), omega_));
        for (std::size_t t = 0; t < tuples_.size(); ++t) {
            matrix_[t].reserve(chart_->dim());
            for (std::size_t i = 0; i < chart_->dim(); ++i)
                matrix_[t].push_back(contractions[i].coefficient(tuples_[t]));
        }
    }

    QMatrix evaluate_matrix(const std::vector<Rational>& pt) const {
        QMatrix m(matrix_.size(), std::vector<Rational>(chart_->dim()));
        for (std::size_t t = 0; t < matrix_.size(); ++t)
            for (std::size_t i = 0; i < chart_->dim(); ++i)
                m[t][i] = matrix_[t][i].evaluate(pt);
        return m;
    }

    std::vector<std::vector<Rational>> sample_points() const {
        const std::size_t m = chart_->dim();
        std::vector<std::vector<Rational>> pts;
        pts.emplace_back(m, Rational(0));
        pts.emplace_back(m, Rational(1));
        std::vector<Rational> ramp, primes, alt;
        long prime_list[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
        for (std::size_t i = 0; i < m; ++i) {
            ramp.emplace_back(static_cast<long>(i) + 1);
            primes.emplace_back(prime_list[i % 12]);
            alt.emplace_back((i % 2 == 0) ? static_cast<long>(i) / 2 + 1
                                          : -(static_cast<long>(i) / 2 + 1));
        }
        pts.push_back(ramp);
        pts.push_back(primes);
        pts.push_back(alt);
        std::mt19937 rng(987654u); // fixed seed: certificates are reproducible
        std::uniform_int_distribution<long> d(-9, 9);
        for (int r = 0; r < 2; ++r) {
            std::vector<Rational> p;
            for (std::size_t i = 0; i < m; ++i) p.emplace_back(d(rng));
            pts.push_back(std::move(p));
        }
        return pts;
    }

    // try a specific row subset as a constant-minor certificate
    bool try_rows(const std::vector<std::size_t>& rows) {
        const std::size_t m = chart_->dim();
        std::vector<std::vector<Poly>> sub;
        sub.reserve(m);
        for (std::size_t r : rows) sub.push_back(matrix_[r]);
        Poly det = poly_det(sub, chart_);
        if (!det.is_constant() || det.is_zero()) return false;
        cert_.verdict = Tristate::yes;
        cert_.minor = det.constant_value();
        cert_.rows.clear();
        for (std::size_t r : rows) cert_.rows.push_back(tuples_[r]);
        cert_rows_ix_ = rows;
        return true;
    }

    void compute_certificate() {
        const std::size_t m = chart_->dim();
        if (tuples_.empty() || omega_.is_zero()) {
            cert_.verdict = Tristate::no;
            cert_.point.assign(m, Rational(0));
            cert_.kernel.assign(m, Rational(0));
            cert_.kernel[0] = Rational(1);
            cert_.note = "contraction map is identically zero in some direction";
            return;
        }
        std::set<std::vector<std::size_t>> tried;
        for (const auto& pt : sample_points()) {
            QMatrix eval = evaluate_matrix(pt);
            RrefResult r = rref(eval);
            if (r.rank < m) {
                auto kernel = null_space(eval);
                cert_.verdict = Tristate::no;
                cert_.point = pt;
                cert_.kernel = kernel.front();
                cert_.note = "contraction matrix drops rank at the sample point";
                return;
            }
            std::vector<std::size_t> rows = r.pivot_rows;
            std::sort(rows.begin(), rows.end());
            if (tried.insert(rows).second && try_rows(rows)) return;
        }
        // small search spaces: sweep every row subset before giving up
        if (tuples_.size() <= m + 3) {
            std::vector<std::size_t> idx(tuples_.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::vector<std::size_t> pick(m);
            std::function<bool(std::size_t, std::size_t)> rec =
                [&](std::size_t start, std::size_t k) {
                    if (k == m) return !tried.count(pick) && try_rows(pick);
                    for (std::size_t i = start; i < idx.size(); ++i) {
                        pick[k] = idx[i];
                        if (rec(i + 1, k + 1)) return true;
                    }
                    return false;
                };
            if (rec(0, 0)) return;
        }
        cert_.verdict = Tristate::unknown;
        cert_.note = "no constant maximal minor found and no sampled rank drop";
    }

    ChartPtr chart_;
    FormExpr omega_;
    unsigned n_;
    NondegCertificate cert_;
    std::vector<IndexTuple> tuples_;
    std::vector<std::vector<Poly>> matrix_;
    std::vector<std::size_t> cert_rows_ix_;

    friend FieldExpr hamiltonian_field_for(const PlecticStructure&, const FormExpr&);
};

inline NondegCertificate check_nondegenerate(const PlecticStructure& p) {
    return p.certificate();
}

// Solve iota_v omega = -d alpha for v using the certificate rows: Cramer on
// a submatrix with constant determinant always yields polynomial components.
inline FieldExpr hamiltonian_field_for(const PlecticStructure& p,
                                       const FormExpr& alpha) {
    if (p.nondegenerate() != Tristate::yes)
        throw EngineError("degenerate: Hamiltonian fields require a certified "
                          "nondegenerate structure");
    if (!alpha.is_zero() && alpha.degree() != p.n() - 1)
        throw EngineError("observable form must have degree n-1");
    const std::size_t m = p.chart()->dim();
    FormExpr rhs = -exterior_derivative(alpha);
    std::vector<std::vector<Poly>> a;
    std::vector<Poly> b;
    a.reserve(m);
    b.reserve(m);
    for (std::size_t r : p.cert_rows_ix_) {
        a.push_back(p.matrix_[r]);
        b.push_back(rhs.coefficient(p.tuples_[r]));
    }
    std::vector<Poly> comps;
    comps.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::vector<Poly>> ai = a;
        for (std::size_t r = 0; r < m; ++r) ai[r][i] = b[r];
        comps.push_back((Rational(1) / p.certificate().minor) * poly_det(ai, p.chart()));
    }
    FieldExpr v(p.chart(), std::move(comps));
    if (interior_product(v, p.omega()) != rhs)
        throw EngineError("not Hamiltonian: the contraction system is "
                          "inconsistent for this form");
    return v;
}

inline bool is_hamiltonian_pair(const PlecticStructure& p, const FieldExpr& v,
                                const FormExpr& alpha) {
    require_same_chart(p.chart(), v.chart());
    if (!alpha.is_zero() && alpha.degree() != p.n() - 1)
        throw EngineError("observable form must have degree n-1");
    return (exterior_derivative(alpha) + interior_product(v, p.omega())).is_zero();
}

// Total Koszul sign: -(-1)^{k(k+1)/2}.
inline int koszul_sign(unsigned k) {
    if (k == 0) throw EngineError("koszul_sign needs k >= 1");
    return (k * (k + 1) / 2) % 2 == 0 ? -1 : 1;
}

// Graded observable of the L-infinity algebra: degree 0 holds a Hamiltonian
// pair (v, alpha); degrees 1-n..-1 hold a bare form of degree n-1+deg.
class Observable {
public:
    static Observable pair(const PlecticStructure& p, FieldExpr v, FormExpr alpha) {
        if (!is_hamiltonian_pair(p, v, alpha))
            throw EngineError("not a Hamiltonian pair: d(form) != -iota_field omega");
        return Observable(0, std::move(v), std::move(alpha));
    }

    static Observable lower(const PlecticStructure& p, int degree, FormExpr alpha) {
        if (degree >= 0 || degree < 1 - static_cast<int>(p.n()))
            throw EngineError("observable degree out of range");
        unsigned want = static_cast<unsigned>(static_cast<int>(p.n()) - 1 + degree);
        if (!alpha.is_zero() && alpha.degree() != want)
            throw EngineError("observable form degree does not match its degree");
        return Observable(degree, FieldExpr::zero(p.chart()),
                          alpha.is_zero() ? FormExpr::zero(p.chart(), want)
                                          : std::move(alpha));
    }

    static Observable zero(const PlecticStructure& p, int degree) {
        int lo = 1 - static_cast<int>(p.n());
        if (degree > 0) degree = 0;
        if (degree < lo) degree = lo;
        unsigned fd = static_cast<unsigned>(static_cast<int>(p.n()) - 1 + degree);
        return Observable(degree, FieldExpr::zero(p.chart()),
                          FormExpr::zero(p.chart(), fd));
    }

    int degree() const { return degree_; }
    const FieldExpr& field() const { return field_; }
    const FormExpr& form() const { return form_; }
    bool is_zero() const { return field_.is_zero() && form_.is_zero(); }

    Observable operator-() const { return Observable(degree_, -field_, -form_); }

    friend Observable operator*(const Rational& s, const Observable& x) {
        Poly sp = Poly::constant(x.field_.chart(), s);
        return Observable(x.degree_, sp * x.field_, s * x.form_);
    }

    friend Observable operator+(const Observable& a, const Observable& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.degree_ != b.degree_)
            throw EngineError("cannot add observables of different degrees");
        return Observable(a.degree_, a.field_ + b.field_, a.form_ + b.form_);
    }
    friend Observable operator-(const Observable& a, const Observable& b) {
        return a + (-b);
    }

    bool operator==(const Observable& o) const {
        if (is_zero() && o.is_zero()) return true;
        return degree_ == o.degree_ && field_ == o.field_ && form_ == o.form_;
    }
    bool operator!=(const Observable& o) const { return !(*this == o); }

    std::string str() const {
        if (degree_ == 0) return "(" + field_.str() + ", " + form_.str() + ")";
        std::ostringstream out;
        out << form_.str() << " @ degree " << degree_;
        return out.str();
    }

private:
    Observable(int degree, FieldExpr f, FormExpr a)
        : degree_(degree), field_(std::move(f)), form_(std::move(a)) {}

    int degree_;
    FieldExpr field_;
    FormExpr form_;
};

// The multibrackets of the observable algebra.
//   k=1: 0 on degree 0; (0, d alpha) on degree -1; d alpha below that.
//   k=2 on two pairs: ([v1,v2], sigma(2) iota(v1 ^ v2) omega).
//   k>=3 on pairs:    sigma(k) iota(v1 ^ ... ^ v_k) omega at degree 2-k.
//   any argument of negative degree with k>=2: zero.
inline Observable multibracket(const PlecticStructure& p,
                               const std::vector<Observable>& args) {
    const std::size_t k = args.size();
    if (k == 0) throw EngineError("multibracket needs at least one argument");

    if (k == 1) {
        const Observable& x = args[0];
        if (x.degree() == 0) return Observable::zero(p, 0);
        FormExpr d = exterior_derivative(x.form());
        if (x.degree() == -1) {
            if (d.is_zero()) return Observable::zero(p, 0);
            return Observable::pair(p, FieldExpr::zero(p.chart()), d);
        }
        return Observable::lower(p, x.degree() + 1, d);
    }

    long degree_sum = 0;
    bool all_pairs = true;
    for (const Observable& x : args) {
        degree_sum += x.degree();
        all_pairs = all_pairs && x.degree() == 0;
    }
    int out_degree = static_cast<int>(degree_sum + 2 - static_cast<long>(k));
    if (!all_pairs) return Observable::zero(p, out_degree);

    std::vector<FieldExpr> fields;
    fields.reserve(k);
    for (const Observable& x : args) fields.push_back(x.field());
    FormExpr contracted = Rational(koszul_sign(static_cast<unsigned>(k))) *
                          contract_all(fields, p.omega());

    if (k == 2) {
        FieldExpr bracket = lie_bracket(fields[0], fields[1]);
        return Observable::pair(p, std::move(bracket), std::move(contracted));
    }
    if (contracted.is_zero() || out_degree < 1 - static_cast<int>(p.n()))
        return Observable::zero(p, out_degree);
    return Observable::lower(p, out_degree, std::move(contracted));
}

// {(u,alpha),(v,beta)} = ([u,v], L_u beta)
inline Observable leibniz_bracket(const PlecticStructure& p, const Observable& a,
                                  const Observable& b) {
    if (a.degree() != 0 || b.degree() != 0)
        throw EngineError("Leibniz bracket needs two degree-0 observables");
    return Observable::pair(p, lie_bracket(a.field(), b.field()),
                            lie_derivative(a.field(), b.form()));
}

struct JacobiViolation {
    unsigned arity = 0;
    std::vector<std::size_t> indices; // positions into the sample
    std::string detail;
};

struct JacobiReport {
    unsigned max_arity = 0;
    unsigned identities_checked = 0;
    std::vector<JacobiViolation> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {

// sgn(sigma) * Koszul sign of reordering graded arguments by sigma; computed
// by bubble-sorting the source positions back to the identity.
inline int unshuffle_sign(const std::vector<std::size_t>& perm,
                          const std::vector<int>& degrees) {
    std::vector<std::size_t> arr = perm;
    int sign = 1;
    for (std::size_t pass = 0; pass + 1 < arr.size(); ++pass)
        for (std::size_t t = 0; t + 1 < arr.size(); ++t)
            if (arr[t] > arr[t + 1]) {
                int da = degrees[arr[t]], db = degrees[arr[t + 1]];
                sign = -sign; // plain signature
                if ((da * db) % 2 != 0) sign = -sign; // graded factor
                std::swap(arr[t], arr[t + 1]);
            }
    return sign;
}

inline void for_each_multiset(std::size_t n, unsigned k,
                              const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> pick(k, 0);
    if (k == 0 || n == 0) return;
    while (true) {
        fn(pick);
        long pos = static_cast<long>(k) - 1;
        while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == n - 1) --pos;
        if (pos < 0) break;
        std::size_t v = pick[static_cast<std::size_t>(pos)] + 1;
        for (std::size_t j = static_cast<std::size_t>(pos); j < k; ++j) pick[j] = v;
    }
}

} // namespace detail

// The left-hand side of the generalized Jacobi identity at arity |xs|; the
// identity holds exactly when the result is absent or the zero observable.
inline std::optional<Observable> jacobi_defect(const PlecticStructure& p,
                                               const std::vector<Observable>& xs) {
    const unsigned m = static_cast<unsigned>(xs.size());
    std::vector<int> degrees;
    degrees.reserve(m);
    for (const Observable& x : xs) degrees.push_back(x.degree());

    std::optional<Observable> acc;
    for (unsigned i = 1; i <= m; ++i) {
        unsigned j = m + 1 - i;
        // enumerate (i, m-i) unshuffles as ascending index subsets
        std::vector<std::size_t> subset(i);
        std::function<void(std::size_t, std::size_t)> rec =
            [&](std::size_t start, std::size_t depth) {
                if (depth == i) {
                    std::vector<std::size_t> perm = subset;
                    std::vector<bool> used(m, false);
                    for (std::size_t s : subset) used[s] = true;
                    for (std::size_t t = 0; t < m; ++t)
                        if (!used[t]) perm.push_back(t);
                    int chi = detail::unshuffle_sign(perm, degrees);
                    int coef = ((i * (j - 1)) % 2 ? -1 : 1) * chi;

                    std::vector<Observable> inner_args;
                    for (std::size_t s : subset) inner_args.push_back(xs[s]);
                    Observable inner = multibracket(p, inner_args);
                    std::vector<Observable> outer_args{inner};
                    for (std::size_t t = i; t < m; ++t)
                        outer_args.push_back(xs[perm[t]]);
                    Observable term = multibracket(p, outer_args);
                    if (term.is_zero()) return;
                    Observable signed_term = Rational(coef) * term;
                    acc = acc ? (*acc + signed_term) : signed_term;
                    return;
                }
                for (std::size_t v = start; v + (i - depth) <= m; ++v) {
                    subset[depth] = v;
                    rec(v + 1, depth + 1);
                }
            };
        rec(0, 0);
    }
    return acc;
}

// Evaluate the generalized Jacobi identity of every arity up to max_arity on
// all multisets drawn from the sample; multilinearity makes this a sound
// spot-check of the identities on the spanned subspace.
inline JacobiReport check_higher_jacobi(const PlecticStructure& p,
                                        const std::vector<Observable>& sample,
                                        unsigned max_arity) {
    if (max_arity > p.n() + 2)
        throw EngineError("jacobi arity exceeds n+2");
    JacobiReport report;
    report.max_arity = max_arity;

    for (unsigned m = 1; m <= max_arity; ++m) {
        detail::for_each_multiset(sample.size(), m, [&](const std::vector<std::size_t>& pick) {
            std::vector<Observable> xs;
            xs.reserve(m);
            for (std::size_t ix : pick) xs.push_back(sample[ix]);

            std::optional<Observable> defect = jacobi_defect(p, xs);
            ++report.identities_checked;
            if (defect && !defect->is_zero()) {
                JacobiViolation v;
                v.arity = m;
                v.indices = pick;
                v.detail = "residual " + defect->str();
                report.violations.push_back(std::move(v));
            }
        });
    }
    return report;
}

} // namespace msr
