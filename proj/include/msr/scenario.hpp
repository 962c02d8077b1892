// Scenario DSL: a small line-oriented language for declaring a chart, a
// plectic structure, an action and constraints, and then running reduction
// queries against the engine.  The parser is a plain recursive descent over
// a hand-rolled token stream; every diagnostic carries a line/column span.
#pragma once

#include "msr/reduction.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace msr {

struct SourceSpan {
    int line = 0;
    int column = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, SourceSpan span)
        : std::runtime_error("line " + std::to_string(span.line) + ", column " +
                             std::to_string(span.column) + ": " + msg),
          span_(span) {}
    SourceSpan span() const { return span_; }

private:
    SourceSpan span_;
};

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokKind {
    Ident, Number, LParen, RParen, LBracket, RBracket, Comma,
    Assign, EqEq, Plus, Minus, Star, Slash, Caret, Newline, End
};

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    SourceSpan span;
};

namespace detail {

// identifiers that contain a hyphen; anything else splits at '-'
inline bool hyphen_keyword(const std::string& s) {
    return s == "reduced-basis" || s == "first-class";
}

} // namespace detail

inline std::vector<Token> lex_scenario(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1, depth = 0;
    std::size_t i = 0;
    auto push = [&](TokKind k, std::string text, int l, int c) {
        out.push_back(Token{k, std::move(text), SourceSpan{l, c}});
    };
    while (i < src.size()) {
        char ch = src[i];
        if (ch == '#') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (ch == '\n') {
            if (depth == 0 && !out.empty() && out.back().kind != TokKind::Newline)
                push(TokKind::Newline, "\n", line, col);
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++i;
            ++col;
            continue;
        }
        int tl = line, tc = col;
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::string text;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                text += src[i++];
                ++col;
            }
            // maximal munch for the known hyphenated keywords
            if (i + 1 < src.size() && src[i] == '-' &&
                std::isalpha(static_cast<unsigned char>(src[i + 1]))) {
                std::size_t save_i = i;
                int save_col = col;
                std::string ext = text + '-';
                ++i;
                ++col;
                while (i < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                    ext += src[i++];
                    ++col;
                }
                if (detail::hyphen_keyword(ext)) {
                    text = ext;
                } else {
                    i = save_i;
                    col = save_col;
                }
            }
            push(TokKind::Ident, text, tl, tc);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::string text;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                text += src[i++];
                ++col;
            }
            push(TokKind::Number, text, tl, tc);
            continue;
        }
        ++i;
        ++col;
        switch (ch) {
            case '(': ++depth; push(TokKind::LParen, "(", tl, tc); break;
            case ')': if (depth > 0) --depth; push(TokKind::RParen, ")", tl, tc); break;
            case '[': ++depth; push(TokKind::LBracket, "[", tl, tc); break;
            case ']': if (depth > 0) --depth; push(TokKind::RBracket, "]", tl, tc); break;
            case ',': push(TokKind::Comma, ",", tl, tc); break;
            case '+': push(TokKind::Plus, "+", tl, tc); break;
            case '-': push(TokKind::Minus, "-", tl, tc); break;
            case '*': push(TokKind::Star, "*", tl, tc); break;
            case '/': push(TokKind::Slash, "/", tl, tc); break;
            case '^': push(TokKind::Caret, "^", tl, tc); break;
            case '=':
                if (i < src.size() && src[i] == '=') {
                    ++i;
                    ++col;
                    push(TokKind::EqEq, "==", tl, tc);
                } else {
                    push(TokKind::Assign, "=", tl, tc);
                }
                break;
            default:
                throw ParseError(std::string("unexpected character '") + ch + "'",
                                 SourceSpan{tl, tc});
        }
    }
    if (!out.empty() && out.back().kind != TokKind::Newline)
        out.push_back(Token{TokKind::Newline, "\n", SourceSpan{line, col}});
    out.push_back(Token{TokKind::End, "", SourceSpan{line, col}});
    return out;
}

// ---------------------------------------------------------------------------
// Expression AST
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class K { Number, Ident, Unary, Binary, Call };
    K kind = K::Number;
    SourceSpan span;
    std::string text;          // literal, name, operator symbol, or call name
    std::vector<ExprPtr> args;
};

namespace detail {

inline int expr_prec(const Expr& e) {
    if (e.kind != Expr::K::Binary) return 9;
    if (e.text == "+" || e.text == "-") return 1;
    if (e.text == "*" || e.text == "/") return 2;
    return 3; // ^
}

inline std::string print_expr(const ExprPtr& e);

inline std::string print_child(const ExprPtr& c, int parent_prec, bool right) {
    bool paren = false;
    if (c->kind == Expr::K::Binary) {
        int p = expr_prec(*c);
        paren = p < parent_prec || (p == parent_prec && right);
    } else if (c->kind == Expr::K::Unary) {
        paren = parent_prec >= 2 || right;
    }
    std::string s = print_expr(c);
    return paren ? "(" + s + ")" : s;
}

inline std::string print_expr(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::K::Number:
        case Expr::K::Ident:
            return e->text;
        case Expr::K::Unary: {
            const ExprPtr& c = e->args[0];
            bool paren = c->kind == Expr::K::Binary && expr_prec(*c) < 2;
            std::string s = print_expr(c);
            return "-" + (paren ? "(" + s + ")" : s);
        }
        case Expr::K::Call: {
            std::string s = e->text + "(";
            for (std::size_t i = 0; i < e->args.size(); ++i) {
                if (i) s += ", ";
                s += print_expr(e->args[i]);
            }
            return s + ")";
        }
        case Expr::K::Binary: {
            int p = expr_prec(*e);
            std::string op = e->text;
            std::string sep = (p == 1) ? " " : "";
            return print_child(e->args[0], p, false) + sep + op + sep +
                   print_child(e->args[1], p, true);
        }
    }
    return "";
}

} // namespace detail

// ---------------------------------------------------------------------------
// Statements, queries, scenarios
// ---------------------------------------------------------------------------

struct Statement {
    enum class K {
        Chart, Fibration, Form, Field, Observable, Omega, Potential, Action,
        StructConst, Moment, MomentFromPotential, Level, Constraints,
        ConstraintsFromMoment, Sample
    };
    K kind = K::Chart;
    SourceSpan span;
    std::vector<std::string> names;   // chart vars / fibration base / decl name
    std::vector<std::string> section; // fibration section vars
    std::vector<ExprPtr> exprs;       // list-valued payload
    ExprPtr rhs;                      // single-expression payload
    long degree = 0;                  // omega/potential degree
    long index[3] = {0, 0, 0};        // structconst indices (1-based)
};

struct Query {
    enum class K {
        Nondegenerate, Action, Moment, Closure, Descent, Tangent,
        ReducibleForm, ReducibleField, ReducibleObservable,
        VanishingForm, VanishingField, VanishingObservable,
        Member, FirstClass, Casimir, FormEqual, FieldEqual,
        ReduceObservable, ReduceEqual, ReducedBasis, ReducedBasisSample, Jacobi
    };
    K kind = K::Nondegenerate;
    SourceSpan span;
    bool negate = false;
    std::vector<ExprPtr> exprs;   // operands
    std::vector<ExprPtr> expects; // reduced-basis expectation list
    bool has_expects = false;
    std::string expect_word;      // nondegenerate expectation (yes/no/unknown)
    long degree = 0;              // reduced-basis degree
    long arity = 0;               // jacobi arity
    long trials = -1;             // jacobi trials (-1: default)
};

using ScenarioItem = std::variant<Statement, Query>;

struct Scenario {
    std::vector<ScenarioItem> items;
};

namespace detail {

inline std::string join_exprs(const std::vector<ExprPtr>& xs) {
    std::string s = "(";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += print_expr(xs[i]);
    }
    return s + ")";
}

inline std::string join_names(const std::vector<std::string>& xs) {
    std::string s = "(";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += xs[i];
    }
    return s + ")";
}

} // namespace detail

inline std::string print_statement(const Statement& st) {
    using K = Statement::K;
    switch (st.kind) {
        case K::Chart: return "chart " + detail::join_names(st.names);
        case K::Fibration:
            return "fibration base " + detail::join_names(st.names) + " section " +
                   detail::join_names(st.section);
        case K::Form: return "form " + st.names[0] + " = " + detail::print_expr(st.rhs);
        case K::Field: return "field " + st.names[0] + " = " + detail::print_expr(st.rhs);
        case K::Observable:
            return "observable " + st.names[0] + " = " + detail::print_expr(st.rhs);
        case K::Omega:
            return "omega = " + detail::print_expr(st.rhs) + " degree " +
                   std::to_string(st.degree);
        case K::Potential:
            return "potential = " + detail::print_expr(st.rhs) + " degree " +
                   std::to_string(st.degree);
        case K::Action: return "action " + detail::join_exprs(st.exprs);
        case K::StructConst:
            return "structconst [" + std::to_string(st.index[0]) + ", " +
                   std::to_string(st.index[1]) + ", " + std::to_string(st.index[2]) +
                   "] = " + detail::print_expr(st.rhs);
        case K::Moment: return "moment " + detail::join_exprs(st.exprs);
        case K::MomentFromPotential: return "moment from potential";
        case K::Level: return "level " + detail::join_exprs(st.exprs);
        case K::Constraints: return "constraints " + detail::join_exprs(st.exprs);
        case K::ConstraintsFromMoment: return "constraints from moment";
        case K::Sample: return "sample " + detail::join_exprs(st.exprs);
    }
    return "";
}

inline std::string print_query(const Query& q) {
    using K = Query::K;
    std::string neg = q.negate ? "not " : "";
    switch (q.kind) {
        case K::Nondegenerate:
            return "check nondegenerate" +
                   (q.expect_word.empty() ? "" : " expect " + q.expect_word);
        case K::Action: return "check action";
        case K::Moment: return "check moment";
        case K::Closure: return "check closure";
        case K::Descent: return "check descent " + detail::join_exprs(q.exprs);
        case K::Tangent: return "check " + neg + "tangent " + detail::print_expr(q.exprs[0]);
        case K::ReducibleForm:
            return "check " + neg + "reducible form " + detail::print_expr(q.exprs[0]);
        case K::ReducibleField:
            return "check " + neg + "reducible field " + detail::print_expr(q.exprs[0]);
        case K::ReducibleObservable:
            return "check " + neg + "reducible observable " + detail::print_expr(q.exprs[0]);
        case K::VanishingForm:
            return "check " + neg + "vanishing form " + detail::print_expr(q.exprs[0]);
        case K::VanishingField:
            return "check " + neg + "vanishing field " + detail::print_expr(q.exprs[0]);
        case K::VanishingObservable:
            return "check " + neg + "vanishing observable " + detail::print_expr(q.exprs[0]);
        case K::Member: return "check " + neg + "member " + detail::print_expr(q.exprs[0]);
        case K::FirstClass:
            return "check " + neg + "first-class " + detail::print_expr(q.exprs[0]);
        case K::Casimir: return "check " + neg + "casimir " + detail::print_expr(q.exprs[0]);
        case K::FormEqual:
            return "check form " + detail::print_expr(q.exprs[0]) + " == " +
                   detail::print_expr(q.exprs[1]);
        case K::FieldEqual:
            return "check field " + detail::print_expr(q.exprs[0]) + " == " +
                   detail::print_expr(q.exprs[1]);
        case K::ReduceObservable:
            return "reduce observable " + detail::print_expr(q.exprs[0]);
        case K::ReduceEqual:
            return "reduce " + neg + "equal " + detail::print_expr(q.exprs[0]) + ", " +
                   detail::print_expr(q.exprs[1]);
        case K::ReducedBasis: {
            std::string s = "reduced-basis degree = " + std::to_string(q.degree);
            if (q.has_expects) s += " expect " + detail::join_exprs(q.expects);
            return s;
        }
        case K::ReducedBasisSample: {
            std::string s = "reduced-basis from sample";
            if (q.has_expects) s += " expect " + detail::join_exprs(q.expects);
            return s;
        }
        case K::Jacobi: {
            std::string s = "jacobi arity = " + std::to_string(q.arity);
            if (q.trials >= 0) s += " trials = " + std::to_string(q.trials);
            return s;
        }
    }
    return "";
}

inline std::string print_scenario(const Scenario& sc) {
    std::string out;
    for (const ScenarioItem& item : sc.items) {
        if (std::holds_alternative<Statement>(item))
            out += print_statement(std::get<Statement>(item));
        else
            out += print_query(std::get<Query>(item));
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Scenario parse() {
        Scenario sc;
        skip_newlines();
        while (!at(TokKind::End)) {
            sc.items.push_back(parse_item());
            end_of_statement();
            skip_newlines();
        }
        return sc;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(TokKind k) const { return peek().kind == k; }
    bool at_word(const char* w) const {
        return peek().kind == TokKind::Ident && peek().text == w;
    }
    Token advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    Token expect(TokKind k, const std::string& what) {
        if (!at(k)) throw ParseError("expected " + what, peek().span);
        return advance();
    }
    Token expect_word(const char* w) {
        if (!at_word(w))
            throw ParseError(std::string("expected '") + w + "'", peek().span);
        return advance();
    }
    void skip_newlines() {
        while (at(TokKind::Newline)) advance();
    }
    void end_of_statement() {
        if (at(TokKind::End)) return;
        if (!at(TokKind::Newline))
            throw ParseError("expected end of statement", peek().span);
        advance();
    }

    long parse_uint(const char* what) {
        Token t = expect(TokKind::Number, what);
        if (t.text.size() > 9) throw ParseError("number too large", t.span);
        return std::stol(t.text);
    }

    std::vector<std::string> parse_name_list() {
        std::vector<std::string> names;
        expect(TokKind::LParen, "'('");
        if (!at(TokKind::RParen)) {
            names.push_back(expect(TokKind::Ident, "a name").text);
            while (at(TokKind::Comma)) {
                advance();
                names.push_back(expect(TokKind::Ident, "a name").text);
            }
        }
        expect(TokKind::RParen, "')'");
        return names;
    }

    std::vector<ExprPtr> parse_expr_list() {
        std::vector<ExprPtr> xs;
        expect(TokKind::LParen, "'('");
        if (!at(TokKind::RParen)) {
            xs.push_back(parse_expr());
            while (at(TokKind::Comma)) {
                advance();
                xs.push_back(parse_expr());
            }
        }
        expect(TokKind::RParen, "')'");
        return xs;
    }

    ExprPtr mk(Expr::K kind, SourceSpan span, std::string text,
               std::vector<ExprPtr> args = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = kind;
        e->span = span;
        e->text = std::move(text);
        e->args = std::move(args);
        return e;
    }

    ExprPtr parse_expr() {
        SourceSpan sp = peek().span;
        ExprPtr lhs;
        if (at(TokKind::Minus)) {
            advance();
            lhs = mk(Expr::K::Unary, sp, "-", {parse_term()});
        } else {
            lhs = parse_term();
        }
        while (at(TokKind::Plus) || at(TokKind::Minus)) {
            Token op = advance();
            lhs = mk(Expr::K::Binary, op.span, op.text, {lhs, parse_term()});
        }
        return lhs;
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_pow();
        while (at(TokKind::Star) || at(TokKind::Slash)) {
            Token op = advance();
            lhs = mk(Expr::K::Binary, op.span, op.text, {lhs, parse_pow()});
        }
        return lhs;
    }

    ExprPtr parse_pow() {
        ExprPtr lhs = parse_atom();
        while (at(TokKind::Caret)) {
            Token op = advance();
            lhs = mk(Expr::K::Binary, op.span, op.text, {lhs, parse_atom()});
        }
        return lhs;
    }

    ExprPtr parse_atom() {
        Token t = peek();
        if (t.kind == TokKind::Number) {
            advance();
            return mk(Expr::K::Number, t.span, t.text);
        }
        if (t.kind == TokKind::Ident) {
            advance();
            if (at(TokKind::LParen)) {
                std::vector<ExprPtr> args = parse_expr_list();
                if (args.empty())
                    throw ParseError("call '" + t.text + "' needs at least one argument",
                                     t.span);
                return mk(Expr::K::Call, t.span, t.text, std::move(args));
            }
            return mk(Expr::K::Ident, t.span, t.text);
        }
        if (t.kind == TokKind::LParen) {
            advance();
            ExprPtr inner = parse_expr();
            expect(TokKind::RParen, "')'");
            return inner;
        }
        throw ParseError("expected an expression", t.span);
    }

    ScenarioItem parse_item() {
        Token head = expect(TokKind::Ident, "a statement keyword");
        const std::string& w = head.text;
        if (w == "chart") {
            Statement st;
            st.kind = Statement::K::Chart;
            st.span = head.span;
            st.names = parse_name_list();
            if (st.names.empty())
                throw ParseError("a chart needs at least one coordinate", head.span);
            return st;
        }
        if (w == "fibration") {
            Statement st;
            st.kind = Statement::K::Fibration;
            st.span = head.span;
            expect_word("base");
            st.names = parse_name_list();
            expect_word("section");
            st.section = parse_name_list();
            return st;
        }
        if (w == "form" || w == "field" || w == "observable") {
            Statement st;
            st.kind = (w == "form")    ? Statement::K::Form
                      : (w == "field") ? Statement::K::Field
                                       : Statement::K::Observable;
            st.span = head.span;
            st.names.push_back(expect(TokKind::Ident, "a name").text);
            expect(TokKind::Assign, "'='");
            st.rhs = parse_expr();
            return st;
        }
        if (w == "omega" || w == "potential") {
            Statement st;
            st.kind = (w == "omega") ? Statement::K::Omega : Statement::K::Potential;
            st.span = head.span;
            expect(TokKind::Assign, "'='");
            st.rhs = parse_expr();
            expect_word("degree");
            st.degree = parse_uint("the structure degree");
            return st;
        }
        if (w == "action") {
            Statement st;
            st.kind = Statement::K::Action;
            st.span = head.span;
            st.exprs = parse_expr_list();
            return st;
        }
        if (w == "structconst") {
            Statement st;
            st.kind = Statement::K::StructConst;
            st.span = head.span;
            expect(TokKind::LBracket, "'['");
            st.index[0] = parse_uint("an index");
            expect(TokKind::Comma, "','");
            st.index[1] = parse_uint("an index");
            expect(TokKind::Comma, "','");
            st.index[2] = parse_uint("an index");
            expect(TokKind::RBracket, "']'");
            expect(TokKind::Assign, "'='");
            st.rhs = parse_expr();
            return st;
        }
        if (w == "moment") {
            Statement st;
            st.span = head.span;
            if (at_word("from")) {
                advance();
                expect_word("potential");
                st.kind = Statement::K::MomentFromPotential;
            } else {
                st.kind = Statement::K::Moment;
                st.exprs = parse_expr_list();
            }
            return st;
        }
        if (w == "level") {
            Statement st;
            st.kind = Statement::K::Level;
            st.span = head.span;
            st.exprs = parse_expr_list();
            return st;
        }
        if (w == "constraints") {
            Statement st;
            st.span = head.span;
            if (at_word("from")) {
                advance();
                expect_word("moment");
                st.kind = Statement::K::ConstraintsFromMoment;
            } else {
                st.kind = Statement::K::Constraints;
                st.exprs = parse_expr_list();
            }
            return st;
        }
        if (w == "sample") {
            Statement st;
            st.kind = Statement::K::Sample;
            st.span = head.span;
            st.exprs = parse_expr_list();
            return st;
        }
        if (w == "check") return parse_check(head.span);
        if (w == "reduce") {
            Query q;
            q.span = head.span;
            if (at_word("observable")) {
                advance();
                q.kind = Query::K::ReduceObservable;
                q.exprs.push_back(parse_expr());
            } else {
                if (at_word("not")) {
                    advance();
                    q.negate = true;
                }
                expect_word("equal");
                q.kind = Query::K::ReduceEqual;
                q.exprs.push_back(parse_expr());
                expect(TokKind::Comma, "','");
                q.exprs.push_back(parse_expr());
            }
            return q;
        }
        if (w == "reduced-basis") {
            Query q;
            q.span = head.span;
            if (at_word("from")) {
                advance();
                expect_word("sample");
                q.kind = Query::K::ReducedBasisSample;
            } else {
                expect_word("degree");
                expect(TokKind::Assign, "'='");
                q.kind = Query::K::ReducedBasis;
                q.degree = parse_uint("a degree");
            }
            if (at_word("expect")) {
                advance();
                q.expects = parse_expr_list();
                q.has_expects = true;
            }
            return q;
        }
        if (w == "jacobi") {
            Query q;
            q.kind = Query::K::Jacobi;
            q.span = head.span;
            expect_word("arity");
            expect(TokKind::Assign, "'='");
            q.arity = parse_uint("an arity");
            if (at_word("trials")) {
                advance();
                expect(TokKind::Assign, "'='");
                q.trials = parse_uint("a trial count");
            }
            return q;
        }
        throw ParseError("unknown statement '" + w + "'", head.span);
    }

    Query parse_check(SourceSpan span) {
        Query q;
        q.span = span;
        Token t = expect(TokKind::Ident, "a check kind");
        if (t.text == "not") {
            q.negate = true;
            t = expect(TokKind::Ident, "a check kind");
        }
        const std::string& w = t.text;
        auto no_negation = [&] {
            if (q.negate)
                throw ParseError("'" + w + "' cannot be negated", t.span);
        };
        if (w == "nondegenerate") {
            no_negation();
            q.kind = Query::K::Nondegenerate;
            if (at_word("expect")) {
                advance();
                Token e = expect(TokKind::Ident, "yes, no, or unknown");
                if (e.text != "yes" && e.text != "no" && e.text != "unknown")
                    throw ParseError("expected yes, no, or unknown", e.span);
                q.expect_word = e.text;
            }
            return q;
        }
        if (w == "action") {
            no_negation();
            q.kind = Query::K::Action;
            return q;
        }
        if (w == "moment") {
            no_negation();
            q.kind = Query::K::Moment;
            return q;
        }
        if (w == "closure") {
            no_negation();
            q.kind = Query::K::Closure;
            return q;
        }
        if (w == "descent") {
            no_negation();
            q.kind = Query::K::Descent;
            q.exprs = parse_expr_list();
            return q;
        }
        if (w == "tangent") {
            q.kind = Query::K::Tangent;
            q.exprs.push_back(parse_expr());
            return q;
        }
        if (w == "reducible" || w == "vanishing") {
            Token kindw = expect(TokKind::Ident, "form, field, or observable");
            bool red = (w == "reducible");
            if (kindw.text == "form")
                q.kind = red ? Query::K::ReducibleForm : Query::K::VanishingForm;
            else if (kindw.text == "field")
                q.kind = red ? Query::K::ReducibleField : Query::K::VanishingField;
            else if (kindw.text == "observable")
                q.kind = red ? Query::K::ReducibleObservable : Query::K::VanishingObservable;
            else
                throw ParseError("expected form, field, or observable", kindw.span);
            q.exprs.push_back(parse_expr());
            return q;
        }
        if (w == "member") {
            q.kind = Query::K::Member;
            q.exprs.push_back(parse_expr());
            return q;
        }
        if (w == "first-class") {
            q.kind = Query::K::FirstClass;
            q.exprs.push_back(parse_expr());
            return q;
        }
        if (w == "casimir") {
            q.kind = Query::K::Casimir;
            q.exprs.push_back(parse_expr());
            return q;
        }
        if (w == "form" || w == "field") {
            no_negation();
            q.kind = (w == "form") ? Query::K::FormEqual : Query::K::FieldEqual;
            q.exprs.push_back(parse_expr());
            expect(TokKind::EqEq, "'=='");
            q.exprs.push_back(parse_expr());
            return q;
        }
        throw ParseError("unknown check '" + w + "'", t.span);
    }
};

} // namespace detail

inline Scenario parse_scenario(const std::string& src) {
    return detail::Parser(lex_scenario(src)).parse();
}

// ---------------------------------------------------------------------------
// Evaluation and execution
// ---------------------------------------------------------------------------

using Value = std::variant<Rational, Poly, FormExpr, FieldExpr>;

struct VerdictRecord {
    std::string query;
    int line = 0;
    std::string kind;
    std::string result;
    bool pass = false;
    std::vector<std::string> certificates;
    std::optional<std::vector<Rational>> counterexample;
    nlohmann::ordered_json details; // null unless the query has extra payload
    std::optional<std::string> error;
    long long time_ms = 0;
};

struct RunResult {
    std::vector<VerdictRecord> verdicts;
    bool all_pass() const {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }
    bool any_error() const {
        for (const auto& v : verdicts)
            if (v.error) return true;
        return false;
    }
};

namespace detail {

inline std::string rat_str(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

class Runner {
public:
    Runner(const Scenario& sc, MonomialOrder order) : sc_(sc), order_(order) {}

    RunResult run() {
        RunResult out;
        for (const ScenarioItem& item : sc_.items) {
            if (std::holds_alternative<Statement>(item)) {
                const Statement& st = std::get<Statement>(item);
                try {
                    exec_statement(st);
                } catch (const EngineError& e) {
                    throw ParseError(e.what(), st.span);
                }
            } else {
                out.verdicts.push_back(exec_query(std::get<Query>(item)));
            }
        }
        return out;
    }

private:
    const Scenario& sc_;
    MonomialOrder order_;

    ChartPtr chart_;
    std::optional<Fibration> fibration_;
    std::optional<FormExpr> theta_;
    std::optional<PlecticStructure> plectic_;
    std::map<std::string, Value> named_;
    std::map<std::string, Observable> observables_;
    std::optional<std::vector<FieldExpr>> action_fields_;
    std::map<std::array<long, 3>, Rational> cdata_;
    std::optional<std::vector<FormExpr>> moment_components_;
    std::optional<std::vector<FormExpr>> level_forms_;
    std::optional<Ideal> constraints_;
    std::vector<Observable> sample_;
    std::optional<ConstraintAction> ca_;
    std::optional<std::string> ca_error_;

    // ---- helpers -----------------------------------------------------------

    const ChartPtr& chart() const {
        if (!chart_) throw EngineError("declare the chart first");
        return chart_;
    }
    const PlecticStructure& plectic() const {
        if (!plectic_) throw EngineError("no plectic structure declared");
        return *plectic_;
    }

    LieAlgebraAction make_action() const {
        std::vector<FieldExpr> fields =
            action_fields_ ? *action_fields_ : std::vector<FieldExpr>{};
        LieAlgebraAction a = LieAlgebraAction::abelian(chart(), std::move(fields));
        if (!cdata_.empty()) {
            std::size_t r = a.basis_fields.size();
            a.structure_constants.assign(
                r, std::vector<std::vector<Rational>>(r, std::vector<Rational>(r, 0)));
            for (const auto& [ix, val] : cdata_)
                a.structure_constants[static_cast<std::size_t>(ix[0])]
                                     [static_cast<std::size_t>(ix[1])]
                                     [static_cast<std::size_t>(ix[2])] = val;
        }
        return a;
    }

    MomentMap make_moment() const {
        if (!moment_components_) throw EngineError("no moment map declared");
        MomentMap m;
        m.action = make_action();
        m.components = *moment_components_;
        if (m.components.size() != m.action.basis_fields.size())
            throw EngineError("moment components do not match the action dimension");
        if (level_forms_) {
            if (level_forms_->size() != m.components.size())
                throw EngineError("level forms do not match the action dimension");
            m.level = *level_forms_;
        } else {
            unsigned deg = plectic().n() - 1;
            m.level.assign(m.components.size(), FormExpr::zero(chart(), deg));
        }
        return m;
    }

    const ConstraintAction& ca() {
        if (ca_) return *ca_;
        if (ca_error_) throw EngineError(*ca_error_);
        if (!constraints_) throw EngineError("no constraints declared");
        try {
            ca_.emplace(plectic(), *constraints_, make_action());
        } catch (const EngineError& e) {
            ca_error_ = e.what();
            throw;
        }
        return *ca_;
    }

    // ---- expression evaluation --------------------------------------------

    Poly as_poly(const Value& v) const {
        if (std::holds_alternative<Rational>(v))
            return Poly::constant(chart(), std::get<Rational>(v));
        if (std::holds_alternative<Poly>(v)) return std::get<Poly>(v);
        if (std::holds_alternative<FormExpr>(v)) {
            const FormExpr& a = std::get<FormExpr>(v);
            if (a.degree() == 0) return a.scalar_part();
            throw EngineError("expected a scalar, got a form of degree " +
                              std::to_string(a.degree()));
        }
        throw EngineError("expected a scalar, got a vector field");
    }

    FormExpr as_form(const Value& v, const ChartPtr& c) const {
        if (std::holds_alternative<FormExpr>(v)) return std::get<FormExpr>(v);
        if (std::holds_alternative<Poly>(v))
            return FormExpr::scalar(std::get<Poly>(v));
        if (std::holds_alternative<Rational>(v))
            return FormExpr::scalar(Poly::constant(c, std::get<Rational>(v)));
        throw EngineError("expected a form, got a vector field");
    }

    FieldExpr as_field(const Value& v) const {
        if (std::holds_alternative<FieldExpr>(v)) return std::get<FieldExpr>(v);
        throw EngineError("expected a vector field");
    }

    Rational as_rational(const Value& v) const {
        if (std::holds_alternative<Rational>(v)) return std::get<Rational>(v);
        if (std::holds_alternative<Poly>(v)) {
            const Poly& p = std::get<Poly>(v);
            if (p.is_constant()) return p.constant_value();
        }
        throw EngineError("expected a rational constant");
    }

    static bool is_field(const Value& v) {
        return std::holds_alternative<FieldExpr>(v);
    }
    static bool is_form(const Value& v) {
        return std::holds_alternative<FormExpr>(v);
    }

    Value eval(const ExprPtr& e, const ChartPtr& c) const {
        switch (e->kind) {
            case Expr::K::Number: return Rational(e->text);
            case Expr::K::Ident: {
                if (c->index_of(e->text) >= 0) return Poly::variable(c, e->text);
                auto it = named_.find(e->text);
                if (it != named_.end()) {
                    const Value& v = it->second;
                    if (std::holds_alternative<Rational>(v)) return v;
                    ChartPtr vc = std::holds_alternative<Poly>(v)
                                      ? std::get<Poly>(v).chart()
                                      : (std::holds_alternative<FormExpr>(v)
                                             ? std::get<FormExpr>(v).chart()
                                             : std::get<FieldExpr>(v).chart());
                    if (!same_chart(vc, c))
                        throw EngineError("name '" + e->text +
                                          "' lives on a different chart");
                    return v;
                }
                throw EngineError("unknown name '" + e->text + "'");
            }
            case Expr::K::Unary: {
                Value v = eval(e->args[0], c);
                if (std::holds_alternative<Rational>(v)) return -std::get<Rational>(v);
                if (std::holds_alternative<Poly>(v))
                    return Rational(-1) * std::get<Poly>(v);
                if (std::holds_alternative<FormExpr>(v)) return -std::get<FormExpr>(v);
                return Rational(-1) * std::get<FieldExpr>(v);
            }
            case Expr::K::Binary: return eval_binary(e, c);
            case Expr::K::Call: return eval_call(e, c);
        }
        throw EngineError("unreachable expression kind");
    }

    Value eval_binary(const ExprPtr& e, const ChartPtr& c) const {
        const std::string& op = e->text;
        Value a = eval(e->args[0], c);
        Value b = eval(e->args[1], c);
        if (op == "+" || op == "-") {
            bool minus = (op == "-");
            if (is_field(a) || is_field(b)) {
                FieldExpr u = as_field(a), v = as_field(b);
                return minus ? u - v : u + v;
            }
            if (is_form(a) || is_form(b)) {
                FormExpr u = as_form(a, c), v = as_form(b, c);
                if (u.degree() != v.degree())
                    throw EngineError("degree mismatch: cannot combine a " +
                                      std::to_string(u.degree()) + "-form and a " +
                                      std::to_string(v.degree()) + "-form");
                return minus ? u - v : u + v;
            }
            if (std::holds_alternative<Rational>(a) &&
                std::holds_alternative<Rational>(b)) {
                Rational x = std::get<Rational>(a), y = std::get<Rational>(b);
                return minus ? Rational(x - y) : Rational(x + y);
            }
            Poly x = as_poly(a), y = as_poly(b);
            return minus ? x - y : x + y;
        }
        if (op == "*") {
            if (is_field(a) && is_field(b))
                throw EngineError("cannot multiply two vector fields");
            if (is_field(a) || is_field(b)) {
                const Value& scalar = is_field(a) ? b : a;
                const FieldExpr& f = is_field(a) ? std::get<FieldExpr>(a)
                                                 : std::get<FieldExpr>(b);
                if (is_form(scalar))
                    throw EngineError("cannot multiply a field by a form (use iota)");
                return as_poly(scalar) * f;
            }
            if (is_form(a) && is_form(b)) {
                // allow plain multiplication when one side is a 0-form
                const FormExpr& u = std::get<FormExpr>(a);
                const FormExpr& v = std::get<FormExpr>(b);
                if (u.degree() != 0 && v.degree() != 0)
                    throw EngineError("use ^ for the wedge product of forms");
                return u.degree() == 0 ? u.scalar_part() * v : v.scalar_part() * u;
            }
            if (is_form(a) || is_form(b)) {
                const Value& scalar = is_form(a) ? b : a;
                const FormExpr& f = is_form(a) ? std::get<FormExpr>(a)
                                               : std::get<FormExpr>(b);
                return as_poly(scalar) * f;
            }
            if (std::holds_alternative<Rational>(a) &&
                std::holds_alternative<Rational>(b))
                return Rational(std::get<Rational>(a) * std::get<Rational>(b));
            return as_poly(a) * as_poly(b);
        }
        if (op == "/") {
            Rational r = as_rational(b);
            if (r == 0) throw EngineError("division by zero");
            Rational inv = Rational(1) / r;
            if (std::holds_alternative<Rational>(a))
                return Rational(std::get<Rational>(a) * inv);
            if (std::holds_alternative<Poly>(a)) return inv * std::get<Poly>(a);
            if (std::holds_alternative<FormExpr>(a)) return inv * std::get<FormExpr>(a);
            return inv * std::get<FieldExpr>(a);
        }
        if (op == "^") {
            if (is_field(a) || is_field(b))
                throw EngineError("^ does not apply to vector fields");
            if (is_form(a) || is_form(b)) {
                FormExpr u = as_form(a, c), v = as_form(b, c);
                return wedge(u, v);
            }
            Rational exp = as_rational(b);
            if (boost::multiprecision::denominator(exp) != 1 || exp < 0)
                throw EngineError("exponent must be a non-negative integer");
            if (exp > 64) throw EngineError("exponent too large");
            long k = boost::multiprecision::numerator(exp).convert_to<long>();
            if (std::holds_alternative<Rational>(a)) {
                Rational base = std::get<Rational>(a), out = 1;
                for (long i = 0; i < k; ++i) out *= base;
                return out;
            }
            Poly base = as_poly(a);
            Poly out = Poly::constant(c, Rational(1));
            for (long i = 0; i < k; ++i) out = out * base;
            return out;
        }
        throw EngineError("unknown operator '" + op + "'");
    }

    Value eval_call(const ExprPtr& e, const ChartPtr& c) const {
        const std::string& fn = e->text;
        auto need_args = [&](std::size_t n) {
            if (e->args.size() != n)
                throw EngineError(fn + " takes " + std::to_string(n) +
                                  (n == 1 ? " argument" : " arguments"));
        };
        if (fn == "d") {
            need_args(1);
            Value v = eval(e->args[0], c);
            if (is_field(v)) throw EngineError("cannot apply d to a vector field");
            if (std::holds_alternative<Rational>(v)) return FormExpr::zero(c, 1);
            return exterior_derivative(as_form(v, c));
        }
        if (fn == "e") {
            need_args(1);
            const ExprPtr& arg = e->args[0];
            if (arg->kind != Expr::K::Ident || c->index_of(arg->text) < 0)
                throw EngineError("e(...) expects a coordinate name of the chart");
            return FieldExpr::frame(c, arg->text);
        }
        if (fn == "iota") {
            need_args(2);
            FieldExpr v = as_field(eval(e->args[0], c));
            FormExpr a = as_form(eval(e->args[1], c), c);
            return interior_product(v, a);
        }
        if (fn == "lie") {
            need_args(2);
            FieldExpr v = as_field(eval(e->args[0], c));
            Value x = eval(e->args[1], c);
            if (is_field(x))
                throw EngineError("use bracket(u, v) for the bracket of fields");
            if (is_form(x)) return lie_derivative(v, std::get<FormExpr>(x));
            return v.apply(as_poly(x));
        }
        if (fn == "bracket") {
            need_args(2);
            return lie_bracket(as_field(eval(e->args[0], c)),
                               as_field(eval(e->args[1], c)));
        }
        if (fn == "prolong") {
            need_args(1);
            if (!fibration_) throw EngineError("prolong requires a fibration declaration");
            if (!theta_) throw EngineError("prolong requires a potential declaration");
            FieldExpr w = as_field(eval(e->args[0], fibration_->base));
            return prolong_field(*fibration_, *theta_, w);
        }
        if (fn == "pair" || fn == "lower" || fn == "canonical")
            throw EngineError("'" + fn + "' is only allowed where an observable is expected");
        throw EngineError("unknown function '" + fn + "'");
    }

    Observable make_observable(const ExprPtr& e) const {
        const PlecticStructure& p = plectic();
        if (e->kind == Expr::K::Call && e->text == "pair") {
            if (e->args.size() != 2) throw EngineError("pair takes 2 arguments");
            FieldExpr v = as_field(eval(e->args[0], chart()));
            FormExpr a = as_form(eval(e->args[1], chart()), chart());
            return Observable::pair(p, v, a);
        }
        if (e->kind == Expr::K::Call && e->text == "lower") {
            if (e->args.size() != 2) throw EngineError("lower takes 2 arguments");
            Rational d = as_rational(eval(e->args[0], chart()));
            if (boost::multiprecision::denominator(d) != 1)
                throw EngineError("lower degree must be an integer");
            int deg = boost::multiprecision::numerator(d).convert_to<int>();
            FormExpr a = as_form(eval(e->args[1], chart()), chart());
            return Observable::lower(p, deg, a);
        }
        if (e->kind == Expr::K::Call && e->text == "canonical") {
            if (e->args.size() != 1) throw EngineError("canonical takes 1 argument");
            if (!theta_) throw EngineError("canonical requires a potential declaration");
            FieldExpr v = as_field(eval(e->args[0], chart()));
            return Observable::pair(p, v, interior_product(v, *theta_));
        }
        FormExpr alpha = as_form(eval(e, chart()), chart());
        FieldExpr v = hamiltonian_field_for(p, alpha);
        return Observable::pair(p, v, alpha);
    }

    Observable obsref(const ExprPtr& e) const {
        if (e->kind == Expr::K::Ident) {
            auto it = observables_.find(e->text);
            if (it != observables_.end()) return it->second;
        }
        return make_observable(e);
    }

    // ---- statement execution ----------------------------------------------

    void check_fresh_name(const std::string& name) const {
        if (chart_ && chart_->index_of(name) >= 0)
            throw EngineError("name '" + name + "' shadows a chart variable");
        if (named_.count(name) || observables_.count(name))
            throw EngineError("name '" + name + "' is already declared");
    }

    void exec_statement(const Statement& st) {
        using K = Statement::K;
        switch (st.kind) {
            case K::Chart: {
                if (chart_) throw EngineError("chart already declared");
                chart_ = make_chart("M", st.names);
                return;
            }
            case K::Fibration: {
                if (fibration_) throw EngineError("fibration already declared");
                for (const std::string& v : st.names)
                    if (chart()->index_of(v) < 0)
                        throw EngineError("fibration base variable '" + v +
                                          "' is not a chart variable");
                for (const std::string& v : st.section)
                    if (std::find(st.names.begin(), st.names.end(), v) == st.names.end())
                        throw EngineError("section variable '" + v +
                                          "' is not a base variable");
                fibration_ = Fibration{make_chart("base", st.names), chart(), st.section};
                return;
            }
            case K::Form: {
                check_fresh_name(st.names[0]);
                Value v = eval(st.rhs, chart());
                if (is_field(v))
                    throw EngineError("'form' declares a form, got a vector field");
                named_[st.names[0]] = as_form(v, chart());
                return;
            }
            case K::Field: {
                check_fresh_name(st.names[0]);
                named_[st.names[0]] = as_field(eval(st.rhs, chart()));
                return;
            }
            case K::Observable: {
                check_fresh_name(st.names[0]);
                observables_.emplace(st.names[0], make_observable(st.rhs));
                return;
            }
            case K::Omega: {
                if (plectic_) throw EngineError("plectic structure already declared");
                FormExpr omega = as_form(eval(st.rhs, chart()), chart());
                if (omega.degree() != static_cast<unsigned>(st.degree) + 1)
                    throw EngineError("degree mismatch: omega of degree " +
                                      std::to_string(st.degree) + " must be a " +
                                      std::to_string(st.degree + 1) + "-form, got a " +
                                      std::to_string(omega.degree()) + "-form");
                plectic_.emplace(chart(), omega, static_cast<unsigned>(st.degree));
                return;
            }
            case K::Potential: {
                if (plectic_) throw EngineError("plectic structure already declared");
                FormExpr theta = as_form(eval(st.rhs, chart()), chart());
                if (theta.degree() != static_cast<unsigned>(st.degree))
                    throw EngineError("degree mismatch: a potential of degree " +
                                      std::to_string(st.degree) + " must be a " +
                                      std::to_string(st.degree) + "-form, got a " +
                                      std::to_string(theta.degree()) + "-form");
                theta_ = theta;
                plectic_.emplace(chart(), exterior_derivative(theta),
                                 static_cast<unsigned>(st.degree));
                return;
            }
            case K::Action: {
                if (action_fields_) throw EngineError("action already declared");
                std::vector<FieldExpr> fields;
                for (const ExprPtr& e : st.exprs)
                    fields.push_back(as_field(eval(e, chart())));
                action_fields_ = std::move(fields);
                return;
            }
            case K::StructConst: {
                if (!action_fields_)
                    throw EngineError("declare the action before structconst");
                long r = static_cast<long>(action_fields_->size());
                for (long ix : st.index)
                    if (ix < 1 || ix > r)
                        throw EngineError("structconst index out of range");
                cdata_[{st.index[0] - 1, st.index[1] - 1, st.index[2] - 1}] =
                    as_rational(eval(st.rhs, chart()));
                return;
            }
            case K::Moment: {
                if (moment_components_) throw EngineError("moment already declared");
                std::vector<FormExpr> comps;
                for (const ExprPtr& e : st.exprs)
                    comps.push_back(as_form(eval(e, chart()), chart()));
                moment_components_ = std::move(comps);
                return;
            }
            case K::MomentFromPotential: {
                if (moment_components_) throw EngineError("moment already declared");
                if (!theta_) throw EngineError("no potential declared");
                MomentMap m = moment_from_potential(plectic(), make_action(), *theta_);
                moment_components_ = m.components;
                return;
            }
            case K::Level: {
                if (level_forms_) throw EngineError("level already declared");
                std::vector<FormExpr> forms;
                for (const ExprPtr& e : st.exprs)
                    forms.push_back(as_form(eval(e, chart()), chart()));
                level_forms_ = std::move(forms);
                return;
            }
            case K::Constraints: {
                if (constraints_) throw EngineError("constraints already declared");
                std::vector<Poly> gens;
                for (const ExprPtr& e : st.exprs)
                    gens.push_back(as_poly(eval(e, chart())));
                constraints_.emplace(chart(), std::move(gens), order_);
                return;
            }
            case K::ConstraintsFromMoment: {
                if (constraints_) throw EngineError("constraints already declared");
                constraints_ = level_set_ideal(make_moment(), order_);
                return;
            }
            case K::Sample: {
                for (const ExprPtr& e : st.exprs) sample_.push_back(obsref(e));
                return;
            }
        }
    }

    // ---- query execution ---------------------------------------------------

    static std::string kind_name(Query::K k) {
        using K = Query::K;
        switch (k) {
            case K::Nondegenerate: return "nondegenerate";
            case K::Action: return "action";
            case K::Moment: return "moment";
            case K::Closure: return "closure";
            case K::Descent: return "descent";
            case K::Tangent: return "tangent";
            case K::ReducibleForm: return "reducible-form";
            case K::ReducibleField: return "reducible-field";
            case K::ReducibleObservable: return "reducible-observable";
            case K::VanishingForm: return "vanishing-form";
            case K::VanishingField: return "vanishing-field";
            case K::VanishingObservable: return "vanishing-observable";
            case K::Member: return "member";
            case K::FirstClass: return "first-class";
            case K::Casimir: return "casimir";
            case K::FormEqual: return "form-equal";
            case K::FieldEqual: return "field-equal";
            case K::ReduceObservable: return "reduce-observable";
            case K::ReduceEqual: return "reduce-equal";
            case K::ReducedBasis: return "reduced-basis";
            case K::ReducedBasisSample: return "reduced-basis-sample";
            case K::Jacobi: return "jacobi";
        }
        return "";
    }

    void boolean_verdict(VerdictRecord& rec, bool value, bool negate) const {
        rec.result = value ? "true" : "false";
        rec.pass = (value != negate);
    }

    VerdictRecord exec_query(const Query& q) {
        VerdictRecord rec;
        rec.query = print_query(q);
        rec.line = q.span.line;
        rec.kind = kind_name(q.kind);
        auto start = std::chrono::steady_clock::now();
        try {
            dispatch_query(q, rec);
        } catch (const EngineError& e) {
            rec.error = e.what();
            rec.result = "error";
            rec.pass = false;
        }
        rec.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        return rec;
    }

    void dispatch_query(const Query& q, VerdictRecord& rec) {
        using K = Query::K;
        switch (q.kind) {
            case K::Nondegenerate: {
                Tristate t = plectic().nondegenerate();
                rec.result = tristate_str(t);
                std::string want = q.expect_word.empty() ? "yes" : q.expect_word;
                rec.pass = (rec.result == want);
                const NondegCertificate& cert = plectic().certificate();
                if (t == Tristate::yes)
                    rec.certificates.push_back("constant maximal minor " +
                                               rat_str(cert.minor));
                else if (!cert.note.empty())
                    rec.certificates.push_back(cert.note);
                if (t == Tristate::no) rec.counterexample = cert.point;
                return;
            }
            case K::Action: {
                ActionReport rep = verify_action(make_action());
                boolean_verdict(rec, rep.ok, false);
                rec.certificates = rep.violations;
                return;
            }
            case K::Moment: {
                MomentReport rep = check_covariant_moment_map(plectic(), make_moment());
                boolean_verdict(rec, rep.ok, false);
                rec.certificates = rep.violations;
                return;
            }
            case K::Closure: return closure_query(rec);
            case K::Descent: {
                std::vector<Poly> fs;
                for (const ExprPtr& e : q.exprs) fs.push_back(as_poly(eval(e, chart())));
                DescentReport rep = check_poisson_descent(ca(), fs);
                boolean_verdict(rec, rep.ok, false);
                rec.certificates = rep.violations;
                nlohmann::ordered_json d;
                d["pairs_checked"] = rep.pairs_checked;
                d["pairs_skipped"] = rep.pairs_skipped;
                d["notes"] = rep.notes;
                rec.details = d;
                return;
            }
            case K::Tangent: {
                TangencyResult r = is_tangent(ca(), as_field(eval(q.exprs[0], chart())));
                boolean_verdict(rec, r.tangent, q.negate);
                if (!r.tangent && r.residual)
                    rec.certificates.push_back(
                        "applying the field to constraint generator " +
                        std::to_string(r.generator_index + 1) + " gives " +
                        r.residual->str());
                return;
            }
            case K::ReducibleForm: {
                ReductionVerdict v =
                    is_reducible_form(ca(), as_form(eval(q.exprs[0], chart()), chart()));
                boolean_verdict(rec, v.reducible, q.negate);
                rec.certificates = v.certificates;
                rec.counterexample = v.counterexample;
                return;
            }
            case K::ReducibleField: {
                ReductionVerdict v =
                    is_reducible_field(ca(), as_field(eval(q.exprs[0], chart())));
                boolean_verdict(rec, v.reducible, q.negate);
                rec.certificates = v.certificates;
                return;
            }
            case K::ReducibleObservable: {
                ReductionVerdict v = is_reducible_observable(ca(), obsref(q.exprs[0]));
                boolean_verdict(rec, v.reducible, q.negate);
                rec.certificates = v.certificates;
                rec.counterexample = v.counterexample;
                return;
            }
            case K::VanishingForm: {
                bool b =
                    in_vanishing_form_ideal(ca(), as_form(eval(q.exprs[0], chart()), chart()));
                boolean_verdict(rec, b, q.negate);
                return;
            }
            case K::VanishingField: {
                bool b = in_vanishing_field_ideal(ca(), as_field(eval(q.exprs[0], chart())));
                boolean_verdict(rec, b, q.negate);
                return;
            }
            case K::VanishingObservable: {
                ReductionVerdict v = in_vanishing_observable_ideal(ca(), obsref(q.exprs[0]));
                boolean_verdict(rec, v.in_vanishing_ideal, q.negate);
                rec.certificates = v.certificates;
                return;
            }
            case K::Member: {
                if (!constraints_) throw EngineError("no constraints declared");
                Poly f = as_poly(eval(q.exprs[0], chart()));
                IdealMembership m = constraints_->contains(f);
                boolean_verdict(rec, m.member, q.negate);
                if (!m.member)
                    rec.certificates.push_back("normal form " +
                                               constraints_->normal_form(f).str());
                return;
            }
            case K::FirstClass: {
                SymplecticVerdicts s =
                    symplectic_predicates(ca(), as_poly(eval(q.exprs[0], chart())));
                boolean_verdict(rec, s.first_class, q.negate);
                return;
            }
            case K::Casimir: {
                SymplecticVerdicts s =
                    symplectic_predicates(ca(), as_poly(eval(q.exprs[0], chart())));
                boolean_verdict(rec, s.casimir_along_n, q.negate);
                return;
            }
            case K::FormEqual: {
                FormExpr a = as_form(eval(q.exprs[0], chart()), chart());
                FormExpr b = as_form(eval(q.exprs[1], chart()), chart());
                bool eq = (a == b);
                boolean_verdict(rec, eq, false);
                if (!eq) {
                    if (a.degree() == b.degree())
                        rec.certificates.push_back("difference " + (a - b).str());
                    else
                        rec.certificates.push_back("degrees differ (" +
                                                   std::to_string(a.degree()) + " vs " +
                                                   std::to_string(b.degree()) + ")");
                }
                return;
            }
            case K::FieldEqual: {
                FieldExpr a = as_field(eval(q.exprs[0], chart()));
                FieldExpr b = as_field(eval(q.exprs[1], chart()));
                bool eq = (a == b);
                boolean_verdict(rec, eq, false);
                if (!eq) rec.certificates.push_back("difference " + (a - b).str());
                return;
            }
            case K::ReduceObservable: {
                Observable o = obsref(q.exprs[0]);
                ReductionVerdict v = is_reducible_observable(ca(), o);
                if (!v.reducible) {
                    rec.result = "not reducible";
                    rec.pass = false;
                    rec.certificates = v.certificates;
                    return;
                }
                ReductionVerdict van = msr::detail::vanishing_conditions(ca(), o);
                rec.result = van.in_vanishing_ideal ? "vanishes" : "survives";
                rec.pass = true;
                rec.certificates = van.certificates;
                return;
            }
            case K::ReduceEqual: {
                bool eq = reduced_equal(ca(), obsref(q.exprs[0]), obsref(q.exprs[1]));
                boolean_verdict(rec, eq, q.negate);
                return;
            }
            case K::ReducedBasis: {
                std::vector<Observable> reps =
                    reduced_basis_upto_degree(ca(), static_cast<int>(q.degree));
                std::vector<std::string> strs;
                for (const Observable& o : reps)
                    strs.push_back(o.form().scalar_part().str());
                nlohmann::ordered_json d;
                d["representatives"] = strs;
                rec.details = d;
                std::string joined;
                for (std::size_t i = 0; i < strs.size(); ++i)
                    joined += (i ? ", " : "") + strs[i];
                rec.result = "{" + joined + "}";
                rec.pass = true;
                if (q.has_expects) {
                    rec.pass = (q.expects.size() == reps.size());
                    for (std::size_t i = 0; rec.pass && i < reps.size(); ++i) {
                        Poly want = as_poly(eval(q.expects[i], chart()));
                        if (!(want - reps[i].form().scalar_part()).is_zero())
                            rec.pass = false;
                    }
                }
                return;
            }
            case K::ReducedBasisSample: {
                std::vector<Observable> reps = reduced_basis_from_ansatz(ca(), sample_);
                std::vector<std::string> strs;
                for (const Observable& o : reps) strs.push_back(o.str());
                nlohmann::ordered_json d;
                d["representatives"] = strs;
                rec.details = d;
                rec.result = std::to_string(reps.size()) + " classes";
                rec.pass = true;
                if (q.has_expects) {
                    rec.pass = (q.expects.size() == reps.size());
                    for (std::size_t i = 0; rec.pass && i < reps.size(); ++i) {
                        Observable want = obsref(q.expects[i]);
                        if (!(want.degree() == reps[i].degree() &&
                              want.field() == reps[i].field() &&
                              want.form() == reps[i].form()))
                            rec.pass = false;
                    }
                }
                return;
            }
            case K::Jacobi: return jacobi_query(q, rec);
        }
    }

    void closure_query(VerdictRecord& rec) {
        const ConstraintAction& c = ca();
        const PlecticStructure& p = plectic();
        std::vector<bool> red(sample_.size()), van(sample_.size());
        for (std::size_t i = 0; i < sample_.size(); ++i) {
            red[i] = is_reducible_observable(c, sample_[i]).reducible;
            van[i] = red[i] && msr::detail::vanishing_conditions(c, sample_[i])
                                   .in_vanishing_ideal;
        }
        long pairs = 0, triples = 0, skipped = 0;
        std::vector<std::string> violations;
        auto check_tuple = [&](const std::vector<std::size_t>& ix) {
            bool all_red = true, any_van = false;
            for (std::size_t i : ix) {
                all_red = all_red && red[i];
                any_van = any_van || van[i];
            }
            if (!all_red) {
                ++skipped;
                return;
            }
            std::vector<Observable> args;
            for (std::size_t i : ix) args.push_back(sample_[i]);
            Observable br = multibracket(p, args);
            std::string label = "bracket of sample entries (";
            for (std::size_t t = 0; t < ix.size(); ++t)
                label += (t ? ", " : "") + std::to_string(ix[t] + 1);
            label += ")";
            if (!is_reducible_observable(c, br).reducible) {
                violations.push_back(label + " is not reducible");
                return;
            }
            if (any_van &&
                !msr::detail::vanishing_conditions(c, br).in_vanishing_ideal)
                violations.push_back(label + " escapes the vanishing set");
        };
        for (std::size_t i = 0; i < sample_.size(); ++i)
            for (std::size_t j = i; j < sample_.size(); ++j) {
                ++pairs;
                check_tuple({i, j});
            }
        if (p.n() >= 2)
            for (std::size_t i = 0; i < sample_.size(); ++i)
                for (std::size_t j = i; j < sample_.size(); ++j)
                    for (std::size_t k = j; k < sample_.size(); ++k) {
                        ++triples;
                        check_tuple({i, j, k});
                    }
        boolean_verdict(rec, violations.empty(), false);
        rec.certificates = violations;
        nlohmann::ordered_json d;
        d["pairs"] = pairs;
        d["triples"] = triples;
        d["skipped"] = skipped;
        rec.details = d;
    }

    void jacobi_query(const Query& q, VerdictRecord& rec) {
        const PlecticStructure& p = plectic();
        unsigned arity = static_cast<unsigned>(q.arity);
        long trials = q.trials >= 0 ? q.trials : 20;
        JacobiReport rep = check_higher_jacobi(p, sample_, arity);
        std::vector<std::string> violations;
        for (const JacobiViolation& v : rep.violations) {
            std::string ix;
            for (std::size_t t = 0; t < v.indices.size(); ++t)
                ix += (t ? ", " : "") + std::to_string(v.indices[t] + 1);
            violations.push_back("arity " + std::to_string(v.arity) + " on entries (" +
                                 ix + "): " + v.detail);
        }

        // random rational-coefficient combinations, grouped by degree
        std::map<int, std::vector<std::size_t>> classes;
        for (std::size_t i = 0; i < sample_.size(); ++i)
            classes[sample_[i].degree()].push_back(i);
        long random_checked = 0;
        if (!classes.empty()) {
            std::mt19937 rng(757575u);
            std::uniform_int_distribution<long> coef(-3, 3);
            std::uniform_int_distribution<std::size_t> pick_class(0, classes.size() - 1);
            for (unsigned m = 1; m <= arity; ++m) {
                for (long t = 0; t < trials; ++t) {
                    std::vector<Observable> xs;
                    for (unsigned a = 0; a < m; ++a) {
                        auto it = classes.begin();
                        std::advance(it, pick_class(rng));
                        const std::vector<std::size_t>& members = it->second;
                        std::optional<Observable> combo;
                        bool nonzero = false;
                        for (std::size_t ix : members) {
                            Rational cval(coef(rng));
                            if (cval == 0) continue;
                            nonzero = true;
                            Observable term = cval * sample_[ix];
                            combo = combo ? (*combo + term) : term;
                        }
                        if (!nonzero) combo = sample_[members.front()];
                        xs.push_back(*combo);
                    }
                    ++random_checked;
                    std::optional<Observable> defect = jacobi_defect(p, xs);
                    if (defect && !defect->is_zero())
                        violations.push_back("random combination at arity " +
                                             std::to_string(m) + ": residual " +
                                             defect->str());
                }
            }
        }
        boolean_verdict(rec, violations.empty(), false);
        rec.certificates = violations;
        nlohmann::ordered_json d;
        d["sample_identities"] = rep.identities_checked;
        d["random_identities"] = random_checked;
        rec.details = d;
    }
};

} // namespace detail

inline RunResult run_scenario(const Scenario& sc,
                              MonomialOrder order = MonomialOrder::grevlex) {
    return detail::Runner(sc, order).run();
}

inline const char* order_name(MonomialOrder o) {
    return o == MonomialOrder::lex ? "lex" : "grevlex";
}

inline nlohmann::ordered_json run_result_json(const RunResult& rr,
                                              const std::string& label,
                                              MonomialOrder order) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["scenario"] = label;
    j["order"] = order_name(order);
    j["pass"] = rr.all_pass();
    j["errors"] = 0;
    int errors = 0;
    nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
    for (const VerdictRecord& v : rr.verdicts) {
        nlohmann::ordered_json r;
        r["query"] = v.query;
        r["line"] = v.line;
        r["kind"] = v.kind;
        r["result"] = v.result;
        r["pass"] = v.pass;
        r["certificates"] = v.certificates;
        if (v.counterexample) {
            nlohmann::ordered_json pt = nlohmann::ordered_json::array();
            for (const Rational& x : *v.counterexample) pt.push_back(detail::rat_str(x));
            r["counterexample"] = pt;
        } else {
            r["counterexample"] = nullptr;
        }
        r["details"] = v.details;
        if (v.error) {
            r["error"] = *v.error;
            ++errors;
        } else {
            r["error"] = nullptr;
        }
        r["time_ms"] = v.time_ms;
        verdicts.push_back(std::move(r));
    }
    j["errors"] = errors;
    j["verdicts"] = std::move(verdicts);
    return j;
}

inline std::string run_result_text(const RunResult& rr, const std::string& label,
                                   MonomialOrder order) {
    std::ostringstream os;
    os << "== " << label << " (order " << order_name(order) << ")\n";
    int width = static_cast<int>(std::to_string(rr.verdicts.size()).size());
    std::size_t passed = 0, failed = 0, errors = 0;
    for (std::size_t i = 0; i < rr.verdicts.size(); ++i) {
        const VerdictRecord& v = rr.verdicts[i];
        std::string tag = v.error ? "ERROR" : (v.pass ? "PASS " : "FAIL ");
        if (v.error)
            ++errors;
        else if (v.pass)
            ++passed;
        else
            ++failed;
        std::string num = std::to_string(i + 1);
        os << "[" << std::string(width - static_cast<int>(num.size()), ' ') << num
           << "] " << tag << " " << v.query << "  -> "
           << (v.error ? *v.error : v.result) << "\n";
        if (!v.pass)
            for (const std::string& c : v.certificates) os << "        " << c << "\n";
    }
    os << "summary: " << rr.verdicts.size() << " queries, " << passed << " passed, "
       << failed << " failed, " << errors << " errors\n";
    return os.str();
}

} // namespace msr
