#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "lru/base.hpp"
#include "lru/numutil.hpp"

namespace lru {

struct RingSpec;
using RingSpecPtr = std::shared_ptr<const RingSpec>;

// One term of a modulus polynomial: integer coefficient times a monomial in
// the scoped variables. `exps` is aligned with the owning node's scope list
// (base variables bottom-up, the node's own variable last).
struct PolyTerm {
    mpz_class coeff;
    std::vector<unsigned> exps;

    bool operator==(const PolyTerm& o) const { return coeff == o.coeff && exps == o.exps; }
};

// Abstract syntax of the ring DSL plus the composite nodes that only arise
// programmatically (tables, quotients, pullbacks).
struct RingSpec {
    enum class Node { Zmod, GF, QQ, PolyQuot, Product, Table, Quot, Pullback };

    Node node;

    u64 n = 0;                      // Zmod modulus or GF order
    RingSpecPtr base;               // PolyQuot base, Quot base
    RingSpecPtr left, right;        // Product / Pullback components
    std::string var;                // PolyQuot variable
    std::vector<PolyTerm> modulus;  // canonical terms, ascending (own-var degree first)

    u64 table_order = 0;            // Table
    std::vector<u64> add_table, mul_table;

    std::vector<u64> quot_gens;     // Quot: ideal generator indices in base

    std::vector<u64> pullback_fa, pullback_fb; // Pullback: total maps into the common codomain
    RingSpecPtr pullback_codomain;

    // Variables usable as coefficient literals in a modulus over this ring.
    std::vector<std::string> scope_vars() const {
        switch (node) {
        case Node::GF: {
            auto [p, a] = prime_power(n);
            (void)p;
            return a >= 2 ? std::vector<std::string>{"x"} : std::vector<std::string>{};
        }
        case Node::PolyQuot: {
            auto vs = base->scope_vars();
            vs.push_back(var);
            return vs;
        }
        default:
            return {};
        }
    }

    unsigned modulus_degree() const {
        unsigned d = 0;
        for (const auto& t : modulus) d = std::max(d, t.exps.back());
        return d;
    }

    bool equals(const RingSpec& o) const {
        if (node != o.node) return false;
        switch (node) {
        case Node::Zmod:
        case Node::GF:
            return n == o.n;
        case Node::QQ:
            return true;
        case Node::PolyQuot:
            return var == o.var && modulus == o.modulus && base->equals(*o.base);
        case Node::Product:
            return left->equals(*o.left) && right->equals(*o.right);
        case Node::Table:
            return table_order == o.table_order && add_table == o.add_table &&
                   mul_table == o.mul_table;
        case Node::Quot:
            return quot_gens == o.quot_gens && base->equals(*o.base);
        case Node::Pullback:
            return left->equals(*o.left) && right->equals(*o.right) &&
                   pullback_codomain->equals(*o.pullback_codomain) &&
                   pullback_fa == o.pullback_fa && pullback_fb == o.pullback_fb;
        }
        return false;
    }

    std::string print() const;
    nlohmann::json to_json() const;
    static RingSpecPtr from_json(const nlohmann::json& j);
};

namespace detail {

inline std::string print_modulus(const RingSpec& spec) {
    auto vars = spec.base->scope_vars();
    vars.push_back(spec.var);
    std::string out;
    for (const auto& t : spec.modulus) {
        bool neg = t.coeff < 0;
        mpz_class a = abs(t.coeff);
        std::vector<std::string> pieces;
        bool any_var = false;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (t.exps[i] == 0) continue;
            any_var = true;
            pieces.push_back(t.exps[i] == 1 ? vars[i]
                                            : vars[i] + "^" + std::to_string(t.exps[i]));
        }
        if (!any_var || a != 1) pieces.insert(pieces.begin(), a.get_str());
        std::string term;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (i) term += "*";
            term += pieces[i];
        }
        if (out.empty())
            out = (neg ? "-" : "") + term;
        else
            out += (neg ? "-" : "+") + term;
    }
    return out.empty() ? "0" : out;
}

} // namespace detail

inline std::string RingSpec::print() const {
    switch (node) {
    case Node::Zmod:
        return "Z/" + std::to_string(n);
    case Node::GF:
        return "GF(" + std::to_string(n) + ")";
    case Node::QQ:
        return "Q";
    case Node::PolyQuot:
        return base->print() + "[" + var + "]/(" + detail::print_modulus(*this) + ")";
    case Node::Product:
        return "product(" + left->print() + "," + right->print() + ")";
    case Node::Table:
        return "table(order=" + std::to_string(table_order) + ")";
    case Node::Quot: {
        std::string g;
        for (std::size_t i = 0; i < quot_gens.size(); ++i)
            g += (i ? "," : "") + std::to_string(quot_gens[i]);
        return "quot(" + base->print() + ";" + g + ")";
    }
    case Node::Pullback:
        return "pullback(" + left->print() + "," + right->print() + ")";
    }
    return "?";
}

inline nlohmann::json RingSpec::to_json() const {
    using nlohmann::json;
    switch (node) {
    case Node::Zmod:
        return json{{"kind", "zmod"}, {"n", n}};
    case Node::GF:
        return json{{"kind", "gf"}, {"q", n}};
    case Node::QQ:
        return json{{"kind", "qq"}};
    case Node::PolyQuot: {
        auto vars = base->scope_vars();
        vars.push_back(var);
        json terms = json::array();
        for (const auto& t : modulus) {
            json e = json::object();
            for (std::size_t i = 0; i < vars.size(); ++i)
                if (t.exps[i]) e[vars[i]] = t.exps[i];
            terms.push_back(json{{"c", t.coeff.get_str()}, {"e", e}});
        }
        return json{{"kind", "polyquot"}, {"base", base->to_json()}, {"var", var},
                    {"modulus", terms}};
    }
    case Node::Product:
        return json{{"kind", "product"}, {"left", left->to_json()}, {"right", right->to_json()}};
    case Node::Table:
        return json{{"kind", "table"}, {"order", table_order}, {"add", add_table},
                    {"mul", mul_table}};
    case Node::Quot:
        return json{{"kind", "quot"}, {"base", base->to_json()}, {"generators", quot_gens}};
    case Node::Pullback:
        return json{{"kind", "pullback"}, {"left", left->to_json()}, {"right", right->to_json()},
                    {"codomain", pullback_codomain->to_json()}, {"fa", pullback_fa},
                    {"fb", pullback_fb}};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Parser. Grammar:
//   ring := atom | ring "[" ident "]" "/(" poly ")" | "product(" ring "," ring ")"
//   atom := "Z/" nat | "GF(" nat ")" | "Q"
// Moduli are full integer-coefficient expressions in the scoped variables
// plus the new one; "^" binds tighter than "*". Whitespace is insignificant.
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    enum class Type { Ident, Int, Sym, End };
    Type type;
    std::string text;
    mpz_class value;
    std::size_t offset;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        tok_.offset = pos_;
        if (pos_ >= s_.size()) {
            tok_.type = Token::Type::End;
            tok_.text = "<end of input>";
            return;
        }
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            tok_.type = Token::Type::Int;
            tok_.text = std::string(s_.substr(start, pos_ - start));
            tok_.value = mpz_class(tok_.text);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            tok_.type = Token::Type::Ident;
            tok_.text = std::string(s_.substr(start, pos_ - start));
            return;
        }
        if (std::string("/[](),+-*^").find(c) != std::string::npos) {
            tok_.type = Token::Type::Sym;
            tok_.text = std::string(1, c);
            ++pos_;
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    Token tok_;
};

// Multivariate integer polynomial keyed by exponent vectors over a fixed
// variable scope; used only while parsing a modulus.
using PolyMap = std::map<std::vector<unsigned>, mpz_class>;

inline PolyMap poly_const(std::size_t nvars, const mpz_class& c) {
    PolyMap p;
    if (c != 0) p[std::vector<unsigned>(nvars, 0)] = c;
    return p;
}

inline PolyMap poly_var(std::size_t nvars, std::size_t i) {
    std::vector<unsigned> e(nvars, 0);
    e[i] = 1;
    PolyMap p;
    p[e] = 1;
    return p;
}

inline PolyMap poly_add(const PolyMap& a, const PolyMap& b, int sign_b = 1) {
    PolyMap r = a;
    for (const auto& [e, c] : b) {
        mpz_class& dst = r[e];
        dst += sign_b * c;
        if (dst == 0) r.erase(e);
    }
    return r;
}

inline PolyMap poly_mul(const PolyMap& a, const PolyMap& b) {
    PolyMap r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<unsigned> e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            mpz_class& dst = r[e];
            dst += ca * cb;
            if (dst == 0) r.erase(e);
        }
    return r;
}

inline PolyMap poly_pow(PolyMap a, unsigned k, std::size_t nvars) {
    PolyMap r = poly_const(nvars, 1);
    while (k) {
        if (k & 1) r = poly_mul(r, a);
        a = poly_mul(a, a);
        k >>= 1;
    }
    return r;
}

class Parser {
public:
    explicit Parser(std::string_view s) : lex_(s) {}

    RingSpecPtr parse_ring() {
        RingSpecPtr spec = parse_atom();
        while (lex_.peek().type == Token::Type::Sym && lex_.peek().text == "[")
            spec = parse_quotient_suffix(spec);
        return spec;
    }

    void expect_end() {
        if (lex_.peek().type != Token::Type::End)
            throw ParseError("trailing input after ring expression", lex_.peek().offset);
    }

private:
    Token expect_sym(const std::string& s) {
        const Token& t = lex_.peek();
        if (t.type != Token::Type::Sym || t.text != s)
            throw ParseError("expected '" + s + "', found " + describe(t), t.offset);
        return lex_.take();
    }

    Token expect_ident() {
        const Token& t = lex_.peek();
        if (t.type != Token::Type::Ident)
            throw ParseError("expected identifier, found " + describe(t), t.offset);
        return lex_.take();
    }

    Token expect_int() {
        const Token& t = lex_.peek();
        if (t.type != Token::Type::Int)
            throw ParseError("expected integer, found " + describe(t), t.offset);
        return lex_.take();
    }

    static std::string describe(const Token& t) {
        if (t.type == Token::Type::End) return "end of input";
        return "'" + t.text + "'";
    }

    RingSpecPtr parse_atom() {
        const Token& t = lex_.peek();
        if (t.type != Token::Type::Ident)
            throw ParseError("expected ring atom, found " + describe(t), t.offset);
        Token id = lex_.take();
        if (id.text == "Z") {
            expect_sym("/");
            Token n = expect_int();
            if (n.value < 2)
                throw ParseError("Z/n requires n >= 2", n.offset);
            if (!n.value.fits_ulong_p())
                throw ParseError("Z/n modulus out of range", n.offset);
            auto s = std::make_shared<RingSpec>();
            s->node = RingSpec::Node::Zmod;
            s->n = n.value.get_ui();
            return s;
        }
        if (id.text == "GF") {
            expect_sym("(");
            Token q = expect_int();
            expect_sym(")");
            if (!q.value.fits_ulong_p() || prime_power(q.value.get_ui()).first == 0)
                throw ParseError("GF(q) requires q a prime power", q.offset);
            auto s = std::make_shared<RingSpec>();
            s->node = RingSpec::Node::GF;
            s->n = q.value.get_ui();
            return s;
        }
        if (id.text == "Q") {
            auto s = std::make_shared<RingSpec>();
            s->node = RingSpec::Node::QQ;
            return s;
        }
        if (id.text == "product") {
            expect_sym("(");
            RingSpecPtr l = parse_ring();
            expect_sym(",");
            RingSpecPtr r = parse_ring();
            expect_sym(")");
            auto s = std::make_shared<RingSpec>();
            s->node = RingSpec::Node::Product;
            s->left = l;
            s->right = r;
            return s;
        }
        throw ParseError("unknown atom '" + id.text + "'", id.offset);
    }

    RingSpecPtr parse_quotient_suffix(RingSpecPtr base) {
        expect_sym("[");
        Token var = expect_ident();
        auto scope = base->scope_vars();
        for (const auto& v : scope)
            if (v == var.text)
                throw ParseError("variable '" + var.text + "' already in scope", var.offset);
        expect_sym("]");
        expect_sym("/");
        Token open = expect_sym("(");
        std::vector<std::string> vars = scope;
        vars.push_back(var.text);
        PolyMap poly = parse_expr(vars);
        expect_sym(")");
        return make_polyquot(base, var.text, std::move(poly), vars, open.offset);
    }

    RingSpecPtr make_polyquot(RingSpecPtr base, std::string var, PolyMap poly,
                              const std::vector<std::string>& vars, std::size_t offset) {
        unsigned deg = 0;
        for (const auto& [e, c] : poly) deg = std::max(deg, e.back());
        if (deg == 0)
            throw ParseError("modulus must have degree >= 1 in " + var, offset);
        // Monic: the leading coefficient must be the integer literal 1.
        std::vector<unsigned> lead(vars.size(), 0);
        lead.back() = deg;
        for (const auto& [e, c] : poly)
            if (e.back() == deg && (e != lead || c != 1))
                throw ParseError("non-monic modulus in " + var, offset);
        if (poly.find(lead) == poly.end())
            throw ParseError("non-monic modulus in " + var, offset);
        auto s = std::make_shared<RingSpec>();
        s->node = RingSpec::Node::PolyQuot;
        s->base = std::move(base);
        s->var = std::move(var);
        for (const auto& [e, c] : poly) {
            PolyTerm t;
            t.coeff = c;
            t.exps = e;
            s->modulus.push_back(std::move(t));
        }
        std::sort(s->modulus.begin(), s->modulus.end(), [](const PolyTerm& a, const PolyTerm& b) {
            if (a.exps.back() != b.exps.back()) return a.exps.back() < b.exps.back();
            return a.exps < b.exps;
        });
        return s;
    }

    PolyMap parse_expr(const std::vector<std::string>& vars) {
        PolyMap acc = parse_term(vars);
        while (lex_.peek().type == Token::Type::Sym &&
               (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            Token op = lex_.take();
            PolyMap rhs = parse_term(vars);
            acc = poly_add(acc, rhs, op.text == "+" ? 1 : -1);
        }
        return acc;
    }

    PolyMap parse_term(const std::vector<std::string>& vars) {
        PolyMap acc = parse_factor(vars);
        while (lex_.peek().type == Token::Type::Sym && lex_.peek().text == "*") {
            lex_.take();
            acc = poly_mul(acc, parse_factor(vars));
        }
        return acc;
    }

    PolyMap parse_factor(const std::vector<std::string>& vars) {
        if (lex_.peek().type == Token::Type::Sym && lex_.peek().text == "-") {
            lex_.take();
            PolyMap p = parse_factor(vars);
            return poly_add(poly_const(vars.size(), 0), p, -1);
        }
        PolyMap base = parse_primary(vars);
        if (lex_.peek().type == Token::Type::Sym && lex_.peek().text == "^") {
            lex_.take();
            Token e = expect_int();
            if (!e.value.fits_uint_p())
                throw ParseError("exponent out of range", e.offset);
            return poly_pow(base, e.value.get_ui(), vars.size());
        }
        return base;
    }

    PolyMap parse_primary(const std::vector<std::string>& vars) {
        const Token& t = lex_.peek();
        if (t.type == Token::Type::Int) {
            Token v = lex_.take();
            return poly_const(vars.size(), v.value);
        }
        if (t.type == Token::Type::Ident) {
            Token v = lex_.take();
            for (std::size_t i = 0; i < vars.size(); ++i)
                if (vars[i] == v.text) return poly_var(vars.size(), i);
            throw ParseError("unknown variable '" + v.text + "'", v.offset);
        }
        if (t.type == Token::Type::Sym && t.text == "(") {
            lex_.take();
            PolyMap p = parse_expr(vars);
            expect_sym(")");
            return p;
        }
        throw ParseError("expected polynomial term, found " + describe(t), t.offset);
    }

    Lexer lex_;
};

} // namespace detail

inline RingSpecPtr parse_ring_spec(std::string_view text) {
    if (text.empty()) throw ParseError("empty ring description", 0);
    detail::Parser p(text);
    RingSpecPtr spec = p.parse_ring();
    p.expect_end();
    return spec;
}

inline RingSpecPtr RingSpec::from_json(const nlohmann::json& j) {
    auto s = std::make_shared<RingSpec>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zmod") {
        s->node = Node::Zmod;
        s->n = j.at("n").get<u64>();
        if (s->n < 2) throw Error("zmod: n >= 2 required");
    } else if (kind == "gf") {
        s->node = Node::GF;
        s->n = j.at("q").get<u64>();
        if (prime_power(s->n).first == 0) throw Error("gf: q must be a prime power");
    } else if (kind == "qq") {
        s->node = Node::QQ;
    } else if (kind == "polyquot") {
        s->node = Node::PolyQuot;
        s->base = from_json(j.at("base"));
        s->var = j.at("var").get<std::string>();
        auto vars = s->base->scope_vars();
        vars.push_back(s->var);
        for (const auto& jt : j.at("modulus")) {
            PolyTerm t;
            t.coeff = mpz_class(jt.at("c").get<std::string>());
            t.exps.assign(vars.size(), 0);
            for (const auto& [v, e] : jt.at("e").items()) {
                auto it = std::find(vars.begin(), vars.end(), v);
                if (it == vars.end()) throw Error("polyquot: unknown variable " + v);
                t.exps[static_cast<std::size_t>(it - vars.begin())] = e.get<unsigned>();
            }
            s->modulus.push_back(std::move(t));
        }
    } else if (kind == "product") {
        s->node = Node::Product;
        s->left = from_json(j.at("left"));
        s->right = from_json(j.at("right"));
    } else if (kind == "table") {
        s->node = Node::Table;
        s->table_order = j.at("order").get<u64>();
        s->add_table = j.at("add").get<std::vector<u64>>();
        s->mul_table = j.at("mul").get<std::vector<u64>>();
    } else if (kind == "quot") {
        s->node = Node::Quot;
        s->base = from_json(j.at("base"));
        s->quot_gens = j.at("generators").get<std::vector<u64>>();
    } else if (kind == "pullback") {
        s->node = Node::Pullback;
        s->left = from_json(j.at("left"));
        s->right = from_json(j.at("right"));
        s->pullback_codomain = from_json(j.at("codomain"));
        s->pullback_fa = j.at("fa").get<std::vector<u64>>();
        s->pullback_fb = j.at("fb").get<std::vector<u64>>();
    } else {
        throw Error("unknown ring spec kind: " + kind);
    }
    return s;
}

} // namespace lru
