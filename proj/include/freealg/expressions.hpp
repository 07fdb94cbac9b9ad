#pragma once

#include <freealg/polynomial.hpp>

#include <cctype>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace freealg {

enum class NodeKind { constant, variable, sum, product, inverse, transpose };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind = NodeKind::constant;
    Rational value;                // constant
    std::uint32_t var = 0;         // variable
    bool transposed = false;       // variable
    std::vector<Expr> children;    // sum, product, inverse, transpose
};

namespace expr {

inline Expr constant(const Rational& c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::constant;
    n->value = c;
    return n;
}

inline Expr variable(const Context& ctx, std::size_t i, bool transposed = false) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::variable;
    n->var = static_cast<std::uint32_t>(i);
    n->transposed = transposed && !ctx.is_symmetric(i);
    return n;
}

inline bool is_constant(const Expr& e, const Rational& c) { return e->kind == NodeKind::constant && e->value == c; }

inline Expr sum(std::vector<Expr> children) {
    if (children.empty()) return constant(0);
    if (children.size() == 1) return children[0];
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::sum;
    n->children = std::move(children);
    return n;
}

inline Expr product(std::vector<Expr> children) {
    if (children.empty()) return constant(1);
    if (children.size() == 1) return children[0];
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::product;
    n->children = std::move(children);
    return n;
}

inline Expr inverse(const Expr& e) {
    if (is_constant(e, 0)) throw ContractError("refusing to invert the zero expression");
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::inverse;
    n->children = {e};
    return n;
}

// Transposes of leaves are folded into the leaf.
inline Expr transpose(const Context& ctx, const Expr& e) {
    if (e->kind == NodeKind::constant) return e;
    if (e->kind == NodeKind::variable) return variable(ctx, e->var, !e->transposed);
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::transpose;
    n->children = {e};
    return n;
}

// Negation as the parser builds it: a leading constant absorbs the sign.
inline Expr negate(const Expr& e) {
    if (e->kind == NodeKind::constant) return constant(-e->value);
    if (e->kind == NodeKind::product && e->children[0]->kind == NodeKind::constant) {
        auto ch = e->children;
        ch[0] = constant(-ch[0]->value);
        return product(std::move(ch));
    }
    if (e->kind == NodeKind::product) {
        std::vector<Expr> ch{constant(-1)};
        ch.insert(ch.end(), e->children.begin(), e->children.end());
        return product(std::move(ch));
    }
    return product({constant(-1), e});
}

// Simplifying builders used by symbolic routines (drop zeros and unit factors).
inline Expr add(const std::vector<Expr>& terms) {
    std::vector<Expr> keep;
    Rational c = 0;
    for (auto& t : terms) {
        if (t->kind == NodeKind::constant) c += t->value;
        else keep.push_back(t);
    }
    if (c != 0) keep.insert(keep.begin(), constant(c));
    return sum(std::move(keep));
}

inline Expr mul(const std::vector<Expr>& factors) {
    std::vector<Expr> keep;
    Rational c = 1;
    for (auto& f : factors) {
        if (f->kind == NodeKind::constant) {
            if (f->value == 0) return constant(0);
            c *= f->value;
        } else {
            keep.push_back(f);
        }
    }
    if (keep.empty()) return constant(c);
    if (c != 1) keep.insert(keep.begin(), constant(c));
    return product(std::move(keep));
}

inline Expr sub(const Expr& a, const Expr& b) {
    if (is_constant(b, 0)) return a;
    return add({a, mul({constant(-1), b})});
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::constant: return a->value == b->value;
        case NodeKind::variable: return a->var == b->var && a->transposed == b->transposed;
        default:
            if (a->children.size() != b->children.size()) return false;
            for (std::size_t i = 0; i < a->children.size(); ++i)
                if (!structurally_equal(a->children[i], b->children[i])) return false;
            return true;
    }
}

inline bool has_inverse(const Expr& e) {
    if (e->kind == NodeKind::inverse) return true;
    for (auto& c : e->children)
        if (has_inverse(c)) return true;
    return false;
}

inline Polynomial to_polynomial_impl(const ContextPtr& ctx, const Expr& e,
                                     std::unordered_map<const ExprNode*, Polynomial>& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    Polynomial r(ctx);
    switch (e->kind) {
        case NodeKind::constant: r = Polynomial(ctx, e->value); break;
        case NodeKind::variable: r = Polynomial::variable(ctx, e->var, e->transposed); break;
        case NodeKind::sum:
            for (auto& c : e->children) r += to_polynomial_impl(ctx, c, memo);
            break;
        case NodeKind::product:
            r = Polynomial(ctx, 1);
            for (auto& c : e->children) r = r * to_polynomial_impl(ctx, c, memo);
            break;
        case NodeKind::transpose: r = to_polynomial_impl(ctx, e->children[0], memo).transpose(); break;
        case NodeKind::inverse: throw ContractError("expression contains an inverse; not a polynomial");
    }
    memo.emplace(e.get(), r);
    return r;
}

inline Polynomial to_polynomial(const ContextPtr& ctx, const Expr& e) {
    std::unordered_map<const ExprNode*, Polynomial> memo;
    return to_polynomial_impl(ctx, e, memo);
}

inline Expr from_word(const Context& ctx, const Word& w, const Rational& c) {
    std::vector<Expr> f;
    if (c != 1 || w.empty()) f.push_back(constant(c));
    for (auto& l : w) f.push_back(variable(ctx, l.var, l.transposed));
    return product(std::move(f));
}

inline Expr from_polynomial(const Polynomial& p) {
    std::vector<Expr> terms;
    for (auto& [w, c] : p.terms()) terms.push_back(from_word(*p.context(), w, c));
    return sum(std::move(terms));
}

// Syntactic zero: the constant 0, or an inverse-free expression expanding to 0.
inline bool is_syntactic_zero(const ContextPtr& ctx, const Expr& e) {
    if (e->kind == NodeKind::constant) return e->value == 0;
    if (has_inverse(e)) return false;
    return to_polynomial(ctx, e).is_zero();
}

// Push transposes down to the leaves.
inline Expr push_transpose(const Context& ctx, const Expr& e, bool flip = false) {
    switch (e->kind) {
        case NodeKind::constant: return e;
        case NodeKind::variable: return flip ? variable(ctx, e->var, !e->transposed) : e;
        case NodeKind::sum: {
            std::vector<Expr> ch;
            for (auto& c : e->children) ch.push_back(push_transpose(ctx, c, flip));
            return sum(std::move(ch));
        }
        case NodeKind::product: {
            std::vector<Expr> ch;
            for (auto& c : e->children) ch.push_back(push_transpose(ctx, c, flip));
            if (flip) std::reverse(ch.begin(), ch.end());
            return product(std::move(ch));
        }
        case NodeKind::inverse: return inverse(push_transpose(ctx, e->children[0], flip));
        case NodeKind::transpose: return push_transpose(ctx, e->children[0], !flip);
    }
    return e;
}

inline std::size_t node_count(const Expr& e) {
    std::unordered_map<const ExprNode*, bool> seen;
    std::vector<const ExprNode*> stack{e.get()};
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        if (!seen.emplace(n, true).second) continue;
        for (auto& c : n->children) stack.push_back(c.get());
    }
    return seen.size();
}

}  // namespace expr

// An expression DAG together with the context its variables refer to.
struct Expression {
    ContextPtr ctx;
    Expr root;

    Expression() = default;
    Expression(ContextPtr c, Expr r) : ctx(std::move(c)), root(std::move(r)) {}
    explicit Expression(const Polynomial& p) : ctx(p.context()), root(expr::from_polynomial(p)) {}

    bool is_polynomial() const { return !expr::has_inverse(root); }
    Polynomial to_polynomial() const { return expr::to_polynomial(ctx, root); }
};

// ---------------------------------------------------------------------------
// Text form

namespace detail {

inline bool negative_leading(const Expr& e) {
    if (e->kind == NodeKind::constant) return e->value < 0;
    return e->kind == NodeKind::product && e->children[0]->kind == NodeKind::constant &&
           e->children[0]->value < 0;
}

enum class Slot { top, sum_child, product_child };

inline std::string format_node(const Context& ctx, const Expr& e, Slot slot);

// Prints -e without its sign, for use after " - ".
inline std::string format_abs(const Context& ctx, const Expr& e) {
    if (e->kind == NodeKind::constant) return Rational(-e->value).get_str();
    auto ch = e->children;
    Rational c = -ch[0]->value;
    if (c == 1) {
        ch.erase(ch.begin());
        if (ch.size() == 1) {
            auto s = format_node(ctx, ch[0], Slot::product_child);
            return s;
        }
    } else {
        ch[0] = expr::constant(c);
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::product;
    n->children = ch;
    return format_node(ctx, n, Slot::sum_child);
}

inline std::string format_product_body(const Context& ctx, const std::vector<Expr>& ch) {
    std::string out;
    for (std::size_t i = 0; i < ch.size();) {
        std::size_t j = i + 1;
        while (j < ch.size() && expr::structurally_equal(ch[j], ch[i])) ++j;
        if (!out.empty()) out += "*";
        std::string f;
        const auto& c = ch[i];
        if (c->kind == NodeKind::constant && (c->value < 0 || i > 0)) f = "(" + c->value.get_str() + ")";
        else f = format_node(ctx, c, Slot::product_child);
        out += f;
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

inline std::string format_node(const Context& ctx, const Expr& e, Slot slot) {
    switch (e->kind) {
        case NodeKind::constant: {
            auto s = e->value.get_str();
            if (e->value < 0 && slot == Slot::product_child) return "(" + s + ")";
            return s;
        }
        case NodeKind::variable: {
            const auto& n = ctx[e->var].name;
            return e->transposed ? "T(" + n + ")" : n;
        }
        case NodeKind::inverse: return "inv(" + format_node(ctx, e->children[0], Slot::top) + ")";
        case NodeKind::transpose: return "T(" + format_node(ctx, e->children[0], Slot::top) + ")";
        case NodeKind::sum: {
            std::string out;
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                const auto& c = e->children[i];
                if (i == 0) {
                    out += format_node(ctx, c, Slot::sum_child);
                } else if (negative_leading(c)) {
                    out += " - " + format_abs(ctx, c);
                } else {
                    out += " + " + format_node(ctx, c, Slot::sum_child);
                }
            }
            return slot == Slot::top ? out : "(" + out + ")";
        }
        case NodeKind::product: {
            std::string out;
            const auto& ch = e->children;
            if (ch[0]->kind == NodeKind::constant && ch[0]->value < 0) {
                std::vector<Expr> rest(ch.begin() + 1, ch.end());
                if (ch[0]->value == -1) {
                    out = "-" + format_product_body(ctx, rest);
                } else {
                    out = "-" + Rational(-ch[0]->value).get_str() + "*" + format_product_body(ctx, rest);
                }
            } else if (ch[0]->kind == NodeKind::constant) {
                std::vector<Expr> rest(ch.begin() + 1, ch.end());
                out = ch[0]->value.get_str() + "*" + format_product_body(ctx, rest);
            } else {
                out = format_product_body(ctx, ch);
            }
            return slot == Slot::product_child ? "(" + out + ")" : out;
        }
    }
    return {};
}

}  // namespace detail

inline std::string format_expression(const Expression& e) {
    return detail::format_node(*e.ctx, e.root, detail::Slot::top);
}

inline std::string format_polynomial(const Polynomial& p) { return p.str(); }

// Grammar (whitespace-insensitive):
//   expr    := ['+'|'-'] term (('+'|'-') term)*
//   term    := factor (['*'] factor)*
//   factor  := primary ('^' INT)*
//   primary := NUMBER ['/' NUMBER] | IDENT | 'inv(' expr ')' | 'T(' expr ')' | '(' expr ')'
class Parser {
public:
    Parser(std::string text, ContextPtr ctx) : s_(std::move(text)), ctx_(std::move(ctx)) {}

    Expr parse() {
        Expr e = parse_expr();
        skip();
        if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    void expect(char c) {
        if (!peek(c)) {
            if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
        ++pos_;
    }
    bool starts_primary() {
        skip();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '(' || c == '.';
    }

    Expr parse_expr() {
        std::vector<Expr> terms;
        bool first = true;
        while (true) {
            bool neg = false;
            if (peek('+') || peek('-')) {
                neg = s_[pos_] == '-';
                ++pos_;
            } else if (!first) {
                break;
            }
            Expr t = parse_term();
            terms.push_back(neg ? expr::negate(t) : t);
            first = false;
            if (!(peek('+') || peek('-'))) break;
        }
        return expr::sum(std::move(terms));
    }

    Expr parse_term() {
        std::vector<Expr> factors;
        parse_factor(factors);
        while (true) {
            if (peek('*')) {
                ++pos_;
                parse_factor(factors);
            } else if (starts_primary()) {
                parse_factor(factors);
            } else {
                break;
            }
        }
        return expr::product(std::move(factors));
    }

    void parse_factor(std::vector<Expr>& out) {
        Expr p = parse_primary();
        std::size_t k = 1;
        while (peek('^')) {
            ++pos_;
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) throw ParseError("expected integer exponent", pos_);
            k *= std::stoul(s_.substr(start, pos_ - start));
        }
        for (std::size_t i = 0; i < k; ++i) out.push_back(p);
    }

    std::string number_token() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        return s_.substr(start, pos_ - start);
    }

    Expr parse_primary() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            std::string num = number_token();
            try {
                Rational r = parse_rational(num);
                if (peek('/')) {
                    ++pos_;
                    skip();
                    std::size_t dpos = pos_;
                    std::string den = number_token();
                    if (den.empty()) throw ParseError("expected denominator", dpos);
                    Rational d = parse_rational(den);
                    if (d == 0) throw ParseError("zero denominator", dpos);
                    r /= d;
                }
                return expr::constant(r);
            } catch (const std::invalid_argument&) {
                throw ParseError("bad number '" + num + "'", start);
            }
        }
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            if (id == "inv" || id == "T") {
                expect('(');
                Expr inner = parse_expr();
                expect(')');
                if (id == "T") return expr::transpose(*ctx_, inner);
                if (expr::is_constant(inner, 0)) throw ParseError("inverse of zero", start);
                return expr::inverse(inner);
            }
            auto idx = ctx_->find(id);
            if (!idx) throw ParseError("undeclared variable '" + id + "'", start);
            return expr::variable(*ctx_, *idx);
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    std::string s_;
    ContextPtr ctx_;
    std::size_t pos_ = 0;
};

inline Expression parse_expression(const std::string& text, const ContextPtr& ctx) {
    return Expression(ctx, Parser(text, ctx).parse());
}

inline Polynomial parse_polynomial(const std::string& text, const ContextPtr& ctx) {
    auto e = parse_expression(text, ctx);
    if (!e.is_polynomial()) throw ContractError("expected a polynomial, found an inverse");
    return e.to_polynomial();
}

// Identifiers appearing in the text, in order of first appearance (keywords skipped).
inline std::vector<std::string> scan_identifiers(const std::string& text) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t s = i;
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
            std::string id = text.substr(s, i - s);
            if (id != "inv" && id != "T" && std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
            continue;
        }
        ++i;
    }
    return out;
}

}  // namespace freealg
