#pragma once

#include <freealg/context.hpp>
#include <freealg/errors.hpp>
#include <freealg/rational.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace freealg {

struct Letter {
    std::uint32_t var = 0;
    bool transposed = false;

    bool operator==(const Letter&) const = default;
    bool operator<(const Letter& o) const {
        return var != o.var ? var < o.var : (!transposed && o.transposed);
    }
};

using Word = std::vector<Letter>;

// Graded lexicographic: shorter words first, then letter by letter.
struct GradedLex {
    bool operator()(const Word& a, const Word& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

inline Word concat(const Word& a, const Word& b) {
    Word w;
    w.reserve(a.size() + b.size());
    w.insert(w.end(), a.begin(), a.end());
    w.insert(w.end(), b.begin(), b.end());
    return w;
}

inline Word transpose_word(const Word& w, const Context& ctx) {
    Word r(w.rbegin(), w.rend());
    for (auto& l : r)
        if (!ctx.is_symmetric(l.var)) l.transposed = !l.transposed;
    return r;
}

inline std::string letter_text(const Letter& l, const Context& ctx) {
    const auto& n = ctx[l.var].name;
    return l.transposed ? "T(" + n + ")" : n;
}

// Product form with runs collapsed to powers, e.g. "x1^2*T(x2)".
inline std::string word_text(const Word& w, const Context& ctx) {
    if (w.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < w.size();) {
        std::size_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        if (!out.empty()) out += "*";
        out += letter_text(w[i], ctx);
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

// All words of length exactly k over the given letters, in graded-lex order.
inline std::vector<Word> words_of_length(const std::vector<Letter>& alphabet, std::size_t k) {
    std::vector<Letter> sorted = alphabet;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Word> out{Word{}};
    for (std::size_t d = 0; d < k; ++d) {
        std::vector<Word> next;
        next.reserve(out.size() * sorted.size());
        for (auto& w : out)
            for (auto& l : sorted) {
                Word v = w;
                v.push_back(l);
                next.push_back(std::move(v));
            }
        out = std::move(next);
    }
    return out;
}

inline std::vector<Word> words_up_to(const std::vector<Letter>& alphabet, std::size_t k) {
    std::vector<Word> out;
    for (std::size_t d = 0; d <= k; ++d) {
        auto part = words_of_length(alphabet, d);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

// Letters of the given variables: x for symmetric, x and T(x) for free.
inline std::vector<Letter> alphabet_of(const Context& ctx, const std::vector<std::size_t>& vars) {
    std::vector<Letter> out;
    for (auto v : vars) {
        out.push_back({static_cast<std::uint32_t>(v), false});
        if (!ctx.is_symmetric(v)) out.push_back({static_cast<std::uint32_t>(v), true});
    }
    return out;
}

// σ(k) = 1 + g + ... + g^k
inline std::size_t sigma(std::size_t g, std::size_t k) {
    std::size_t s = 0, p = 1;
    for (std::size_t j = 0; j <= k; ++j) {
        s += p;
        p *= g;
    }
    return s;
}

class Polynomial {
public:
    using TermMap = std::map<Word, Rational, GradedLex>;

    Polynomial() = default;
    explicit Polynomial(ContextPtr ctx) : ctx_(std::move(ctx)) {}
    Polynomial(ContextPtr ctx, const Rational& c) : ctx_(std::move(ctx)) {
        if (c != 0) terms_[Word{}] = c;
    }

    static Polynomial monomial(ContextPtr ctx, Word w, const Rational& c = 1) {
        Polynomial p(std::move(ctx));
        if (c != 0) p.terms_[std::move(w)] = c;
        return p;
    }

    static Polynomial variable(ContextPtr ctx, const std::string& name, bool transposed = false) {
        auto i = ctx->index(name);
        bool t = transposed && !ctx->is_symmetric(i);
        return monomial(ctx, Word{{static_cast<std::uint32_t>(i), t}});
    }

    static Polynomial variable(ContextPtr ctx, std::size_t i, bool transposed = false) {
        bool t = transposed && !ctx->is_symmetric(i);
        return monomial(ctx, Word{{static_cast<std::uint32_t>(i), t}});
    }

    const ContextPtr& context() const { return ctx_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coeff(const Word& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(const Word& w, const Rational& c) {
        if (c == 0) return;
        auto [it, fresh] = terms_.emplace(w, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    // Rebind to an extension of the current context.
    Polynomial in_context(const ContextPtr& ctx) const {
        if (ctx_ && !ctx_->prefix_of(*ctx)) throw ContextError("target context does not extend polynomial context");
        Polynomial p(ctx);
        p.terms_ = terms_;
        return p;
    }

    // nullopt is the zero-polynomial sentinel.
    std::optional<std::size_t> degree() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.rbegin()->first.size();
    }

    std::size_t degree_or_zero() const { return degree().value_or(0); }

    // Number of letters from the given class in the word.
    static std::size_t class_degree(const Word& w, const Context& ctx, VarClass c) {
        std::size_t k = 0;
        for (auto& l : w)
            if (ctx[l.var].cls == c) ++k;
        return k;
    }

    Polynomial homogeneous_part(std::size_t k) const {
        Polynomial p(ctx_);
        for (auto& [w, c] : terms_)
            if (w.size() == k) p.terms_.emplace(w, c);
        return p;
    }

    std::vector<Polynomial> homogeneous_parts() const {
        std::vector<Polynomial> out;
        if (auto d = degree())
            for (std::size_t k = 0; k <= *d; ++k) out.push_back(homogeneous_part(k));
        return out;
    }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        return terms_.begin()->first.size() == terms_.rbegin()->first.size();
    }

    Polynomial transpose() const {
        Polynomial p(ctx_);
        for (auto& [w, c] : terms_) p.add_term(transpose_word(w, *ctx_), c);
        return p;
    }

    bool is_symmetric() const { return *this == transpose(); }

    std::set<std::size_t> variables_used() const;

    Polynomial operator-() const {
        Polynomial p(*this);
        for (auto& [w, c] : p.terms_) c = -c;
        return p;
    }

    Polynomial& operator+=(const Polynomial& o) {
        ctx_ = join_contexts(ctx_, o.ctx_);
        for (auto& [w, c] : o.terms_) add_term(w, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        ctx_ = join_contexts(ctx_, o.ctx_);
        for (auto& [w, c] : o.terms_) add_term(w, -c);
        return *this;
    }
    Polynomial& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [w, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial p(join_contexts(a.ctx_, b.ctx_));
        for (auto& [u, cu] : a.terms_)
            for (auto& [v, cv] : b.terms_) p.add_term(concat(u, v), cu * cv);
        return p;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        join_contexts(a.ctx_, b.ctx_);
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    Polynomial pow(std::size_t k) const {
        Polynomial r(ctx_, 1);
        for (std::size_t i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    // Homomorphic image; unmapped variables are kept.
    Polynomial substitute(const std::map<std::size_t, Polynomial>& sub, ContextPtr target = nullptr) const {
        if (!target) {
            target = ctx_;
            for (auto& [i, q] : sub) target = join_contexts(target, q.context());
        }
        std::map<std::size_t, Polynomial> transposed;
        for (auto& [i, q] : sub) transposed.emplace(i, q.transpose());
        Polynomial out(target);
        for (auto& [w, c] : terms_) {
            Polynomial term(target, c);
            for (auto& l : w) {
                auto it = sub.find(l.var);
                if (it == sub.end()) {
                    term = term * Polynomial::monomial(target, Word{l});
                } else {
                    term = term * (l.transposed ? transposed.at(l.var) : it->second);
                }
                if (term.is_zero()) break;
            }
            out += term;
        }
        return out;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto& [w, c] : terms_) {
            Rational a = abs(c);
            bool neg = c < 0;
            if (first) {
                if (neg) out += "-";
            } else {
                out += neg ? " - " : " + ";
            }
            first = false;
            if (w.empty()) {
                out += a.get_str();
            } else {
                if (a != 1) out += a.get_str() + "*";
                out += word_text(w, *ctx_);
            }
        }
        return out;
    }

private:
    ContextPtr ctx_;
    TermMap terms_;
};

inline std::set<std::size_t> Polynomial::variables_used() const {
    std::set<std::size_t> s;
    for (auto& [w, c] : terms_)
        for (auto& l : w) s.insert(l.var);
    return s;
}

inline std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.str(); }

class MatrixPolynomial {
public:
    MatrixPolynomial() = default;
    MatrixPolynomial(ContextPtr ctx, std::size_t rows, std::size_t cols)
        : ctx_(ctx), rows_(rows), cols_(cols), entries_(rows * cols, Polynomial(ctx)) {
        if (rows == 0 || cols == 0) throw ContractError("matrix polynomial needs positive dimensions");
    }

    // Constant matrix times a scalar polynomial: A·p.
    template <class Mat>
    static MatrixPolynomial scaled(const Mat& A, const Polynomial& p) {
        MatrixPolynomial m(p.context(), A.rows(), A.cols());
        for (std::size_t i = 0; i < m.rows_; ++i)
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = p * Rational(A(i, j));
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const ContextPtr& context() const { return ctx_; }

    Polynomial& operator()(std::size_t i, std::size_t j) { return entries_.at(i * cols_ + j); }
    const Polynomial& operator()(std::size_t i, std::size_t j) const { return entries_.at(i * cols_ + j); }

    MatrixPolynomial transpose() const {
        MatrixPolynomial t(ctx_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j).transpose();
        return t;
    }

    bool is_symmetric() const { return rows_ == cols_ && *this == transpose(); }

    std::optional<std::size_t> degree() const {
        std::optional<std::size_t> d;
        for (auto& e : entries_)
            if (auto de = e.degree()) d = std::max(d.value_or(0), *de);
        return d;
    }

    friend MatrixPolynomial operator+(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        check_same_shape(a, b);
        MatrixPolynomial m(join_contexts(a.ctx_, b.ctx_), a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.entries_.size(); ++k) m.entries_[k] = a.entries_[k] + b.entries_[k];
        return m;
    }

    friend MatrixPolynomial operator*(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        if (a.cols_ != b.rows_) throw ContractError("matrix polynomial shape mismatch");
        MatrixPolynomial m(join_contexts(a.ctx_, b.ctx_), a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j)
                for (std::size_t k = 0; k < a.cols_; ++k) m(i, j) += a(i, k) * b(k, j);
        return m;
    }

    friend bool operator==(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

    std::string str() const {
        std::string out = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            out += i ? ", [" : "[";
            for (std::size_t j = 0; j < cols_; ++j) out += (j ? ", " : "") + (*this)(i, j).str();
            out += "]";
        }
        return out + "]";
    }

private:
    static void check_same_shape(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ContractError("matrix polynomial shape mismatch");
    }

    ContextPtr ctx_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Polynomial> entries_;
};

inline std::ostream& operator<<(std::ostream& os, const MatrixPolynomial& m) { return os << m.str(); }

// Commutative image: exponent vector per variable (T(x) collapses onto x).
class CommutativePolynomial {
public:
    using Exponents = std::vector<unsigned>;

    explicit CommutativePolynomial(ContextPtr ctx) : ctx_(std::move(ctx)) {}

    void add_term(const Exponents& e, const Rational& c) {
        if (c == 0) return;
        auto [it, fresh] = terms_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    const std::map<Exponents, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rational coeff(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    double evaluate(const std::vector<double>& t) const {
        double s = 0;
        for (auto& [e, c] : terms_) {
            double m = c.get_d();
            for (std::size_t i = 0; i < e.size(); ++i) m *= std::pow(t.at(i), static_cast<int>(e[i]));
            s += m;
        }
        return s;
    }

    // Variables print as t1, t2, ... in declaration order.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::vector<std::pair<Exponents, Rational>> order(terms_.begin(), terms_.end());
        std::stable_sort(order.begin(), order.end(), [](auto& a, auto& b) {
            unsigned da = 0, db = 0;
            for (auto x : a.first) da += x;
            for (auto x : b.first) db += x;
            if (da != db) return da < db;
            return a.first > b.first;
        });
        std::string out;
        bool first = true;
        for (auto& [e, c] : order) {
            Rational a = abs(c);
            out += first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
            first = false;
            std::string mono;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i]) continue;
                if (!mono.empty()) mono += "*";
                mono += "t" + std::to_string(i + 1);
                if (e[i] > 1) mono += "^" + std::to_string(e[i]);
            }
            if (mono.empty()) out += a.get_str();
            else out += (a != 1 ? a.get_str() + "*" : "") + mono;
        }
        return out;
    }

private:
    ContextPtr ctx_;
    std::map<Exponents, Rational> terms_;
};

inline CommutativePolynomial commutative_collapse(const Polynomial& p) {
    CommutativePolynomial out(p.context());
    std::size_t g = p.context() ? p.context()->size() : 0;
    for (auto& [w, c] : p.terms()) {
        CommutativePolynomial::Exponents e(g, 0);
        for (auto& l : w) ++e[l.var];
        out.add_term(e, c);
    }
    return out;
}

}  // namespace freealg
