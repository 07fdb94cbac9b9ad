#pragma once

#include <freealg/calculus.hpp>
#include <freealg/rational_matrix.hpp>

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace freealg {

// q = Vᵀ Z V with V the border vector of h-letter-first monomials.
struct BvMm {
    ContextPtr ctx;
    std::set<std::size_t> hvars;
    std::optional<DirectionMap> dm;
    std::vector<Word> border;
    std::size_t ell = 0;
    MatrixPolynomial Z;
    Polynomial source;

    std::size_t size() const { return border.size(); }
    static std::size_t block_index(const Word& entry) { return entry.size() - 1; }

    std::vector<std::size_t> block(std::size_t i) const {
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < border.size(); ++k)
            if (block_index(border[k]) == i) idx.push_back(k);
        return idx;
    }

    // Z_{ij}; nullopt when either border block is empty.
    std::optional<MatrixPolynomial> Zblock(std::size_t i, std::size_t j) const {
        auto r = block(i), c = block(j);
        if (r.empty() || c.empty()) return std::nullopt;
        MatrixPolynomial B(ctx, r.size(), c.size());
        for (std::size_t a = 0; a < r.size(); ++a)
            for (std::size_t b = 0; b < c.size(); ++b) B(a, b) = Z(r[a], c[b]);
        return B;
    }

    bool block_is_zero(std::size_t i, std::size_t j) const {
        for (auto a : block(i))
            for (auto b : block(j))
                if (!Z(a, b).is_zero()) return false;
        return true;
    }

    Polynomial entry(std::size_t k) const { return Polynomial::monomial(ctx, border[k]); }

    Polynomial reexpand() const {
        Polynomial out(ctx);
        for (std::size_t a = 0; a < size(); ++a)
            for (std::size_t b = 0; b < size(); ++b)
                if (!Z(a, b).is_zero()) out += entry(a).transpose() * Z(a, b) * entry(b);
        return out;
    }

    std::string border_text() const {
        std::string out;
        for (std::size_t k = 0; k < size(); ++k) out += (k ? ", " : "") + word_text(border[k], *ctx);
        return out;
    }
};

namespace detail {

inline std::vector<std::size_t> h_positions(const Word& w, const std::set<std::size_t>& hvars) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (hvars.count(w[i].var)) pos.push_back(i);
    return pos;
}

}  // namespace detail

inline BvMm extract_bvmm(const Polynomial& q, const std::set<std::size_t>& hvars) {
    const auto& ctx = *q.context();
    struct Split {
        Word left, mid, right;
        Rational c;
    };
    std::vector<Split> splits;
    std::set<Word, GradedLex> entries;
    std::size_t maxlen = 0;
    for (auto& [w, c] : q.terms()) {
        auto pos = detail::h_positions(w, hvars);
        if (pos.size() != 2) throw ContractError("every monomial must contain exactly two h letters");
        Word left = transpose_word(Word(w.begin(), w.begin() + pos[0] + 1), ctx);
        Word mid(w.begin() + pos[0] + 1, w.begin() + pos[1]);
        Word right(w.begin() + pos[1], w.end());
        entries.insert(left);
        entries.insert(right);
        maxlen = std::max(maxlen, w.size());
        splits.push_back({std::move(left), std::move(mid), std::move(right), c});
    }
    BvMm r;
    r.ctx = q.context();
    r.hvars = hvars;
    r.border.assign(entries.begin(), entries.end());
    r.ell = maxlen >= 2 ? maxlen - 2 : 0;
    r.source = q;
    std::map<Word, std::size_t, GradedLex> index;
    for (std::size_t k = 0; k < r.border.size(); ++k) index[r.border[k]] = k;
    if (r.border.empty()) return r;
    r.Z = MatrixPolynomial(r.ctx, r.border.size(), r.border.size());
    for (auto& s : splits) r.Z(index.at(s.left), index.at(s.right)).add_term(s.mid, s.c);
    return r;
}

// Directions are the h-class variables of the context.
inline BvMm extract_bvmm(const Polynomial& q) {
    auto h = q.context()->of_class(VarClass::h);
    return extract_bvmm(q, std::set<std::size_t>(h.begin(), h.end()));
}

inline BvMm extract_bvmm(const Polynomial& q, const DirectionMap& dm) {
    auto h = dm.direction_vars();
    BvMm r = extract_bvmm(q.in_context(dm.ctx), std::set<std::size_t>(h.begin(), h.end()));
    r.dm = dm;
    return r;
}

// ½ V_i[x]ᵀ Z_{i,ℓ−i} V_{ℓ−i}[x]; recovers p from its Hessian.
inline Polynomial reconstruct_from_block(const BvMm& rep, std::size_t i) {
    if (!rep.dm) throw ContractError("reconstruction needs the direction map of the Hessian");
    if (i > rep.ell) throw ContractError("block index exceeds the border length");
    const auto& dm = *rep.dm;
    if (rep.border.empty()) return Polynomial(dm.ctx);
    std::map<std::size_t, Polynomial> sub;
    for (auto& [x, h] : dm.dir) sub.emplace(h, Polynomial::variable(dm.ctx, x));
    Polynomial out(dm.ctx);
    auto rows = rep.block(i), cols = rep.block(rep.ell - i);
    for (auto a : rows)
        for (auto b : cols) {
            const auto& z = rep.Z(a, b);
            if (z.is_zero()) continue;
            if (*z.degree() != 0) throw ContractError("antidiagonal block is not constant; source is not a homogeneous Hessian");
            out += rep.entry(a).substitute(sub).transpose() * z * rep.entry(b).substitute(sub);
        }
    Polynomial p = out * Rational(1, 2);
    if (!(hessian(p, dm) == rep.source)) throw ContractError("source is not the Hessian of a homogeneous polynomial");
    return p;
}

// Gram matrix over a word basis: f = Σ G_uv uᵀ v.
struct GramMatrix {
    ContextPtr ctx;
    std::vector<Word> basis;
    RationalMatrix G;

    Polynomial reexpand() const {
        Polynomial out(ctx);
        for (std::size_t a = 0; a < basis.size(); ++a)
            for (std::size_t b = 0; b < basis.size(); ++b)
                if (G(a, b) != 0) out.add_term(concat(transpose_word(basis[a], *ctx), basis[b]), G(a, b));
        return out;
    }
};

// Dimension of the solution space of Σ G_uv uᵀv = f over the given basis.
inline std::size_t gram_freedom(const Context& ctx, const std::vector<Word>& basis) {
    std::set<Word, GradedLex> products;
    for (auto& u : basis)
        for (auto& v : basis) products.insert(concat(transpose_word(u, ctx), v));
    return basis.size() * basis.size() - products.size();
}

inline std::vector<Word> gram_basis(const Context& ctx, std::size_t d) {
    std::vector<std::size_t> vars(ctx.size());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
    return words_up_to(alphabet_of(ctx, vars), d);
}

// Each word is split as evenly as possible, then the result is symmetrized when f is.
inline GramMatrix gram_matrix(const Polynomial& f, std::size_t d) {
    const auto& ctx = *f.context();
    if (f.degree().value_or(0) > 2 * d) throw ContractError("polynomial degree exceeds twice the half-degree");
    GramMatrix g{f.context(), gram_basis(ctx, d), RationalMatrix(0, 0)};
    std::map<Word, std::size_t, GradedLex> index;
    for (std::size_t k = 0; k < g.basis.size(); ++k) index[g.basis[k]] = k;
    g.G = RationalMatrix(g.basis.size(), g.basis.size());
    for (auto& [w, c] : f.terms()) {
        std::size_t right = w.size() / 2;
        std::size_t left = w.size() - right;
        Word u = transpose_word(Word(w.begin(), w.begin() + left), ctx);
        Word v(w.begin() + left, w.end());
        g.G(index.at(u), index.at(v)) += c;
    }
    if (f.is_symmetric()) {
        RationalMatrix t = g.G.transpose();
        g.G = (g.G + t) * Rational(1, 2);
    }
    return g;
}

}  // namespace freealg
