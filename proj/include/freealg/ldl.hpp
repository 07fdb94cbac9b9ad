#pragma once

#include <freealg/positivity.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace freealg {

// Square matrix of nc rational expressions.
struct ExprMatrix {
    ContextPtr ctx;
    std::size_t n = 0;
    std::vector<Expr> e;

    ExprMatrix() = default;
    ExprMatrix(ContextPtr c, std::size_t size) : ctx(std::move(c)), n(size), e(size * size, expr::constant(0)) {}

    static ExprMatrix identity(ContextPtr c, std::size_t size) {
        ExprMatrix M(std::move(c), size);
        for (std::size_t i = 0; i < size; ++i) M(i, i) = expr::constant(1);
        return M;
    }

    static ExprMatrix from(const MatrixPolynomial& P) {
        if (P.rows() != P.cols()) throw ContractError("matrix must be square");
        ExprMatrix M(P.context(), P.rows());
        for (std::size_t i = 0; i < M.n; ++i)
            for (std::size_t j = 0; j < M.n; ++j) M(i, j) = expr::from_polynomial(P(i, j));
        return M;
    }

    Expr& operator()(std::size_t i, std::size_t j) { return e.at(i * n + j); }
    const Expr& operator()(std::size_t i, std::size_t j) const { return e.at(i * n + j); }

    Expression entry(std::size_t i, std::size_t j) const { return Expression(ctx, (*this)(i, j)); }

    bool is_zero(std::size_t i, std::size_t j) const { return expr::is_syntactic_zero(ctx, (*this)(i, j)); }

    // Block matrix with block (i, j) at rows i·n.
    Eigen::MatrixXd evaluate(const MatrixTuple& X) const {
        Eigen::MatrixXd out(n * X.n, n * X.n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out.block(i * X.n, j * X.n, X.n, X.n) = freealg::evaluate(entry(i, j), X);
        return out;
    }

    std::string str() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < n; ++i) {
            os << "[";
            for (std::size_t j = 0; j < n; ++j) os << (j ? ", " : "") << format_expression(entry(i, j));
            os << "]\n";
        }
        return os.str();
    }
};

// One row per line (or ';'-separated), entries separated by ','.
inline ExprMatrix parse_expr_matrix(const std::string& text, const ContextPtr& ctx) {
    std::vector<std::vector<std::string>> rows;
    std::string row;
    std::string norm = text;
    for (auto& c : norm)
        if (c == ';') c = '\n';
    std::istringstream in(norm);
    while (std::getline(in, row)) {
        if (auto h = row.find('#'); h != std::string::npos) row.resize(h);
        if (row.find_first_not_of(" \t\r[]") == std::string::npos) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream rs(row);
        while (std::getline(rs, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw ParseError("empty matrix", 0);
    ExprMatrix M(ctx, rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw ParseError("matrix row " + std::to_string(i + 1) + " has the wrong number of entries", 0);
        for (std::size_t j = 0; j < rows.size(); ++j) M(i, j) = parse_expression(rows[i][j], ctx).root;
    }
    return M;
}

namespace detail {

// Canonical form for inverse-free entries; constant pivots are inverted exactly.
inline Expr tidy(const ContextPtr& ctx, const Expr& e) {
    if (expr::has_inverse(e)) return e;
    return expr::from_polynomial(expr::to_polynomial(ctx, e));
}

inline Expr mul_flat(const std::vector<Expr>& factors) {
    std::vector<Expr> flat;
    for (auto& f : factors) {
        if (f->kind == NodeKind::product) flat.insert(flat.end(), f->children.begin(), f->children.end());
        else flat.push_back(f);
    }
    return expr::mul(flat);
}

inline Expr invert(const Expr& a) {
    if (a->kind == NodeKind::constant) return expr::constant(1 / a->value);
    return expr::inverse(a);
}

inline bool entries_transposed(const ContextPtr& ctx, const Expr& a, const Expr& b) {
    Expr bt = expr::transpose(*ctx, b);
    if (!expr::has_inverse(a) && !expr::has_inverse(b)) return expr::to_polynomial(ctx, a) == expr::to_polynomial(ctx, bt);
    return expr::structurally_equal(expr::push_transpose(*ctx, a), expr::push_transpose(*ctx, bt));
}

}  // namespace detail

// Symbolic symmetry; entries with inverses fall back to a seeded numeric probe.
inline bool is_symmetric(const ExprMatrix& M) {
    bool exact = true;
    for (std::size_t i = 0; i < M.n; ++i)
        for (std::size_t j = i; j < M.n; ++j)
            if (!detail::entries_transposed(M.ctx, M(i, j), M(j, i))) {
                if (!expr::has_inverse(M(i, j)) && !expr::has_inverse(M(j, i))) return false;
                exact = false;
            }
    if (exact) return true;
    Rng rng(0x5eed);
    std::size_t probes = 0;
    for (int k = 0; k < 20 && probes < 3; ++k) {
        auto X = sample_tuple(3, *M.ctx, Distribution::gaussian_general, rng);
        try {
            Eigen::MatrixXd V = M.evaluate(X);
            if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, V.cwiseAbs().maxCoeff())) return false;
            ++probes;
        } catch (const DomainError&) {
        }
    }
    return probes > 0;
}

struct LdlBlock {
    enum class Kind { scalar, antidiagonal, zero };
    Kind kind;
    std::size_t start, size;
};

inline const char* to_string(LdlBlock::Kind k) {
    switch (k) {
        case LdlBlock::Kind::scalar: return "scalar";
        case LdlBlock::Kind::antidiagonal: return "antidiagonal";
        default: return "zero";
    }
}

// Π M Πᵀ = L D Lᵀ; row k of Π M Πᵀ is row perm[k] of M.
struct LdlDecomposition {
    ContextPtr ctx;
    std::vector<std::size_t> perm;
    ExprMatrix L, D;
    std::vector<LdlBlock> blocks;  // the zero block is always last, possibly empty

    std::size_t n() const { return perm.size(); }

    bool identity_permutation() const {
        for (std::size_t k = 0; k < perm.size(); ++k)
            if (perm[k] != k) return false;
        return true;
    }

    Eigen::MatrixXd permutation_matrix(std::size_t size) const {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n() * size, n() * size);
        for (std::size_t k = 0; k < n(); ++k)
            P.block(k * size, perm[k] * size, size, size) = Eigen::MatrixXd::Identity(size, size);
        return P;
    }

    std::string str() const {
        std::ostringstream os;
        os << "perm:";
        for (auto p : perm) os << " " << p + 1;
        os << "\nblocks:";
        for (auto& b : blocks) os << " " << to_string(b.kind) << "@" << b.start + 1 << "x" << b.size;
        os << "\nL:\n" << L.str() << "D:\n" << D.str();
        return os.str();
    }
};

inline LdlDecomposition ldl_decompose(const ExprMatrix& M) {
    if (!is_symmetric(M)) throw ContractError("LDL decomposition needs a symmetric matrix");
    const auto& ctx = M.ctx;
    std::size_t n = M.n;
    ExprMatrix W = M;
    std::vector<std::size_t> active(n), order;
    for (std::size_t i = 0; i < n; ++i) active[i] = i;
    // Multipliers by original row index and pivot position.
    std::vector<std::vector<std::pair<std::size_t, Expr>>> lcol(n);
    std::vector<LdlBlock> blocks;
    std::vector<std::pair<std::size_t, Expr>> dentries;  // (position, value) on the diagonal
    std::vector<std::pair<std::size_t, Expr>> bentries;  // (position of first row, b) for 2×2 blocks

    auto eliminate = [&](const std::vector<std::size_t>& piv, const std::vector<std::vector<Expr>>& inv) {
        std::vector<std::size_t> rest;
        for (auto r : active)
            if (std::find(piv.begin(), piv.end(), r) == piv.end()) rest.push_back(r);
        std::size_t pos = order.size();
        // l_r = W(r, piv) P⁻¹
        std::map<std::size_t, std::vector<Expr>> mult;
        for (auto r : rest) {
            std::vector<Expr> l(piv.size());
            for (std::size_t a = 0; a < piv.size(); ++a) {
                std::vector<Expr> terms;
                for (std::size_t b = 0; b < piv.size(); ++b)
                    if (!expr::is_constant(inv[b][a], 0)) terms.push_back(detail::mul_flat({W(r, piv[b]), inv[b][a]}));
                l[a] = detail::tidy(ctx, expr::add(terms));
                if (!expr::is_constant(l[a], 0)) lcol[r].push_back({pos + a, l[a]});
            }
            mult.emplace(r, std::move(l));
        }
        for (auto r : rest)
            for (auto c : rest) {
                std::vector<Expr> terms{W(r, c)};
                for (std::size_t a = 0; a < piv.size(); ++a)
                    if (!expr::is_constant(mult[r][a], 0) && !expr::is_syntactic_zero(ctx, W(piv[a], c)))
                        terms.push_back(detail::mul_flat({expr::constant(-1), mult[r][a], W(piv[a], c)}));
                W(r, c) = terms.size() == 1 ? W(r, c) : detail::tidy(ctx, expr::add(terms));
            }
        for (auto p : piv) order.push_back(p);
        active = std::move(rest);
    };

    while (!active.empty()) {
        auto diag = std::find_if(active.begin(), active.end(), [&](std::size_t i) { return !W.is_zero(i, i); });
        if (diag != active.end()) {
            std::size_t i = *diag;
            Expr a = W(i, i);
            blocks.push_back({LdlBlock::Kind::scalar, order.size(), 1});
            dentries.push_back({order.size(), a});
            eliminate({i}, {{detail::invert(a)}});
            continue;
        }
        std::optional<std::pair<std::size_t, std::size_t>> pair;
        for (std::size_t a = 0; a < active.size() && !pair; ++a)
            for (std::size_t b = a + 1; b < active.size() && !pair; ++b)
                if (!W.is_zero(active[a], active[b])) pair = {active[a], active[b]};
        if (!pair) break;
        auto [i, j] = *pair;
        Expr b = W(i, j);
        blocks.push_back({LdlBlock::Kind::antidiagonal, order.size(), 2});
        bentries.push_back({order.size(), b});
        // [[0,b],[bᵀ,0]]⁻¹ = [[0,b⁻ᵀ],[b⁻¹,0]]
        Expr binv = detail::invert(b);
        Expr btinv = detail::invert(expr::transpose(*ctx, b));
        eliminate({i, j}, {{expr::constant(0), btinv}, {binv, expr::constant(0)}});
    }
    blocks.push_back({LdlBlock::Kind::zero, order.size(), active.size()});
    for (auto r : active) order.push_back(r);

    LdlDecomposition out;
    out.ctx = ctx;
    out.perm = order;
    std::vector<std::size_t> where(n);
    for (std::size_t k = 0; k < n; ++k) where[order[k]] = k;
    out.L = ExprMatrix::identity(ctx, n);
    for (std::size_t r = 0; r < n; ++r)
        for (auto& [p, l] : lcol[r]) out.L(where[r], p) = l;
    out.D = ExprMatrix(ctx, n);
    for (auto& [p, d] : dentries) out.D(p, p) = d;
    for (auto& [p, b] : bentries) {
        out.D(p, p + 1) = b;
        out.D(p + 1, p) = detail::tidy(ctx, expr::transpose(*ctx, b));
    }
    out.blocks = std::move(blocks);
    return out;
}

inline LdlDecomposition ldl_decompose(const MatrixPolynomial& M) { return ldl_decompose(ExprMatrix::from(M)); }

// D is block diagonal, so its inertia is summed over blocks; each block's zero band is
// tol·max(‖block‖, scale), so blocks that vanish identically but not syntactically read as zero.
inline Signature block_signature(const LdlDecomposition& dec, const Eigen::MatrixXd& Dx, std::size_t size, double tol = 1e-9,
                                 double scale = 0.0) {
    Signature s;
    s.tol = tol;
    for (auto& b : dec.blocks) {
        if (b.size == 0) continue;
        if (b.kind == LdlBlock::Kind::zero) {
            s.zero += b.size * size;
            continue;
        }
        Eigen::MatrixXd B = Dx.block(b.start * size, b.start * size, b.size * size, b.size * size);
        auto t = psd_signature(0.5 * (B + B.transpose()), tol, scale);
        s.neg += t.neg;
        s.zero += t.zero;
        s.pos += t.pos;
    }
    return s;
}

struct LdlEquivalence {
    Signature m_signature, d_signature;
    bool m_psd = false, d_psd = false;
    double reconstruction_error = 0.0;  // ‖ΠMΠᵀ − LDLᵀ‖ relative

    bool equivalent() const { return m_psd == d_psd; }
    bool same_negatives() const { return m_signature.neg == d_signature.neg; }
};

// Throws DomainError when X is outside the domain of an entry.
inline LdlEquivalence ldl_psd_equivalence(const ExprMatrix& M, const LdlDecomposition& dec, const MatrixTuple& X, double tol = 1e-9) {
    Eigen::MatrixXd Mx = M.evaluate(X), Lx = dec.L.evaluate(X), Dx = dec.D.evaluate(X);
    Eigen::MatrixXd P = dec.permutation_matrix(X.n);
    LdlEquivalence r;
    Eigen::MatrixXd Ms = 0.5 * (Mx + Mx.transpose());
    r.m_signature = psd_signature(Ms, tol);
    double mnorm = Ms.size() ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Ms, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff() : 0.0;
    r.d_signature = block_signature(dec, Dx, X.n, tol, mnorm);
    r.m_psd = r.m_signature.psd();
    r.d_psd = r.d_signature.psd();
    double scale = std::max(1.0, Mx.cwiseAbs().maxCoeff());
    r.reconstruction_error = (P * Mx * P.transpose() - Lx * Dx * Lx.transpose()).cwiseAbs().maxCoeff() / scale;
    return r;
}

}  // namespace freealg
