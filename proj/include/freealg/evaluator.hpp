#pragma once

#include <freealg/expressions.hpp>
#include <freealg/pencil.hpp>
#include <freealg/polynomial.hpp>
#include <freealg/rational_matrix.hpp>

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <random>
#include <unordered_map>
#include <vector>

namespace freealg {

struct MatrixTuple {
    std::size_t n = 0;
    std::vector<Eigen::MatrixXd> mats;

    MatrixTuple() = default;
    MatrixTuple(std::size_t size, std::vector<Eigen::MatrixXd> m) : n(size), mats(std::move(m)) {}

    std::size_t g() const { return mats.size(); }
    const Eigen::MatrixXd& operator[](std::size_t i) const { return mats.at(i); }
};

// Size checks, and symmetrization of symmetric slots within 1e-12.
inline MatrixTuple validated(const MatrixTuple& X, const Context& ctx) {
    if (X.mats.size() < ctx.size()) throw ContextError("matrix tuple has fewer matrices than declared variables");
    MatrixTuple out = X;
    for (std::size_t i = 0; i < X.mats.size(); ++i) {
        const auto& M = X.mats[i];
        if (static_cast<std::size_t>(M.rows()) != X.n || static_cast<std::size_t>(M.cols()) != X.n)
            throw ContextError("matrix tuple entries must all be " + std::to_string(X.n) + "x" + std::to_string(X.n));
        if (i < ctx.size() && ctx.is_symmetric(i)) {
            double dev = X.n ? (M - M.transpose()).cwiseAbs().maxCoeff() : 0.0;
            if (dev > 1e-12) throw ContractError("matrix for symmetric variable '" + ctx[i].name + "' is not symmetric");
            out.mats[i] = (M + M.transpose()) / 2;
        }
    }
    return out;
}

inline MatrixTuple direct_sum(const MatrixTuple& X, const MatrixTuple& Y) {
    if (X.g() != Y.g()) throw ContextError("direct sum of tuples with different lengths");
    MatrixTuple Z;
    Z.n = X.n + Y.n;
    for (std::size_t j = 0; j < X.g(); ++j) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(Z.n, Z.n);
        M.topLeftCorner(X.n, X.n) = X[j];
        M.bottomRightCorner(Y.n, Y.n) = Y[j];
        Z.mats.push_back(M);
    }
    return Z;
}

// A ⊗ B as the block matrix [a_ij B].
inline Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

inline MatrixTuple amplify(const MatrixTuple& X, std::size_t N) {
    MatrixTuple W;
    W.n = X.n * N;
    for (auto& M : X.mats) W.mats.push_back(kron(M, Eigen::MatrixXd::Identity(N, N)));
    return W;
}

namespace detail {

struct DoubleOps {
    using M = Eigen::MatrixXd;
    static M identity(std::size_t n) { return M::Identity(n, n); }
    static M zero(std::size_t r, std::size_t c) { return M::Zero(r, c); }
    static void axpy(M& acc, const Rational& c, const M& X) { acc += c.get_d() * X; }
    static M mul(const M& a, const M& b) { return a * b; }
    static M transpose(const M& a) { return a.transpose(); }
};

struct ExactOps {
    using M = RationalMatrix;
    static M identity(std::size_t n) { return M::identity(n); }
    static M zero(std::size_t r, std::size_t c) { return M(r, c); }
    static void axpy(M& acc, const Rational& c, const M& X) { acc += c * X; }
    static M mul(const M& a, const M& b) { return a * b; }
    static M transpose(const M& a) { return a.transpose(); }
};

// Sum of coefficient·word products, sharing prefix products across terms.
template <class Ops>
typename Ops::M evaluate_terms(const Polynomial& p, const std::vector<typename Ops::M>& X, std::size_t n) {
    using M = typename Ops::M;
    std::vector<M> Xt;
    Xt.reserve(X.size());
    for (auto& m : X) Xt.push_back(Ops::transpose(m));
    M acc = Ops::zero(n, n);
    std::map<Word, M, GradedLex> prefix;
    for (auto& [w, c] : p.terms()) {
        if (w.empty()) {
            Ops::axpy(acc, c, Ops::identity(n));
            continue;
        }
        std::size_t k = w.size();
        const M* best = nullptr;
        std::size_t have = 0;
        for (std::size_t len = k; len > 0; --len) {
            auto it = prefix.find(Word(w.begin(), w.begin() + len));
            if (it != prefix.end()) {
                best = &it->second;
                have = len;
                break;
            }
        }
        if (w[0].var >= X.size()) throw ContextError("matrix tuple is missing a variable");
        M cur = best ? *best : (w[0].transposed ? Xt[w[0].var] : X[w[0].var]);
        if (!best) have = 1;
        for (std::size_t i = have; i < k; ++i) {
            if (w[i].var >= X.size()) throw ContextError("matrix tuple is missing a variable");
            prefix.emplace(Word(w.begin(), w.begin() + i), cur);
            cur = Ops::mul(cur, w[i].transposed ? Xt[w[i].var] : X[w[i].var]);
        }
        prefix.emplace(w, cur);
        Ops::axpy(acc, c, cur);
    }
    return acc;
}

}  // namespace detail

inline Eigen::MatrixXd evaluate(const Polynomial& p, const MatrixTuple& X) {
    if (p.context()) {
        for (auto v : p.variables_used())
            if (v >= X.g()) throw ContextError("matrix tuple is missing variable '" + (*p.context())[v].name + "'");
    }
    return detail::evaluate_terms<detail::DoubleOps>(p, X.mats, X.n);
}

inline RationalMatrix evaluate_exact(const Polynomial& p, const std::vector<RationalMatrix>& X) {
    std::size_t n = X.empty() ? 1 : X[0].rows();
    for (auto v : p.variables_used())
        if (v >= X.size()) throw ContextError("exact tuple is missing a variable");
    return detail::evaluate_terms<detail::ExactOps>(p, X, n);
}

// Block result of size (rows·n) × (cols·n).
inline Eigen::MatrixXd evaluate(const MatrixPolynomial& P, const MatrixTuple& X) {
    Eigen::MatrixXd out(P.rows() * X.n, P.cols() * X.n);
    for (std::size_t i = 0; i < P.rows(); ++i)
        for (std::size_t j = 0; j < P.cols(); ++j) out.block(i * X.n, j * X.n, X.n, X.n) = evaluate(P(i, j), X);
    return out;
}

inline RationalMatrix evaluate_exact(const MatrixPolynomial& P, const std::vector<RationalMatrix>& X) {
    std::size_t n = X.empty() ? 1 : X[0].rows();
    RationalMatrix out(P.rows() * n, P.cols() * n);
    for (std::size_t i = 0; i < P.rows(); ++i)
        for (std::size_t j = 0; j < P.cols(); ++j) {
            auto b = evaluate_exact(P(i, j), X);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) out(i * n + r, j * n + c) = b(r, c);
        }
    return out;
}

// A·p evaluates to A ⊗ p(X).
inline Eigen::MatrixXd evaluate_scaled(const Eigen::MatrixXd& A, const Polynomial& p, const MatrixTuple& X) {
    return kron(A, evaluate(p, X));
}

inline Eigen::MatrixXd evaluate(const AffineLinearPencil& L, const MatrixTuple& X) {
    if (X.g() < L.nvars()) throw ContractError("pencil and tuple sizes are incompatible");
    Eigen::MatrixXd out = kron(L.A0, Eigen::MatrixXd::Identity(X.n, X.n));
    for (std::size_t j = 0; j < L.nvars(); ++j) out += kron(L.A[j], X[j]);
    return out;
}

inline bool invertible(const Eigen::MatrixXd& M, double rel = 1e-12) {
    if (M.rows() == 0) return true;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    auto s = svd.singularValues();
    return s(s.size() - 1) > rel * s(0);
}

class ExpressionEvaluator {
public:
    ExpressionEvaluator(const Expression& e, const MatrixTuple& X, double inv_rel = 1e-12)
        : e_(e), X_(X), rel_(inv_rel) {}

    Eigen::MatrixXd run() { return eval(e_.root); }

private:
    Eigen::MatrixXd eval(const Expr& node) {
        if (auto it = memo_.find(node.get()); it != memo_.end()) return it->second;
        std::size_t n = X_.n;
        Eigen::MatrixXd r;
        switch (node->kind) {
            case NodeKind::constant: r = node->value.get_d() * Eigen::MatrixXd::Identity(n, n); break;
            case NodeKind::variable: {
                if (node->var >= X_.g()) throw ContextError("matrix tuple is missing a variable");
                r = node->transposed ? Eigen::MatrixXd(X_[node->var].transpose()) : X_[node->var];
                break;
            }
            case NodeKind::sum:
                r = Eigen::MatrixXd::Zero(n, n);
                for (auto& c : node->children) r += eval(c);
                break;
            case NodeKind::product:
                r = eval(node->children[0]);
                for (std::size_t i = 1; i < node->children.size(); ++i) r = r * eval(node->children[i]);
                break;
            case NodeKind::transpose: r = eval(node->children[0]).transpose(); break;
            case NodeKind::inverse: {
                Eigen::MatrixXd a = eval(node->children[0]);
                if (!invertible(a, rel_)) {
                    std::string sub = detail::format_node(*e_.ctx, node->children[0], detail::Slot::top);
                    throw DomainError("singular inverse of '" + sub + "'", sub);
                }
                r = a.partialPivLu().inverse();
                break;
            }
        }
        memo_.emplace(node.get(), r);
        return r;
    }

    const Expression& e_;
    const MatrixTuple& X_;
    double rel_;
    std::unordered_map<const ExprNode*, Eigen::MatrixXd> memo_;
};

inline Eigen::MatrixXd evaluate(const Expression& e, const MatrixTuple& X) {
    return ExpressionEvaluator(e, X).run();
}

// ---------------------------------------------------------------------------
// Sampling

enum class Distribution { gaussian_symmetric, gaussian_general };

using Rng = std::mt19937_64;

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, std::size_t n, bool symmetric, double scale = 1.0) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXd G(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) G(i, j) = N(rng);
    if (symmetric) G = (G + G.transpose()).eval() / std::sqrt(2.0);
    return scale * G;
}

// Symmetric variables always receive symmetric matrices.
inline MatrixTuple sample_tuple(std::size_t n, const Context& ctx, Distribution dist, Rng& rng, double scale = 1.0) {
    MatrixTuple X;
    X.n = n;
    for (std::size_t j = 0; j < ctx.size(); ++j) {
        bool sym = ctx.is_symmetric(j) || dist == Distribution::gaussian_symmetric;
        X.mats.push_back(gaussian_matrix(rng, n, sym, scale));
    }
    return X;
}

// Positive margin means strictly inside.
using MarginFn = std::function<double(const MatrixTuple&)>;

struct ConstrainedSampling {
    double margin = 1e-9;
    std::size_t budget = 20000;
    double initial_radius = 2.0;
};

// Rejection sampling with proposals r·G/‖G‖, the radius bound shrinking on repeated rejection.
inline MatrixTuple sample_constrained(std::size_t n, const Context& ctx, Distribution dist, const MarginFn& inside,
                                      Rng& rng, ConstrainedSampling opts = {}) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double R = opts.initial_radius;
    std::size_t streak = 0;
    for (std::size_t attempt = 0; attempt < opts.budget; ++attempt) {
        MatrixTuple X = sample_tuple(n, ctx, dist, rng);
        double norm = 0;
        for (auto& M : X.mats) norm = std::max(norm, M.norm());
        if (norm == 0) continue;
        double r = R * U(rng);
        for (auto& M : X.mats) M *= r / norm;
        if (inside(X) >= opts.margin) return X;
        if (++streak >= 20) {
            R *= 0.7;
            streak = 0;
        }
    }
    throw SamplingError("rejection budget exhausted; the set may be empty or thin");
}

// ---------------------------------------------------------------------------
// Fock-space witness

struct FockWitness {
    std::size_t k = 0;
    std::vector<Word> basis;
    std::vector<RationalMatrix> Y;
    RationalMatrix w;      // coordinate vector of the empty word
    RationalMatrix image;  // p(Y) w
};

inline FockWitness fock_witness(const Polynomial& p, std::size_t k) {
    if (p.is_zero()) throw ContractError("the zero polynomial has no witness");
    if (*p.degree() > k) throw ContractError("truncation degree below deg p");
    const auto& ctx = *p.context();
    for (std::size_t j = 0; j < ctx.size(); ++j)
        if (!ctx.is_symmetric(j)) throw ContractError("Fock witness is built for symmetric variables");
    std::vector<std::size_t> vars(ctx.size());
    for (std::size_t j = 0; j < vars.size(); ++j) vars[j] = j;
    FockWitness F;
    F.k = k;
    F.basis = words_up_to(alphabet_of(ctx, vars), k);
    std::map<Word, std::size_t, GradedLex> index;
    for (std::size_t i = 0; i < F.basis.size(); ++i) index.emplace(F.basis[i], i);
    std::size_t N = F.basis.size();
    for (std::size_t j = 0; j < ctx.size(); ++j) {
        RationalMatrix T(N, N);
        for (std::size_t i = 0; i < N; ++i) {
            const Word& v = F.basis[i];
            if (v.size() >= k) continue;
            Word xv{{static_cast<std::uint32_t>(j), false}};
            xv.insert(xv.end(), v.begin(), v.end());
            T(index.at(xv), i) = 1;
        }
        F.Y.push_back(T + T.transpose());
    }
    F.w = RationalMatrix(N, 1);
    F.w(index.at(Word{}), 0) = 1;
    F.image = RationalMatrix(N, 1);
    for (auto& [word, c] : p.terms()) {
        RationalMatrix v = F.w;
        for (auto it = word.rbegin(); it != word.rend(); ++it) v = F.Y[it->var] * v;
        F.image += c * v;
    }
    return F;
}

}  // namespace freealg
