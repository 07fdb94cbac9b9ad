#pragma once

#include <freealg/bvmm.hpp>
#include <freealg/sdp.hpp>
#include <freealg/sets.hpp>

#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace freealg {

// ---------------------------------------------------------------------------
// Signatures

struct Signature {
    std::size_t neg = 0, zero = 0, pos = 0;
    double tol = 0.0;

    std::size_t dim() const { return neg + zero + pos; }
    bool psd() const { return neg == 0; }
    bool operator==(const Signature& o) const { return neg == o.neg && zero == o.zero && pos == o.pos; }
};

inline std::ostream& operator<<(std::ostream& os, const Signature& s) {
    return os << "(" << s.neg << "," << s.zero << "," << s.pos << ")";
}

// Eigenvalues below -tol·‖M‖, within ±tol·‖M‖, above; scale_floor raises ‖M‖ in the band.
inline Signature psd_signature(const Eigen::MatrixXd& M, double tol = 1e-9, double scale_floor = 0.0) {
    if (M.rows() != M.cols()) throw ContractError("signature needs a square matrix");
    Signature s;
    s.tol = tol;
    if (M.size() == 0) return s;
    double scale = M.cwiseAbs().maxCoeff();
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, scale))
        throw ContractError("signature needs a symmetric matrix");
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly).eigenvalues();
    double cut = tol * std::max(ev.cwiseAbs().maxCoeff(), scale_floor);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -cut) ++s.neg;
        else if (ev(i) > cut) ++s.pos;
        else ++s.zero;
    }
    return s;
}

inline Signature exact_signature(const RationalMatrix& M) {
    auto in = exact_inertia(M);
    return {in[0], in[1], in[2], 0.0};
}

// ---------------------------------------------------------------------------
// Midpoint convexity

inline Eigen::MatrixXd convexity_gap(const Polynomial& p, const MatrixTuple& X, const MatrixTuple& Y) {
    MatrixTuple mid = X;
    for (std::size_t j = 0; j < X.g(); ++j) mid.mats[j] = 0.5 * (X[j] + Y[j]);
    return 0.5 * (evaluate(p, X) + evaluate(p, Y)) - evaluate(p, mid);
}

inline RationalMatrix convexity_gap_exact(const Polynomial& p, const std::vector<RationalMatrix>& X,
                                          const std::vector<RationalMatrix>& Y) {
    std::vector<RationalMatrix> mid;
    for (std::size_t j = 0; j < X.size(); ++j) mid.push_back((X[j] + Y[j]) * Rational(1, 2));
    return (evaluate_exact(p, X) + evaluate_exact(p, Y)) * Rational(1, 2) - evaluate_exact(p, mid);
}

struct ConvexityViolation {
    MatrixTuple X, Y;
    Eigen::MatrixXd gap;
    double eigenvalue = 0.0;
    Eigen::VectorXd eigenvector;
};

struct ConvexityVerdict {
    std::size_t tested = 0;
    double min_eig = 0.0;
    std::optional<ConvexityViolation> violation;

    bool violation_found() const { return violation.has_value(); }
};

inline ConvexityVerdict convexity_probe(const Polynomial& p, const std::vector<std::size_t>& sizes, std::size_t samples,
                                        std::uint64_t seed, double tol = 1e-9) {
    if (!p.is_symmetric()) throw ContractError("convexity probe needs a symmetric polynomial");
    if (sizes.empty()) throw ContractError("convexity probe needs at least one size");
    Rng rng(seed);
    ConvexityVerdict v;
    v.min_eig = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t n = sizes[s % sizes.size()];
        auto X = sample_tuple(n, *p.context(), Distribution::gaussian_symmetric, rng);
        auto Y = sample_tuple(n, *p.context(), Distribution::gaussian_symmetric, rng);
        Eigen::MatrixXd G = convexity_gap(p, X, Y);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
        double lmin = es.eigenvalues()(0);
        double scale = std::max({1.0, evaluate(p, X).norm(), evaluate(p, Y).norm()});
        ++v.tested;
        v.min_eig = std::min(v.min_eig, lmin);
        if (lmin < -tol * scale && !v.violation) v.violation = ConvexityViolation{X, Y, G, lmin, es.eigenvectors().col(0)};
    }
    return v;
}

// ---------------------------------------------------------------------------
// Gram systems: f = Σ_k Σ_{p,q} G^k_{pq} a_pᵀ L^k_{α_p β_q} b_q

struct GramBlock {
    std::vector<Word> basis;
    std::optional<MatrixPolynomial> weight;  // none for a plain sum of squares

    std::size_t dim() const { return weight ? weight->rows() : 1; }
    std::size_t size() const { return dim() * basis.size(); }
};

struct GramSystem {
    ContextPtr ctx;
    std::vector<GramBlock> blocks;
    std::vector<Word> words;
    std::vector<std::vector<RationalMatrix>> A;
    std::vector<Rational> rhs;

    SdpProblem to_sdp() const {
        SdpProblem P;
        for (auto& b : blocks) P.blocks.push_back(b.size());
        for (std::size_t i = 0; i < A.size(); ++i) {
            BlockMatrix Ai;
            for (auto& M : A[i]) Ai.push_back(M.to_double());
            P.add_constraint(std::move(Ai), rhs[i].get_d());
        }
        return P;
    }
};

namespace detail {

inline Word canonical_word(const Word& w, const Context& ctx) {
    Word t = transpose_word(w, ctx);
    return GradedLex{}(t, w) ? t : w;
}

}  // namespace detail

inline GramSystem build_gram_system(const Polynomial& f, std::vector<GramBlock> blocks) {
    if (!f.is_symmetric()) throw ContractError("Gram systems need a symmetric polynomial");
    const auto& ctx = *f.context();
    GramSystem S;
    S.ctx = f.context();
    S.blocks = std::move(blocks);
    std::map<Word, std::size_t, GradedLex> row;
    auto row_of = [&](const Word& w) {
        Word c = detail::canonical_word(w, ctx);
        auto it = row.find(c);
        if (it != row.end()) return it->second;
        std::size_t i = S.words.size();
        row.emplace(c, i);
        S.words.push_back(c);
        std::vector<RationalMatrix> mats;
        for (auto& b : S.blocks) mats.emplace_back(b.size(), b.size());
        S.A.push_back(std::move(mats));
        S.rhs.emplace_back(0);
        return i;
    };
    for (std::size_t k = 0; k < S.blocks.size(); ++k) {
        const auto& B = S.blocks[k];
        std::size_t nb = B.basis.size();
        for (std::size_t p = 0; p < B.size(); ++p)
            for (std::size_t q = 0; q < B.size(); ++q) {
                std::size_t alpha = p / nb, beta = q / nb;
                Polynomial a = Polynomial::monomial(S.ctx, transpose_word(B.basis[p % nb], ctx));
                Polynomial b = Polynomial::monomial(S.ctx, B.basis[q % nb]);
                Polynomial prod = B.weight ? a * (*B.weight)(alpha, beta) * b : a * b;
                for (auto& [w, c] : prod.terms()) {
                    std::size_t i = row_of(w);
                    S.A[i][k](p, q) += c / 2;
                    S.A[i][k](q, p) += c / 2;
                }
            }
    }
    for (auto& [w, c] : f.terms()) S.rhs[row_of(w)] += c;
    return S;
}

// Basis words of degree ≤ d, dropping u whenever uᵀu is absent from f and only (u,u) produces it.
inline std::vector<Word> reduced_sos_basis(const Polynomial& f, std::size_t d) {
    const auto& ctx = *f.context();
    auto basis = gram_basis(ctx, d);
    for (bool changed = true; changed;) {
        changed = false;
        std::map<Word, std::size_t, GradedLex> count;
        for (auto& a : basis)
            for (auto& b : basis) ++count[concat(transpose_word(a, ctx), b)];
        std::vector<Word> keep;
        for (auto& u : basis) {
            Word w = concat(transpose_word(u, ctx), u);
            if (f.coeff(w) == 0 && count[w] == 1) {
                changed = true;
                continue;
            }
            keep.push_back(u);
        }
        basis = std::move(keep);
    }
    return basis;
}

// scale · fᵀ L f, with L = 1 for plain squares.
struct SquareTerm {
    Rational scale = 1;
    std::vector<Polynomial> f;
};

namespace detail {

// Rank-one terms d_k ℓ_k ℓ_kᵀ of an exactly PSD rational matrix.
inline std::optional<std::vector<std::pair<Rational, std::vector<Rational>>>> exact_ldl_terms(RationalMatrix M) {
    std::size_t n = M.rows();
    std::vector<std::pair<Rational, std::vector<Rational>>> out;
    for (std::size_t k = 0; k < n; ++k) {
        Rational piv = M(k, k);
        if (piv < 0) return std::nullopt;
        if (piv == 0) {
            for (std::size_t j = k + 1; j < n; ++j)
                if (M(k, j) != 0) return std::nullopt;
            continue;
        }
        std::vector<Rational> l(n, Rational(0));
        for (std::size_t i = k; i < n; ++i) l[i] = M(i, k) / piv;
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) M(i, j) -= l[i] * piv * l[j];
        out.emplace_back(piv, std::move(l));
    }
    return out;
}

inline std::vector<Polynomial> vector_of(const GramBlock& B, const ContextPtr& ctx, const std::vector<Rational>& coef) {
    std::size_t nb = B.basis.size();
    std::vector<Polynomial> f(B.dim(), Polynomial(ctx));
    for (std::size_t p = 0; p < coef.size(); ++p)
        if (coef[p] != 0) f[p / nb].add_term(B.basis[p % nb], coef[p]);
    return f;
}

inline Polynomial weighted_square(const GramBlock& B, const SquareTerm& t) {
    Polynomial out(t.f.at(0).context());
    for (std::size_t a = 0; a < t.f.size(); ++a)
        for (std::size_t b = 0; b < t.f.size(); ++b) {
            if (t.f[a].is_zero() || t.f[b].is_zero()) continue;
            if (B.weight) {
                if (!(*B.weight)(a, b).is_zero()) out += t.f[a].transpose() * (*B.weight)(a, b) * t.f[b];
            } else {
                out += t.f[a].transpose() * t.f[b];
            }
        }
    return out * t.scale;
}

inline double max_abs_coeff(const Polynomial& p) {
    double m = 0;
    for (auto& [w, c] : p.terms()) m = std::max(m, std::abs(c.get_d()));
    return m;
}

// Round a numeric solution, project it exactly onto the constraints, and keep it if exactly PSD.
inline std::optional<std::vector<RationalMatrix>> rationalize(const GramSystem& S, const BlockMatrix& X) {
    std::size_t m = S.A.size();
    RationalMatrix K(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            Rational s = 0;
            for (std::size_t k = 0; k < S.blocks.size(); ++k)
                for (std::size_t a = 0; a < S.A[i][k].rows(); ++a)
                    for (std::size_t b = 0; b < S.A[i][k].cols(); ++b)
                        if (S.A[i][k](a, b) != 0 && S.A[j][k](a, b) != 0) s += S.A[i][k](a, b) * S.A[j][k](a, b);
            K(i, j) = K(j, i) = s;
        }
    for (long den : {1L, 2L, 4L, 8L, 16L, 100L, 1000L, 10000L, 1000000L}) {
        std::vector<RationalMatrix> G;
        for (auto& B : X) {
            RationalMatrix R(B.rows(), B.cols());
            for (Eigen::Index a = 0; a < B.rows(); ++a)
                for (Eigen::Index b = a; b < B.cols(); ++b)
                    R(a, b) = R(b, a) = rational_approx(0.5 * (B(a, b) + B(b, a)), den, 0.0);
            G.push_back(std::move(R));
        }
        std::vector<Rational> r(m);
        for (std::size_t i = 0; i < m; ++i) {
            Rational s = S.rhs[i];
            for (std::size_t k = 0; k < G.size(); ++k)
                for (std::size_t a = 0; a < G[k].rows(); ++a)
                    for (std::size_t b = 0; b < G[k].cols(); ++b)
                        if (S.A[i][k](a, b) != 0) s -= S.A[i][k](a, b) * G[k](a, b);
            r[i] = s;
        }
        auto lam = solve_exact(K, r);
        if (!lam) return std::nullopt;
        for (std::size_t i = 0; i < m; ++i)
            if ((*lam)[i] != 0)
                for (std::size_t k = 0; k < G.size(); ++k) G[k] += S.A[i][k] * (*lam)[i];
        bool ok = true;
        for (auto& B : G) ok = ok && exact_psd(B);
        if (ok) return G;
    }
    return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sums of squares

struct SosCertificate {
    std::vector<Word> basis;
    Eigen::MatrixXd gram;
    std::vector<SquareTerm> squares;  // f = Σ scale·sᵀs
    double residual = 0.0;
    double min_eig = 0.0;
    bool exact = false;

    // The s_i themselves when every scale is one.
    std::vector<Polynomial> factors() const {
        std::vector<Polynomial> out;
        for (auto& t : squares) out.push_back(t.f.at(0));
        return out;
    }
};

struct SosOptions {
    SdpOptions sdp;
    bool try_exact = true;
    double residual_bound = 1e-6;
};

struct SosResult {
    SdpStatus status = SdpStatus::indeterminate;
    std::optional<SosCertificate> certificate;
    Eigen::VectorXd dual;  // infeasibility ray over the constraint words
    GramSystem system;
    SdpProblem problem;
    std::string message;
};

namespace detail {

inline std::vector<SquareTerm> numeric_squares(const GramBlock& B, const ContextPtr& ctx, const Eigen::MatrixXd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
    std::vector<SquareTerm> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        double lam = es.eigenvalues()(k);
        if (lam <= 0) continue;
        std::vector<Rational> coef(G.rows());
        for (Eigen::Index p = 0; p < G.rows(); ++p) coef[p] = rational_from_double(std::sqrt(lam) * es.eigenvectors()(p, k));
        out.push_back({1, vector_of(B, ctx, coef)});
    }
    return out;
}

inline std::vector<SquareTerm> exact_squares(const GramBlock& B, const ContextPtr& ctx, const RationalMatrix& G) {
    std::vector<SquareTerm> out;
    auto terms = exact_ldl_terms(G);
    if (!terms) throw ContractError("Gram matrix is not positive semidefinite");
    for (auto& [d, l] : *terms) out.push_back({d, vector_of(B, ctx, l)});
    return out;
}

}  // namespace detail

inline SosResult sos_decompose(const Polynomial& f, const SosOptions& o = {}) {
    if (!f.is_symmetric()) throw ContractError("sum-of-squares search needs a symmetric polynomial");
    std::size_t d = (f.degree().value_or(0) + 1) / 2;
    SosResult R;
    GramBlock B{reduced_sos_basis(f, d), std::nullopt};
    R.system = build_gram_system(f, {B});
    R.problem = R.system.to_sdp();
    if (B.basis.empty()) {
        R.status = f.is_zero() ? SdpStatus::feasible : SdpStatus::infeasible;
        if (f.is_zero()) R.certificate = SosCertificate{{}, Eigen::MatrixXd(0, 0), {}, 0.0, 0.0, true};
        R.message = "empty basis";
        return R;
    }
    auto sol = solve_sdp(R.problem, o.sdp);
    R.status = sol.status;
    R.message = sol.message;
    if (sol.status == SdpStatus::infeasible) {
        R.dual = sol.y;
        return R;
    }
    if (sol.status != SdpStatus::feasible) return R;
    SosCertificate C;
    C.basis = B.basis;
    C.gram = sol.X[0];
    C.min_eig = min_eigenvalue(C.gram);
    std::optional<std::vector<RationalMatrix>> exact;
    if (o.try_exact) exact = detail::rationalize(R.system, sol.X);
    if (exact) {
        C.squares = detail::exact_squares(B, f.context(), (*exact)[0]);
        C.gram = (*exact)[0].to_double();
        C.exact = true;
    } else {
        C.squares = detail::numeric_squares(B, f.context(), C.gram);
    }
    Polynomial res = f;
    for (auto& t : C.squares) res -= detail::weighted_square(B, t);
    C.residual = detail::max_abs_coeff(res);
    if (C.residual > o.residual_bound) {
        R.status = SdpStatus::indeterminate;
        R.message = "certificate residual above bound";
    }
    R.certificate = std::move(C);
    return R;
}

// ---------------------------------------------------------------------------
// Weighted sums of squares over a monic pencil

enum class DegreeBound { automatic, ceil, floor };

struct WsosCertificate {
    SosCertificate sos;
    std::vector<SquareTerm> weights;  // Σ scale·f_jᵀ L f_j
    Eigen::MatrixXd weight_gram;
    std::size_t degree_cap = 0;
    DegreeBound bound_used = DegreeBound::ceil;
    std::optional<std::size_t> weight_degree;
    double residual = 0.0;
    bool exact = false;
};

struct WsosOptions {
    SdpOptions sdp;
    DegreeBound bound = DegreeBound::automatic;
    bool try_exact = true;
    double residual_bound = 1e-6;
};

struct WsosResult {
    SdpStatus status = SdpStatus::indeterminate;
    std::optional<WsosCertificate> certificate;
    GramSystem system;
    SdpProblem problem;
    std::string message;
};

namespace detail {

inline WsosResult wsos_at(const Polynomial& p, const AffineLinearPencil& L, std::size_t cap, DegreeBound used,
                          const WsosOptions& o) {
    WsosResult R;
    auto ctx = join_contexts(p.context(), L.ctx);
    Polynomial f = p.in_context(ctx);
    GramBlock S{gram_basis(*ctx, cap), std::nullopt};
    GramBlock W{gram_basis(*ctx, cap), MatrixPolynomial(ctx, L.dim(), L.dim())};
    auto Lm = L.to_matrix_polynomial();
    for (std::size_t a = 0; a < L.dim(); ++a)
        for (std::size_t b = 0; b < L.dim(); ++b) (*W.weight)(a, b) = Lm(a, b).in_context(ctx);
    R.system = build_gram_system(f, {S, W});
    R.problem = R.system.to_sdp();
    auto sol = solve_sdp(R.problem, o.sdp);
    R.status = sol.status;
    R.message = sol.message;
    if (sol.status != SdpStatus::feasible) return R;
    WsosCertificate C;
    C.degree_cap = cap;
    C.bound_used = used;
    C.sos.basis = S.basis;
    C.sos.gram = sol.X[0];
    C.weight_gram = sol.X[1];
    C.sos.min_eig = std::min(min_eigenvalue(sol.X[0]), min_eigenvalue(sol.X[1]));
    std::optional<std::vector<RationalMatrix>> exact;
    if (o.try_exact) exact = rationalize(R.system, sol.X);
    if (exact) {
        C.sos.squares = exact_squares(S, ctx, (*exact)[0]);
        C.weights = exact_squares(W, ctx, (*exact)[1]);
        C.sos.gram = (*exact)[0].to_double();
        C.weight_gram = (*exact)[1].to_double();
        C.exact = C.sos.exact = true;
    } else {
        C.sos.squares = numeric_squares(S, ctx, sol.X[0]);
        C.weights = numeric_squares(W, ctx, sol.X[1]);
    }
    Polynomial res = f;
    for (auto& t : C.sos.squares) res -= weighted_square(S, t);
    for (auto& t : C.weights) res -= weighted_square(W, t);
    for (auto& t : C.weights)
        for (auto& e : t.f)
            if (auto d = e.degree()) C.weight_degree = std::max(C.weight_degree.value_or(0), *d);
    C.residual = C.sos.residual = max_abs_coeff(res);
    if (C.residual > o.residual_bound) {
        R.status = SdpStatus::indeterminate;
        R.message = "certificate residual above bound";
    }
    R.certificate = std::move(C);
    return R;
}

}  // namespace detail

// p = sᵀs + Σ f_jᵀ L f_j with deg s, f_j ≤ deg(p)/2; a plain SOS is tried first.
inline WsosResult wsos_decompose(const Polynomial& p, const AffineLinearPencil& L, const WsosOptions& o = {}) {
    if (!L.is_monic()) throw ContractError("weighted SOS needs a monic pencil; normalize it first");
    if (!p.is_symmetric()) throw ContractError("weighted SOS needs a symmetric polynomial");
    std::size_t deg = p.degree().value_or(0);
    std::size_t lo = deg / 2, hi = (deg + 1) / 2;
    std::vector<std::pair<std::size_t, DegreeBound>> caps;
    if (o.bound == DegreeBound::floor) caps = {{lo, DegreeBound::floor}};
    else if (o.bound == DegreeBound::ceil) caps = {{hi, DegreeBound::ceil}};
    else if (lo == hi) caps = {{hi, DegreeBound::ceil}};
    else caps = {{lo, DegreeBound::floor}, {hi, DegreeBound::ceil}};

    SosOptions so{o.sdp, o.try_exact, o.residual_bound};
    auto plain = sos_decompose(p, so);
    if (plain.status == SdpStatus::feasible && plain.certificate) {
        WsosResult R;
        R.status = SdpStatus::feasible;
        R.system = plain.system;
        R.problem = plain.problem;
        WsosCertificate C;
        C.sos = *plain.certificate;
        C.degree_cap = caps.front().first;
        C.bound_used = caps.front().second;
        C.residual = C.sos.residual;
        C.exact = C.sos.exact;
        R.certificate = std::move(C);
        R.message = "plain sum of squares";
        return R;
    }
    WsosResult last;
    for (auto& [cap, used] : caps) {
        last = detail::wsos_at(p, L, cap, used, o);
        if (last.status == SdpStatus::feasible) return last;
    }
    return last;
}

// ---------------------------------------------------------------------------
// Middle-matrix positivity on a region, with a q-violation witness

struct QuadraticWitness {
    MatrixTuple X;  // sampled point
    double z_eigenvalue = 0.0;
    Eigen::VectorXd z_eigenvector;
    MatrixTuple W, H;  // amplified point and directions
    Eigen::VectorXd omega;
    std::size_t N_recipe = 0, N_used = 0;
    double q_value = 0.0;
    double scale = 1.0;
    bool verified = false;
};

struct RegionCheckOptions {
    std::vector<std::size_t> sizes{2};
    std::size_t samples = 20;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::size_t max_amplified = 400;
};

struct RegionVerdict {
    std::size_t tested = 0;
    double min_eig = 0.0;
    std::optional<QuadraticWitness> violation;

    bool psd_on_samples() const { return !violation.has_value(); }
};

namespace detail {

inline std::vector<std::size_t> state_vars(const BvMm& rep) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < rep.ctx->size(); ++j)
        if (!rep.hvars.count(j)) s.push_back(j);
    return s;
}

inline MatrixTuple full_tuple(const BvMm& rep, const MatrixTuple& X, const MatrixTuple* H) {
    auto S = state_vars(rep);
    MatrixTuple T(X.n, std::vector<Eigen::MatrixXd>(rep.ctx->size(), Eigen::MatrixXd::Zero(X.n, X.n)));
    for (std::size_t i = 0; i < S.size(); ++i) T.mats[S[i]] = X[i];
    if (H) {
        std::size_t i = 0;
        for (auto h : rep.hvars) T.mats[h] = (*H)[i++];
    }
    return T;
}

// X̃ ⊕ Y with Y a Fock tuple; off-diagonal H blocks send V(X)[H]γ onto the eigenvector.
inline std::optional<QuadraticWitness> build_witness(const BvMm& rep, const MatrixTuple& Xs, double lam, const Eigen::VectorXd& u,
                                                     const NcSet* region, const RegionCheckOptions& o) {
    const auto& ctx = *rep.ctx;
    auto S = state_vars(rep);
    for (auto j : S)
        if (!ctx.is_symmetric(j)) return std::nullopt;
    for (auto h : rep.hvars)
        if (!ctx.is_symmetric(h)) return std::nullopt;
    std::size_t ell = 0;
    for (auto& e : rep.border) ell = std::max(ell, e.size() - 1);
    std::size_t g = S.size();
    std::vector<std::size_t> letters(g);
    for (std::size_t i = 0; i < g; ++i) letters[i] = S[i];
    auto fock = words_up_to(alphabet_of(ctx, letters), ell);
    std::map<Word, std::size_t, GradedLex> index;
    for (std::size_t i = 0; i < fock.size(); ++i) index.emplace(fock[i], i);
    std::size_t t = fock.size(), s = Xs.n;
    MatrixTuple Y(t, {});
    for (std::size_t i = 0; i < g; ++i) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(t, t);
        for (std::size_t c = 0; c < t; ++c) {
            if (fock[c].size() >= ell) continue;
            Word xw{{static_cast<std::uint32_t>(S[i]), false}};
            xw.insert(xw.end(), fock[c].begin(), fock[c].end());
            T(index.at(xw), c) = 1;
        }
        Y.mats.push_back(T + T.transpose());
    }
    if (region) {
        for (int k = 0; k < 80 && region->margin(Y) <= 0; ++k)
            for (auto& M : Y.mats) M *= 0.5;
        if (region->margin(Y) <= 0) return std::nullopt;
    }
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(t);
    eta(index.at(Word{})) = 1;
    // z'_k = w_k(Y) η for border entries h_j w_k
    MatrixTuple Yfull = full_tuple(rep, Y, nullptr);
    std::size_t n0 = s + t;
    MatrixTuple H(n0, {});
    for (auto h : rep.hvars) {
        std::vector<std::size_t> ks;
        for (std::size_t k = 0; k < rep.size(); ++k)
            if (rep.border[k][0].var == h) ks.push_back(k);
        Eigen::MatrixXd Zp(t, ks.size()), U(s, ks.size());
        for (std::size_t c = 0; c < ks.size(); ++c) {
            Word w(rep.border[ks[c]].begin() + 1, rep.border[ks[c]].end());
            Zp.col(c) = evaluate(Polynomial::monomial(rep.ctx, w), Yfull) * eta;
            U.col(c) = u.segment(ks[c] * s, s);
        }
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(s, t);
        if (!ks.empty()) B = U * (Zp.transpose() * Zp).ldlt().solve(Zp.transpose());
        Eigen::MatrixXd Hj = Eigen::MatrixXd::Zero(n0, n0);
        Hj.topRightCorner(s, t) = B;
        Hj.bottomLeftCorner(t, s) = B.transpose();
        H.mats.push_back(Hj);
    }
    MatrixTuple X = direct_sum(Xs, Y);
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n0);
    gamma.tail(t) = eta;

    QuadraticWitness w;
    w.X = Xs;
    w.z_eigenvalue = lam;
    w.z_eigenvector = u;
    double kappa = static_cast<double>(fock.size());
    w.N_recipe = static_cast<std::size_t>(static_cast<double>(g) * kappa * (kappa - 1) / 2) + 1;
    w.N_used = std::max<std::size_t>(1, std::min(w.N_recipe, o.max_amplified / n0));
    w.W = amplify(X, w.N_used);
    w.H = amplify(H, w.N_used);
    w.omega = Eigen::VectorXd(n0 * w.N_used);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t k = 0; k < w.N_used; ++k) w.omega(i * w.N_used + k) = gamma(i) / std::sqrt(static_cast<double>(w.N_used));
    Eigen::MatrixXd Q = evaluate(rep.source, full_tuple(rep, w.W, &w.H));
    w.q_value = w.omega.dot(Q * w.omega);
    w.scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    w.verified = w.q_value < -1e-10 * w.scale;
    return w;
}

}  // namespace detail

inline RegionVerdict middle_matrix_region_check(const BvMm& rep, const std::optional<NcSet>& region, const RegionCheckOptions& o = {}) {
    if (o.sizes.empty()) throw ContractError("region check needs at least one size");
    RegionVerdict v;
    v.min_eig = std::numeric_limits<double>::infinity();
    if (rep.border.empty()) return v;
    auto S = detail::state_vars(rep);
    std::vector<VariableSpec> specs;
    for (auto j : S) specs.push_back((*rep.ctx)[j]);
    auto sctx = Context::make(specs);
    Rng rng(o.seed);
    for (std::size_t k = 0; k < o.samples; ++k) {
        std::size_t n = o.sizes[k % o.sizes.size()];
        MatrixTuple X = region ? region->sample(n, rng) : sample_tuple(n, *sctx, Distribution::gaussian_symmetric, rng);
        Eigen::MatrixXd Z = evaluate(rep.Z, detail::full_tuple(rep, X, nullptr));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Z + Z.transpose()));
        double lam = es.eigenvalues()(0);
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        ++v.tested;
        v.min_eig = std::min(v.min_eig, lam);
        if (lam < -o.tol * scale && !v.violation) {
            auto w = detail::build_witness(rep, X, lam, es.eigenvectors().col(0), region ? &*region : nullptr, o);
            if (w) {
                v.violation = std::move(*w);
            } else {
                QuadraticWitness bare;
                bare.X = X;
                bare.z_eigenvalue = lam;
                bare.z_eigenvector = es.eigenvectors().col(0);
                v.violation = std::move(bare);
            }
        }
    }
    return v;
}

inline RegionVerdict middle_matrix_region_check(const Polynomial& q, const std::optional<NcSet>& region, const RegionCheckOptions& o = {}) {
    return middle_matrix_region_check(extract_bvmm(q), region, o);
}

// ---------------------------------------------------------------------------
// Local search for small minimum eigenvalues (probes infima that are not attained)

struct EigenSearchResult {
    MatrixTuple X;
    double value = 0.0;
};

inline EigenSearchResult minimize_min_eigenvalue(const Polynomial& p, std::size_t n, std::uint64_t seed, std::size_t iterations = 20000,
                                                 double stop_below = -std::numeric_limits<double>::infinity()) {
    Rng rng(seed);
    auto X = sample_tuple(n, *p.context(), Distribution::gaussian_symmetric, rng);
    double best = min_eigenvalue(evaluate(p, X));
    double step = 0.5;
    for (std::size_t it = 0; it < iterations && best > stop_below; ++it) {
        MatrixTuple Y = X;
        for (auto& M : Y.mats) M += gaussian_matrix(rng, n, true, step);
        double val = min_eigenvalue(evaluate(p, Y));
        if (val < best) {
            best = val;
            X = std::move(Y);
            step *= 1.5;
        } else {
            step = std::max(1e-6, step * 0.95);
        }
    }
    return {X, best};
}

}  // namespace freealg
