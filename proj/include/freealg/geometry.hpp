#pragma once

#include <freealg/calculus.hpp>
#include <freealg/evaluator.hpp>

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace freealg {

struct RankOptions {
    double rel = 1e-10;  // singular values below rel·σ_max count as zero
};

namespace detail {

inline std::size_t numeric_rank(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd, double rel) {
    auto s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0) return 0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel * s(0)) ++r;
    return r;
}

// Orthonormal nullspace of A (columns).
inline Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A, double rel, std::size_t* rank = nullptr) {
    std::size_t cols = static_cast<std::size_t>(A.cols());
    if (A.rows() == 0) {
        if (rank) *rank = 0;
        return Eigen::MatrixXd::Identity(cols, cols);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    std::size_t r = numeric_rank(svd, rel);
    if (rank) *rank = r;
    return svd.matrixV().rightCols(cols - r);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Direction coordinates: orthonormal (Frobenius) basis of the tuple space

struct TupleCoordinates {
    ContextPtr ctx;
    std::vector<std::size_t> vars;  // directions live in these slots
    std::size_t n = 0;

    std::size_t slot_dim(std::size_t j) const { return ctx->is_symmetric(vars[j]) ? n * (n + 1) / 2 : n * n; }

    std::size_t dim() const {
        std::size_t d = 0;
        for (std::size_t j = 0; j < vars.size(); ++j) d += slot_dim(j);
        return d;
    }

    // Coordinate vector to a tuple of direction matrices (one per var).
    std::vector<Eigen::MatrixXd> tuple(const Eigen::VectorXd& c) const {
        std::vector<Eigen::MatrixXd> H;
        std::size_t k = 0;
        const double r = 1.0 / std::sqrt(2.0);
        for (std::size_t j = 0; j < vars.size(); ++j) {
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
            if (ctx->is_symmetric(vars[j])) {
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = a; b < n; ++b, ++k) {
                        if (a == b) M(a, a) = c(k);
                        else M(a, b) = M(b, a) = r * c(k);
                    }
            } else {
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b, ++k) M(a, b) = c(k);
            }
            H.push_back(M);
        }
        return H;
    }
};

// ---------------------------------------------------------------------------
// Points of V(p) = {(X, v) : p(X)v = 0}

struct VarietyPoint {
    MatrixTuple X;
    Eigen::VectorXd v;
    double residual = 0.0;
    double scale = 1.0;

    bool on_variety(double tol = 1e-9) const { return residual <= tol * scale; }
};

inline VarietyPoint variety_point(const Polynomial& p, const MatrixTuple& X, const Eigen::VectorXd& v) {
    if (static_cast<std::size_t>(v.size()) != X.n) throw ContractError("vector length must match the matrix size");
    Eigen::MatrixXd P = evaluate(p, X);
    VarietyPoint pt{X, v, (P * v).norm(), 1.0};
    double pn = P.size() ? Eigen::JacobiSVD<Eigen::MatrixXd>(P).singularValues()(0) : 0.0;
    pt.scale = std::max(1.0, pn * v.norm());
    return pt;
}

namespace detail {

// Tuple with directions H placed in the direction slots of dm.
inline MatrixTuple with_direction_values(const DirectionMap& dm, const MatrixTuple& X, const std::vector<Eigen::MatrixXd>& H) {
    MatrixTuple T(X.n, std::vector<Eigen::MatrixXd>(dm.ctx->size(), Eigen::MatrixXd::Zero(X.n, X.n)));
    for (std::size_t j = 0; j < X.g() && j < T.g(); ++j) T.mats[j] = X[j];
    std::size_t k = 0;
    for (auto& [x, h] : dm.dir) T.mats[h] = H[k++];
    return T;
}

}  // namespace detail

// Matrix of H ↦ p′(X)[H]v in tuple coordinates.
struct DerivativeMap {
    DirectionMap dm;
    TupleCoordinates coords;
    Eigen::MatrixXd J;
};

inline DerivativeMap derivative_map(const Polynomial& p, const VarietyPoint& pt) {
    auto dm = with_directions(p.context(), [&] {
        std::vector<std::size_t> v(p.context()->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
        return v;
    }());
    Polynomial d1 = directional_derivative(p, 1, dm);
    TupleCoordinates tc{p.context(), dm.state_vars(), pt.X.n};
    Eigen::MatrixXd J(pt.X.n, tc.dim());
    for (std::size_t k = 0; k < tc.dim(); ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(tc.dim(), k);
        J.col(k) = evaluate(d1, detail::with_direction_values(dm, pt.X, tc.tuple(e))) * pt.v;
    }
    return {dm, tc, J};
}

struct ClampedTangent {
    TupleCoordinates coords;
    Eigen::MatrixXd basis;  // orthonormal columns in tuple coordinates
    std::size_t rank = 0;
    std::size_t codimension = 0;

    std::vector<Eigen::MatrixXd> direction(std::size_t k) const { return coords.tuple(basis.col(k)); }
};

inline ClampedTangent clamped_tangent(const Polynomial& p, const VarietyPoint& pt, RankOptions o = {}) {
    if (!variety_point(p, pt.X, pt.v).on_variety()) throw ContractError("point is not on the variety");
    auto D = derivative_map(p, pt);
    ClampedTangent t;
    t.coords = D.coords;
    t.basis = detail::nullspace(D.J, o.rel, &t.rank);
    t.codimension = t.rank;
    return t;
}

struct FullRankVerdict {
    bool full_rank = false;
    std::size_t rank = 0;
    std::size_t n = 0;
};

inline FullRankVerdict full_rank_test(const Polynomial& p, const VarietyPoint& pt, RankOptions o = {}) {
    FullRankVerdict r;
    r.n = pt.X.n;
    if (pt.v.norm() == 0) return r;
    auto D = derivative_map(p, pt);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D.J);
    r.rank = detail::numeric_rank(svd, o.rel);
    r.full_rank = r.rank == r.n;
    return r;
}

// −⟨p″(X)[H]v, v⟩ on the tangent basis, by polarization.
inline Eigen::MatrixXd second_fundamental_form(const Polynomial& p, const VarietyPoint& pt, const ClampedTangent& t) {
    auto dm = with_directions(p.context(), t.coords.vars);
    Polynomial q = hessian(p, dm);
    std::size_t m = static_cast<std::size_t>(t.basis.cols());
    auto value = [&](const Eigen::VectorXd& c) {
        return -pt.v.dot(evaluate(q, detail::with_direction_values(dm, pt.X, t.coords.tuple(c))) * pt.v);
    };
    Eigen::MatrixXd S(m, m);
    for (std::size_t a = 0; a < m; ++a) S(a, a) = value(t.basis.col(a));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            S(a, b) = S(b, a) = 0.25 * (value(t.basis.col(a) + t.basis.col(b)) - value(t.basis.col(a) - t.basis.col(b)));
    return S;
}

struct CurvatureReport {
    double residual = 0.0;
    std::size_t rank = 0;
    std::size_t codimension = 0;
    bool full_rank = false;
    double curvature_margin = 0.0;  // smallest eigenvalue of the second fundamental form
    bool curvature_positive = false;
};

inline CurvatureReport probe_point(const Polynomial& p, const VarietyPoint& pt, double tol = 1e-9, RankOptions o = {}) {
    CurvatureReport r;
    r.residual = pt.residual;
    auto t = clamped_tangent(p, pt, o);
    r.rank = t.rank;
    r.codimension = t.codimension;
    r.full_rank = t.rank == pt.X.n;
    Eigen::MatrixXd S = second_fundamental_form(p, pt, t);
    r.curvature_margin = S.size() ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues()(0) : 0.0;
    double scale = std::max(1.0, S.size() ? S.cwiseAbs().maxCoeff() : 0.0);
    r.curvature_positive = r.curvature_margin >= -tol * scale;
    return r;
}

// ---------------------------------------------------------------------------
// Codimension of {(H_j z_i)} over symmetric tuples

struct CodimensionResult {
    std::size_t rank = 0;
    std::size_t observed = 0;
    std::size_t expected = 0;

    bool matches() const { return observed == expected; }
};

// Columns of Z are z_1..z_d.
inline CodimensionResult chsy_codimension(std::size_t g, const Eigen::MatrixXd& Z, RankOptions o = {}) {
    std::size_t n = Z.rows(), d = Z.cols();
    if (g == 0) throw ContractError("need at least one variable");
    if (d >= n) throw ContractError("need more rows than vectors");
    Eigen::JacobiSVD<Eigen::MatrixXd> zsvd(Z);
    if (detail::numeric_rank(zsvd, o.rel) != d) throw ContractError("vectors must be linearly independent");
    std::vector<VariableSpec> specs;
    for (std::size_t j = 0; j < g; ++j) specs.push_back({"x" + std::to_string(j + 1), VarKind::symmetric, VarClass::x});
    auto ctx = Context::make(specs);
    std::vector<std::size_t> vars(g);
    for (std::size_t j = 0; j < g; ++j) vars[j] = j;
    TupleCoordinates tc{ctx, vars, n};
    Eigen::MatrixXd A(g * n * d, tc.dim());
    for (std::size_t k = 0; k < tc.dim(); ++k) {
        auto H = tc.tuple(Eigen::VectorXd::Unit(tc.dim(), k));
        for (std::size_t j = 0; j < g; ++j)
            for (std::size_t i = 0; i < d; ++i) A.block((j * d + i) * n, k, n, 1) = H[j] * Z.col(i);
    }
    CodimensionResult r;
    r.rank = detail::numeric_rank(Eigen::JacobiSVD<Eigen::MatrixXd>(A), o.rel);
    r.observed = g * n * d - r.rank;
    r.expected = g * d * (d - 1) / 2;
    return r;
}

// Codimension of {V(X)[H]v} for the border of all words of degree ≤ d.
inline CodimensionResult border_image_codimension(const ContextPtr& ctx, const MatrixTuple& X, const Eigen::VectorXd& v, std::size_t d,
                                                  RankOptions o = {}) {
    std::vector<std::size_t> vars(ctx->size());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
    auto words = words_up_to(alphabet_of(*ctx, vars), d);
    Eigen::MatrixXd Z(X.n, words.size());
    for (std::size_t k = 0; k < words.size(); ++k) Z.col(k) = evaluate(Polynomial::monomial(ctx, words[k]), X) * v;
    return chsy_codimension(ctx->size(), Z, o);
}

// ---------------------------------------------------------------------------
// Linear dependence of rational functions across samples

enum class DependenceStatus { independent_on_samples, dependent, inconclusive };

inline const char* to_string(DependenceStatus s) {
    switch (s) {
        case DependenceStatus::independent_on_samples: return "independent-on-samples";
        case DependenceStatus::dependent: return "dependent";
        default: return "inconclusive";
    }
}

struct DependenceResult {
    DependenceStatus status = DependenceStatus::inconclusive;
    Eigen::VectorXd lambda;
    double smallest_singular = 0.0;
    double largest_singular = 0.0;
    std::size_t used = 0, skipped = 0;
    std::vector<std::string> skip_reasons;
};

using TupleSampler = std::function<MatrixTuple(std::size_t, Rng&)>;

// Columns G_j(X_i)v_i stacked over all samples; equivalent to one evaluation on the direct sum.
inline DependenceResult common_dependence(const std::vector<Expression>& G, const TupleSampler& sampler, std::size_t samples,
                                          std::uint64_t seed, const std::vector<std::size_t>& sizes = {2, 3}, double tol = 1e-9) {
    if (G.size() < 2) throw ContractError("need at least two functions");
    if (sizes.empty()) throw ContractError("need at least one size");
    Rng rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<Eigen::MatrixXd> blocks;
    DependenceResult r;
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t n = sizes[s % sizes.size()];
        MatrixTuple X = sampler(n, rng);
        Eigen::VectorXd v(n);
        for (std::size_t i = 0; i < n; ++i) v(i) = N(rng);
        v.normalize();
        Eigen::MatrixXd B(n, G.size());
        try {
            for (std::size_t j = 0; j < G.size(); ++j) B.col(j) = evaluate(G[j], X) * v;
        } catch (const DomainError& e) {
            ++r.skipped;
            r.skip_reasons.push_back(e.what());
            continue;
        }
        blocks.push_back(B);
        ++r.used;
    }
    if (blocks.empty()) return r;
    std::size_t rows = 0;
    for (auto& B : blocks) rows += B.rows();
    Eigen::MatrixXd A(rows, G.size());
    std::size_t at = 0;
    for (auto& B : blocks) {
        A.middleRows(at, B.rows()) = B;
        at += B.rows();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    auto sv = svd.singularValues();
    r.largest_singular = sv(0);
    r.smallest_singular = sv.size() == static_cast<Eigen::Index>(G.size()) ? sv(sv.size() - 1) : 0.0;
    if (r.smallest_singular <= tol * std::max(1.0, r.largest_singular)) {
        r.status = DependenceStatus::dependent;
        r.lambda = svd.matrixV().col(G.size() - 1);
        double big = r.lambda.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < r.lambda.size(); ++i)
            if (std::abs(r.lambda(i)) > 1e-9 * big) {
                if (r.lambda(i) < 0) r.lambda = -r.lambda;
                break;
            }
    } else {
        r.status = DependenceStatus::independent_on_samples;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Degree-bounded Zariski closure of points

struct ZariskiAnnihilator {
    ContextPtr ctx;
    std::vector<Word> words;
    Eigen::MatrixXd basis;  // columns are coefficient vectors over words
    std::size_t rank = 0;   // rank of the evaluation map

    std::size_t dim() const { return static_cast<std::size_t>(basis.cols()); }

    Eigen::MatrixXd evaluation_map(const MatrixTuple& Y, const Eigen::VectorXd& w) const {
        Eigen::MatrixXd E(Y.n, words.size());
        for (std::size_t k = 0; k < words.size(); ++k) E.col(k) = evaluate(Polynomial::monomial(ctx, words[k]), Y) * w;
        return E;
    }

    // (Y, w) ∈ Z_d(X, v): every annihilator kills (Y, w).
    bool contains(const MatrixTuple& Y, const Eigen::VectorXd& w, double tol = 1e-9) const {
        if (basis.cols() == 0) return true;
        Eigen::MatrixXd E = evaluation_map(Y, w);
        double scale = std::max(1.0, E.norm());
        return (E * basis).cwiseAbs().maxCoeff() <= tol * scale;
    }

    // Coefficient subspace containment within tolerance.
    bool subspace_of(const ZariskiAnnihilator& o, double tol = 1e-9) const {
        if (basis.cols() == 0) return true;
        Eigen::MatrixXd P = o.basis * o.basis.transpose();
        return ((basis - P * basis).cwiseAbs().maxCoeff()) <= tol;
    }

    // Basis elements with coefficients rounded to nearby rationals.
    std::vector<Polynomial> polynomials(long max_den = 1000000) const {
        std::vector<Polynomial> out;
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
            Eigen::VectorXd col = basis.col(c);
            Eigen::Index lead;
            col.cwiseAbs().maxCoeff(&lead);
            col /= col(lead);
            Polynomial q(ctx);
            for (std::size_t k = 0; k < words.size(); ++k)
                if (std::abs(col(k)) > 1e-12) q.add_term(words[k], rational_approx(col(k), max_den, 1e-9));
            out.push_back(q);
        }
        return out;
    }
};

namespace detail {

inline ZariskiAnnihilator annihilator_of(const ContextPtr& ctx, std::size_t d, const std::vector<std::pair<MatrixTuple, Eigen::VectorXd>>& pts,
                                         RankOptions o) {
    std::vector<std::size_t> vars(ctx->size());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
    ZariskiAnnihilator z{ctx, words_up_to(alphabet_of(*ctx, vars), d), {}, 0};
    std::size_t rows = 0;
    for (auto& [X, v] : pts) rows += X.n;
    Eigen::MatrixXd E(rows, z.words.size());
    std::size_t at = 0;
    for (auto& [X, v] : pts) {
        E.middleRows(at, X.n) = z.evaluation_map(X, v);
        at += X.n;
    }
    z.basis = nullspace(E, o.rel, &z.rank);
    return z;
}

}  // namespace detail

inline ZariskiAnnihilator zariski_annihilator(const ContextPtr& ctx, const MatrixTuple& X, const Eigen::VectorXd& v, std::size_t d,
                                              RankOptions o = {}) {
    return detail::annihilator_of(ctx, d, {{X, v}}, o);
}

// Polynomials of degree ≤ d vanishing at every point of the pool.
inline ZariskiAnnihilator joint_annihilator(const ContextPtr& ctx, const std::vector<VarietyPoint>& pool, std::size_t d, RankOptions o = {}) {
    std::vector<std::pair<MatrixTuple, Eigen::VectorXd>> pts;
    for (auto& p : pool) pts.push_back({p.X, p.v});
    return detail::annihilator_of(ctx, d, pts, o);
}

// Evidence that no polynomial of degree below deg p vanishes on the sampled points.
struct MinimumDegreeReport {
    std::vector<std::size_t> annihilator_dims;  // by degree 0..deg p − 1
    bool lower_degree_found = false;
};

inline MinimumDegreeReport minimum_degree_check(const Polynomial& p, const std::vector<VarietyPoint>& pool, RankOptions o = {}) {
    MinimumDegreeReport r;
    std::size_t deg = p.degree().value_or(0);
    for (std::size_t d = 0; d < deg; ++d) {
        auto z = joint_annihilator(p.context(), pool, d, o);
        r.annihilator_dims.push_back(z.dim());
        if (z.dim() > 0) r.lower_degree_found = true;
    }
    return r;
}

}  // namespace freealg
