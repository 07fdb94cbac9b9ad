#pragma once

#include <freealg/sets.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace freealg {

struct NormalizationError : ContractError {
    using ContractError::ContractError;
};

struct EigenPair {
    double value = 0;
    Eigen::VectorXd vector;
};

inline EigenPair min_eigenpair(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

inline void check_tuple_shape(const MatrixTuple& X, std::size_t g) {
    if (X.g() != g) throw ContractError("tuple has " + std::to_string(X.g()) + " matrices, expected " + std::to_string(g));
    for (auto& M : X.mats)
        if (static_cast<std::size_t>(M.rows()) != X.n || static_cast<std::size_t>(M.cols()) != X.n)
            throw ContractError("tuple matrices must all be " + std::to_string(X.n) + "x" + std::to_string(X.n));
}

struct PencilMembership {
    bool inside = false;
    double margin = 0;
    Eigen::VectorXd eigenvector;  // for the smallest eigenvalue
};

inline PencilMembership pencil_membership(const AffineLinearPencil& L, const MatrixTuple& X, double tol = 0.0) {
    check_tuple_shape(X, L.nvars());
    auto e = min_eigenpair(evaluate(L, X));
    return {e.value > tol, e.value, e.vector};
}

// A0^{-1/2} L A0^{-1/2}; monic input is returned unchanged.
inline AffineLinearPencil monic_normalize(const AffineLinearPencil& L) {
    if (L.is_monic()) return L;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L.A0);
    double top = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues()(0) <= 1e-12 * std::max(1.0, top)) throw NormalizationError("L(0) is not positive definite");
    Eigen::MatrixXd S = es.operatorInverseSqrt();
    std::vector<Eigen::MatrixXd> A;
    for (auto& M : L.A) {
        Eigen::MatrixXd N = S * M * S;
        A.push_back(0.5 * (N + N.transpose()));
    }
    return AffineLinearPencil(L.ctx, Eigen::MatrixXd::Identity(L.dim(), L.dim()), std::move(A));
}

namespace detail {

struct AffineMax {
    std::vector<double> z;
    double value = 0;  // min-eig of M0 + Σ z_k B_k
    std::size_t newton_steps = 0;
};

// Maximizes the concave min-eig of M0 + Σ z_k B_k by a log-det barrier on (z, t) with M(z) − tI ≻ 0, shrinking the
// barrier weight until the min-eig exceeds target or the weight underflows.
inline AffineMax maximize_min_eig(const Eigen::MatrixXd& M0, const std::vector<Eigen::MatrixXd>& B, double target,
                                  double mu_floor = 1e-14) {
    std::size_t m = B.size(), dim = static_cast<std::size_t>(M0.rows());
    auto M = [&](const Eigen::VectorXd& z) {
        Eigen::MatrixXd R = M0;
        for (std::size_t k = 0; k < m; ++k) R += z(k) * B[k];
        return R;
    };
    double scale = std::max(1.0, M0.cwiseAbs().maxCoeff());
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    double t = min_eigenvalue(M0) - scale;
    AffineMax out;
    auto finish = [&] {
        out.z.assign(z.data(), z.data() + m);
        out.value = min_eigenvalue(M(z));
        return out;
    };
    auto psi = [&](const Eigen::VectorXd& zz, double tt, double mu, bool& ok) {
        Eigen::LLT<Eigen::MatrixXd> llt(M(zz) - tt * Eigen::MatrixXd::Identity(dim, dim));
        ok = llt.info() == Eigen::Success;
        if (!ok) return 0.0;
        double logdet = 2 * llt.matrixLLT().diagonal().array().log().sum();
        return tt + mu * logdet;
    };
    for (double mu = scale; mu >= mu_floor * scale; mu *= 0.2) {
        for (int it = 0; it < 100; ++it) {
            if (min_eigenvalue(M(z)) > target) return finish();
            Eigen::MatrixXd G = (M(z) - t * Eigen::MatrixXd::Identity(dim, dim)).inverse();
            std::vector<Eigen::MatrixXd> GB(m + 1);
            for (std::size_t k = 0; k < m; ++k) GB[k] = G * B[k];
            GB[m] = -G;
            Eigen::VectorXd g(m + 1);
            Eigen::MatrixXd H(m + 1, m + 1);
            for (std::size_t a = 0; a <= m; ++a) {
                g(a) = mu * GB[a].trace() + (a == m ? 1.0 : 0.0);
                for (std::size_t b = a; b <= m; ++b) H(a, b) = H(b, a) = mu * (GB[a] * GB[b]).trace();
            }
            H.diagonal().array() += 1e-14 * (1 + H.diagonal().cwiseAbs().maxCoeff());
            Eigen::VectorXd d = H.ldlt().solve(g);
            double decrement = g.dot(d);
            if (!(decrement > 1e-12 * mu)) break;
            bool ok = false;
            double base = psi(z, t, mu, ok), step = 1;
            for (; step > 1e-12; step /= 2) {
                double v = psi(z + step * d.head(m), t + step * d(m), mu, ok);
                if (ok && v >= base) break;
            }
            if (step <= 1e-12) break;
            z += step * d.head(m);
            t += step * d(m);
            ++out.newton_steps;
            if (t > 1e12 * scale) return finish();
        }
    }
    return finish();
}

inline Eigen::MatrixXd pencil_direction(const AffineLinearPencil& L, const std::vector<double>& d) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(L.dim(), L.dim());
    for (std::size_t j = 0; j < d.size(); ++j) M += d[j] * L.A[j];
    return M;
}

}  // namespace detail

struct LevelOneOptions {
    std::size_t rays = 64;
    std::uint64_t seed = 1;
    double tol = 1e-12;
};

struct LevelOneAnalysis {
    bool empty = true;
    bool bounded = true;
    std::vector<double> interior;  // a point with L(t) ≻ 0 when nonempty
    double interior_margin = 0;    // best min-eig found (negative when empty)
    std::optional<std::vector<double>> escaping_ray;
    std::size_t rays_tested = 0;
    double max_exit = 0;  // largest exit distance over the bounded rays
};

// Level-one verdicts: emptiness by maximizing the concave min-eig of L(t), boundedness by shooting rays from an
// interior point. A ray d escapes iff Σ d_j A_j ⪰ 0; otherwise its exit distance is bracketed by doubling and bisection.
inline LevelOneAnalysis pencil_level_one_analysis(const AffineLinearPencil& L, LevelOneOptions o = {}) {
    std::size_t g = L.nvars();
    LevelOneAnalysis out;
    auto best = detail::maximize_min_eig(L.A0, L.A, 1e-3);
    out.interior = best.z;
    out.interior_margin = best.value;
    out.empty = !(best.value > 0);
    if (out.empty || g == 0) return out;

    Rng rng(o.seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<std::vector<double>> rays;
    for (std::size_t j = 0; j < g; ++j)
        for (double s : {1.0, -1.0}) {
            std::vector<double> d(g, 0.0);
            d[j] = s;
            rays.push_back(d);
        }
    for (std::size_t k = 0; k < o.rays; ++k) {
        std::vector<double> d(g);
        double norm = 0;
        for (auto& v : d) norm += (v = N(rng)) * v;
        for (auto& v : d) v /= std::sqrt(norm);
        rays.push_back(d);
    }
    double scale = std::max(1.0, L.A0.cwiseAbs().maxCoeff());
    for (auto& d : rays) {
        ++out.rays_tested;
        Eigen::MatrixXd Ad = detail::pencil_direction(L, d);
        if (min_eigenvalue(Ad) >= -o.tol * std::max(scale, Ad.cwiseAbs().maxCoeff())) {
            out.bounded = false;
            out.escaping_ray = d;
            break;
        }
        auto at = [&](double s) {
            auto t = out.interior;
            for (std::size_t j = 0; j < g; ++j) t[j] += s * d[j];
            return min_eigenvalue(L.at(t));
        };
        double lo = 0, hi = 1;
        while (at(hi) > 0) lo = hi, hi *= 2;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (at(mid) > 0 ? lo : hi) = mid;
        }
        out.max_exit = std::max(out.max_exit, hi);
    }
    return out;
}

// Homogeneous expansion of p along the ray tD: p(tD) = Σ t^k P_k.
struct RayExpansion {
    std::vector<Eigen::MatrixXd> P;

    Eigen::MatrixXd at(double t) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(P[0].rows(), P[0].cols());
        for (std::size_t k = P.size(); k-- > 0;) M = M * t + P[k];
        return M;
    }
    double margin(double t) const { return min_eigenvalue(at(t)); }
};

inline RayExpansion ray_expansion(const MatrixPolynomial& p, const MatrixTuple& D) {
    std::size_t deg = 0;
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j)
            if (auto d = p(i, j).degree()) deg = std::max(deg, *d);
    RayExpansion r;
    for (std::size_t k = 0; k <= deg; ++k) {
        MatrixPolynomial part(p.context(), p.rows(), p.cols());
        for (std::size_t i = 0; i < p.rows(); ++i)
            for (std::size_t j = 0; j < p.cols(); ++j) part(i, j) = p(i, j).homogeneous_part(k);
        r.P.push_back(evaluate(part, D));
    }
    return r;
}

inline MatrixPolynomial as_matrix(const Polynomial& p) {
    MatrixPolynomial m(p.context(), 1, 1);
    m(0, 0) = p;
    return m;
}

enum class ComponentStatus { in_component, outside_set, disconnected_evidence };

inline std::string to_string(ComponentStatus s) {
    switch (s) {
        case ComponentStatus::in_component: return "in-component";
        case ComponentStatus::outside_set: return "outside-set";
        default: return "disconnected-evidence";
    }
}

struct ComponentOptions {
    double tol = 0.0;
    double min_step = 1e-6;
    double max_step = 1.0 / 32;
};

struct ComponentResult {
    ComponentStatus status = ComponentStatus::in_component;
    double margin = 0;           // min-eig of p(X)
    double path_min = 0;         // smallest accepted min-eig along the segment
    double bracket_lo = 0, bracket_hi = 0;  // crossing bracket in t for disconnected evidence
    std::size_t steps = 0;
};

// March t from 0 to 1 along tX; a step is accepted only when min-eig(p(tX)) > tol, and halved on failure down to min_step.
inline ComponentResult dp_component_membership(const MatrixPolynomial& p, const MatrixTuple& X, ComponentOptions o = {}) {
    check_tuple_shape(X, p.context()->size());
    auto ray = ray_expansion(p, X);
    ComponentResult r;
    double m0 = ray.margin(0);
    if (!(m0 > o.tol)) throw ContractError("component membership needs p(0) positive definite");
    r.margin = ray.margin(1);
    r.path_min = m0;
    bool zero = true;
    for (auto& M : X.mats) zero = zero && M.isZero(0.0);
    if (zero) return r;
    if (!(r.margin > o.tol)) {
        r.status = ComponentStatus::outside_set;
        return r;
    }
    double t = 0, h = o.max_step;
    while (t < 1) {
        double next = std::min(1.0, t + h);
        double m = ray.margin(next);
        if (m > o.tol) {
            t = next;
            r.path_min = std::min(r.path_min, m);
            ++r.steps;
            h = std::min(o.max_step, 2 * h);
        } else if (h > o.min_step) {
            h /= 2;
        } else {
            r.status = ComponentStatus::disconnected_evidence;
            r.bracket_lo = t;
            r.bracket_hi = next;
            return r;
        }
    }
    return r;
}

inline ComponentResult dp_component_membership(const Polynomial& p, const MatrixTuple& X, ComponentOptions o = {}) {
    return dp_component_membership(as_matrix(p), X, o);
}

// I − x1^4 − x2^4
inline Polynomial tv_polynomial(const ContextPtr& ctx) { return parse_polynomial("1 - x1^4 - x2^4", ctx); }

inline Polynomial ball_polynomial(const ContextPtr& ctx) { return parse_polynomial("1 - x1^2 - x2^2", ctx); }

struct NonconvexityOptions {
    std::size_t n = 2;
    std::size_t budget = 100000;  // candidate pairs scored
    std::uint64_t seed = 1;
    double endpoint_margin = 1e-6;
    double midpoint_violation = 1e-6;
    double shrink = 1e-4;  // endpoints sit at (1 − shrink) times the boundary distance
    std::size_t refine = 200;  // local perturbation steps per restart
    double step = 0.3;
};

struct NonconvexityWitness {
    MatrixTuple X, Y, M;
    double x_margin = 0, y_margin = 0;
    EigenPair midpoint;
};

struct NonconvexitySearch {
    std::optional<NonconvexityWitness> witness;
    std::size_t candidates = 0;
    double best_midpoint = std::numeric_limits<double>::infinity();
    NonconvexityOptions options;
    bool found() const { return witness.has_value(); }
};

namespace detail {

// Largest t ≤ 2^20 with p(sD) ≻ 0 on [0, t] as seen on a doubling grid, refined by bisection.
inline double boundary_distance(const RayExpansion& ray) {
    double lo = 0, hi = 1;
    while (ray.margin(hi) > 0) {
        lo = hi;
        hi *= 2;
        if (hi > 1048576) return lo;
    }
    for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo + hi);
        (ray.margin(mid) > 0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

// Randomized search for X, Y in {p ≻ 0} whose midpoint leaves the set. Directions are scaled to just inside the
// boundary; each restart is followed by a greedy perturbation walk that lowers the midpoint min-eig.
inline NonconvexitySearch nonconvexity_search(const Polynomial& p, NonconvexityOptions o = {}) {
    if (o.n == 0) throw ContractError("nonconvexity search needs n >= 1");
    auto ctx = p.context();
    auto P = as_matrix(p);
    NonconvexitySearch out;
    out.options = o;
    Rng rng(o.seed);
    auto direction = [&] { return sample_tuple(o.n, *ctx, Distribution::gaussian_symmetric, rng); };
    auto scaled = [&](const MatrixTuple& D) {
        MatrixTuple X = D;
        double t = detail::boundary_distance(ray_expansion(P, D)) * (1 - o.shrink);
        for (auto& M : X.mats) M *= t;
        return X;
    };
    struct Cand {
        MatrixTuple D, E, X, Y, M;
        double xm, ym;
        EigenPair mid;
    };
    auto score = [&](MatrixTuple D, MatrixTuple E) {
        Cand c{std::move(D), std::move(E), {}, {}, {}, 0, 0, {}};
        c.X = scaled(c.D);
        c.Y = scaled(c.E);
        c.M = c.X;
        for (std::size_t j = 0; j < c.M.g(); ++j) c.M.mats[j] = 0.5 * (c.X.mats[j] + c.Y.mats[j]);
        c.xm = min_eigenvalue(evaluate(P, c.X));
        c.ym = min_eigenvalue(evaluate(P, c.Y));
        c.mid = min_eigenpair(evaluate(P, c.M));
        if (!(std::min(c.xm, c.ym) >= o.endpoint_margin)) c.mid.value = std::numeric_limits<double>::infinity();
        ++out.candidates;
        out.best_midpoint = std::min(out.best_midpoint, c.mid.value);
        return c;
    };
    auto hit = [&](const Cand& c) {
        if (c.mid.value <= -o.midpoint_violation) {
            out.witness = NonconvexityWitness{c.X, c.Y, c.M, c.xm, c.ym, c.mid};
            return true;
        }
        return false;
    };
    while (out.candidates < o.budget) {
        Cand c = score(direction(), direction());
        if (hit(c)) return out;
        for (std::size_t k = 0; k < o.refine && out.candidates < o.budget; ++k) {
            auto D = direction(), E = direction();
            for (std::size_t j = 0; j < D.g(); ++j) {
                D.mats[j] = c.D.mats[j] + o.step * D.mats[j];
                E.mats[j] = c.E.mats[j] + o.step * E.mats[j];
            }
            Cand next = score(std::move(D), std::move(E));
            if (next.mid.value < c.mid.value) c = std::move(next);
            if (hit(c)) return out;
        }
    }
    return out;
}

inline NonconvexitySearch tv_nonconvexity_search(std::size_t n, std::size_t budget, std::uint64_t seed) {
    NonconvexityOptions o;
    o.n = n;
    o.budget = budget;
    o.seed = seed;
    return nonconvexity_search(tv_polynomial(Context::symmetric({"x1", "x2"})), o);
}

struct ProjectionOptions {
    double margin = 0.0;
};

struct ProjectionResult {
    bool found = false;
    MatrixTuple Y;
    double margin = 0;  // best min-eig of L(X, Y)
    std::size_t newton_steps = 0;
};

// Looks for symmetric Y with L(X, Y) ≻ 0, where the first X.g() variables of L are fixed to X. The min-eig is
// concave in Y, so its maximum decides existence.
inline ProjectionResult projection_lift(const AffineLinearPencil& L, const MatrixTuple& X, ProjectionOptions o = {}) {
    if (X.g() > L.nvars()) throw ContractError("tuple has more matrices than the pencil has variables");
    std::size_t free = L.nvars() - X.g(), n = X.n;
    std::size_t per = n * (n + 1) / 2;
    auto tuple = [&](const std::vector<double>& c) {
        MatrixTuple Z = X;
        for (std::size_t k = 0; k < free; ++k) {
            Eigen::MatrixXd Yk = Eigen::MatrixXd::Zero(n, n);
            std::size_t idx = k * per;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) Yk(i, j) = Yk(j, i) = c[idx++];
            Z.mats.push_back(Yk);
        }
        return Z;
    };
    std::vector<double> zero(free * per, 0.0);
    Eigen::MatrixXd M0 = evaluate(L, tuple(zero));
    std::vector<Eigen::MatrixXd> B;
    for (std::size_t k = 0; k < zero.size(); ++k) {
        auto e = zero;
        e[k] = 1;
        B.push_back(evaluate(L, tuple(e)) - M0);
    }
    auto best = detail::maximize_min_eig(M0, B, o.margin);
    ProjectionResult r;
    r.found = best.value > o.margin;
    r.margin = best.value;
    r.newton_steps = best.newton_steps;
    auto Z = tuple(best.z);
    r.Y = MatrixTuple(n, {Z.mats.begin() + static_cast<std::ptrdiff_t>(X.g()), Z.mats.end()});
    return r;
}

struct PencilSeparation {
    std::optional<MatrixTuple> X;  // inside D_A(n) but outside D_B(n)
    std::size_t candidates = 0;
};

// Sampled search for a point of D_A(n) \ D_B(n), again scaling random directions to just inside the boundary of D_A.
inline PencilSeparation pencil_separation(const AffineLinearPencil& A, const AffineLinearPencil& B, std::size_t n,
                                          std::size_t budget, std::uint64_t seed, double tol = 1e-9) {
    Rng rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto P = A.to_matrix_polynomial();
    PencilSeparation out;
    while (out.candidates < budget) {
        ++out.candidates;
        auto D = sample_tuple(n, *A.ctx, Distribution::gaussian_symmetric, rng);
        double t = detail::boundary_distance(ray_expansion(P, D)) * std::sqrt(U(rng));
        for (auto& M : D.mats) M *= t;
        if (pencil_membership(A, D, tol).inside && !pencil_membership(B, D, 0.0).inside) {
            out.X = D;
            return out;
        }
    }
    return out;
}

}  // namespace freealg
