#pragma once

// Named polynomials, expressions and pencils.

#include <freealg/expressions.hpp>
#include <freealg/pencil.hpp>

#include <algorithm>
#include <numeric>

namespace freealg::fixtures {

inline Expr commutator(const Expr& a, const Expr& b) {
    return expr::sum({expr::product({a, b}), expr::negate(expr::product({b, a}))});
}

// W(r) = c(x, c(x,r)^2) · c(x, c(x,r)^{-1})^{-1}
inline Expr bergman_W(const Expr& x, const Expr& r) {
    Expr cxr = commutator(x, r);
    return expr::product({commutator(x, expr::product({cxr, cxr})), expr::inverse(commutator(x, expr::inverse(cxr)))});
}

// Bergman's function in free variables x, y (context positions 0 and 1).
inline Expression bergman(const ContextPtr& ctx) {
    Expr x = expr::variable(*ctx, 0), y = expr::variable(*ctx, 1);
    Expr c1 = commutator(x, y);
    Expr c2 = commutator(x, c1);
    Expr c3 = commutator(x, c2);
    return Expression(ctx, expr::product({bergman_W(x, y), bergman_W(x, c1), bergman_W(x, expr::inverse(c2)),
                                          bergman_W(x, expr::inverse(c3))}));
}

// Standard polynomial s_k: Σ sign(τ) x_τ(1) ⋯ x_τ(k).
inline Polynomial standard_polynomial(const ContextPtr& ctx, std::size_t k) {
    std::vector<std::uint32_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    Polynomial p(ctx);
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (perm[i] > perm[j]) ++inversions;
        Word w;
        for (auto v : perm) w.push_back({v, false});
        p.add_term(w, inversions % 2 ? -1 : 1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return p;
}

// h1 = c(x1,x2)^2 and h2 = h1 x3 − x3 h1.
inline Polynomial h1(const ContextPtr& ctx) {
    auto c = parse_polynomial("x1*x2 - x2*x1", ctx);
    return c * c;
}

inline Polynomial h2(const ContextPtr& ctx) {
    auto x3 = Polynomial::variable(ctx, "x3");
    auto a = h1(ctx);
    return a * x3 - x3 * a;
}

inline const char* sos_demo_text() {
    return "5 + x^2 - 2*x^3 + x^4 + 2*x*y + x*y*x*y - x*y^2 + x*y^2*x - 2*y + 2*y*x + y*x^2*y"
           " - 2*y*x*y + y*x*y*x - 3*y^2 - y^2*x + y^4";
}

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd M(rows.size(), rows.begin()->size());
    Eigen::Index i = 0;
    for (auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) M(i, j++) = v;
        ++i;
    }
    return M;
}

// Δ = [[1,x1,x2],[x1,1,0],[x2,0,1]]
inline AffineLinearPencil delta_pencil(const ContextPtr& ctx) {
    return AffineLinearPencil(ctx, Eigen::MatrixXd::Identity(3, 3),
                              {mat({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}), mat({{0, 0, 1}, {0, 0, 0}, {1, 0, 0}})});
}

// Γ = [[1+x1, x2],[x2, 1−x1]]
inline AffineLinearPencil gamma_pencil(const ContextPtr& ctx) {
    return AffineLinearPencil(ctx, Eigen::MatrixXd::Identity(2, 2), {mat({{1, 0}, {0, -1}}), mat({{0, 1}, {1, 0}})});
}

// Projection pencil L0 ⊕ L1 ⊕ L2 in (x1, x2, y1, y2) with γ^4 = 1 + 2α².
inline AffineLinearPencil tv_projection_pencil(const ContextPtr& ctx, double alpha = 1.0) {
    double gamma = std::pow(1.0 + 2.0 * alpha * alpha, 0.25);
    Eigen::MatrixXd A0 = Eigen::MatrixXd::Zero(7, 7);
    std::vector<Eigen::MatrixXd> A(4, Eigen::MatrixXd::Zero(7, 7));
    A0.topLeftCorner(3, 3) = Eigen::MatrixXd::Identity(3, 3);
    // y1, y2 in L0
    A[2](0, 2) = A[2](2, 0) = 1;
    A[3](1, 2) = A[3](2, 1) = 1;
    A[2](2, 2) = -2 * alpha;
    A[3](2, 2) = -2 * alpha;
    for (int j = 0; j < 2; ++j) {
        int o = 3 + 2 * j;
        A0(o, o) = 1;
        A0(o + 1, o + 1) = alpha;
        A[j](o, o + 1) = A[j](o + 1, o) = gamma;
        A[2 + j](o + 1, o + 1) = 1;
    }
    return AffineLinearPencil(ctx, A0, A);
}

}  // namespace freealg::fixtures
