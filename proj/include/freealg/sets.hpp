#pragma once

#include <freealg/evaluator.hpp>
#include <freealg/pencil.hpp>

#include <limits>
#include <vector>

namespace freealg {

inline double min_eigenvalue(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

// Spectrahedron D_L, positivity set {p ≻ 0}, or an intersection of such sets.
struct NcSet {
    enum class Kind { pencil, positivity, intersection };
    Kind kind = Kind::intersection;
    ContextPtr ctx;
    AffineLinearPencil L;
    MatrixPolynomial p;
    bool component_of_zero = true;
    std::vector<NcSet> parts;

    static NcSet pencil(AffineLinearPencil L) {
        NcSet s;
        s.kind = Kind::pencil;
        s.ctx = L.ctx;
        s.L = std::move(L);
        return s;
    }

    static NcSet positivity(MatrixPolynomial p, bool component_of_zero = true) {
        if (p.rows() != p.cols() || !p.is_symmetric()) throw ContractError("positivity set needs a symmetric matrix polynomial");
        MatrixTuple zero(1, std::vector<Eigen::MatrixXd>(p.context()->size(), Eigen::MatrixXd::Zero(1, 1)));
        if (min_eigenvalue(evaluate(p, zero)) <= 0) throw ContractError("positivity set needs p(0) positive definite");
        NcSet s;
        s.kind = Kind::positivity;
        s.ctx = p.context();
        s.p = std::move(p);
        s.component_of_zero = component_of_zero;
        return s;
    }

    static NcSet positivity(const Polynomial& p, bool component_of_zero = true) {
        MatrixPolynomial m(p.context(), 1, 1);
        m(0, 0) = p;
        return positivity(std::move(m), component_of_zero);
    }

    static NcSet intersection(std::vector<NcSet> parts) {
        if (parts.empty()) throw ContractError("intersection needs at least one set");
        NcSet s;
        s.kind = Kind::intersection;
        s.ctx = parts[0].ctx;
        for (auto& q : parts) s.ctx = join_contexts(s.ctx, q.ctx);
        s.parts = std::move(parts);
        return s;
    }

    // Smallest eigenvalue of the defining matrix at X; positive means inside.
    double margin(const MatrixTuple& X) const {
        switch (kind) {
            case Kind::pencil: return min_eigenvalue(evaluate(L, X));
            case Kind::positivity: return min_eigenvalue(evaluate(p, X));
            default: {
                double m = std::numeric_limits<double>::infinity();
                for (auto& q : parts) m = std::min(m, q.margin(X));
                return m;
            }
        }
    }

    bool contains(const MatrixTuple& X, double tol = 0.0) const { return margin(X) > tol; }

    MarginFn margin_fn() const {
        return [s = *this](const MatrixTuple& X) { return s.margin(X); };
    }

    MatrixTuple sample(std::size_t n, Rng& rng, ConstrainedSampling opts = {}) const {
        return sample_constrained(n, *ctx, Distribution::gaussian_symmetric, margin_fn(), rng, opts);
    }
};

}  // namespace freealg
