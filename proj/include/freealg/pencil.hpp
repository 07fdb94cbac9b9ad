#pragma once

#include <freealg/polynomial.hpp>

#include <Eigen/Dense>

#include <vector>

namespace freealg {

// L(x) = A0 + sum_j A_j x_j with symmetric real coefficients.
struct AffineLinearPencil {
    ContextPtr ctx;
    Eigen::MatrixXd A0;
    std::vector<Eigen::MatrixXd> A;

    AffineLinearPencil() = default;
    AffineLinearPencil(ContextPtr c, Eigen::MatrixXd a0, std::vector<Eigen::MatrixXd> coeffs)
        : ctx(std::move(c)), A0(std::move(a0)), A(std::move(coeffs)) {
        validate();
    }

    std::size_t dim() const { return static_cast<std::size_t>(A0.rows()); }
    std::size_t nvars() const { return A.size(); }

    bool is_monic() const { return A0.isIdentity(0.0); }

    void validate() const {
        if (!ctx) throw ContractError("pencil needs a variable context");
        if (A.size() != ctx->size()) throw ContractError("pencil needs one coefficient per variable");
        auto check = [&](const Eigen::MatrixXd& M) {
            if (M.rows() != A0.rows() || M.cols() != A0.rows()) throw ContractError("pencil coefficients must be square and equal-sized");
            double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
            if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
                throw ContractError("pencil coefficients must be symmetric");
        };
        if (A0.rows() != A0.cols() || A0.rows() == 0) throw ContractError("pencil constant must be square");
        check(A0);
        for (auto& M : A) check(M);
        for (std::size_t j = 0; j < ctx->size(); ++j)
            if (!ctx->is_symmetric(j)) throw ContractError("pencil variables must be symmetric");
    }

    // Exact matrix polynomial (coefficients taken as exact binary values).
    MatrixPolynomial to_matrix_polynomial() const {
        MatrixPolynomial m(ctx, dim(), dim());
        for (std::size_t r = 0; r < dim(); ++r)
            for (std::size_t c = 0; c < dim(); ++c) {
                Polynomial e(ctx, rational_from_double(A0(r, c)));
                for (std::size_t j = 0; j < A.size(); ++j)
                    e += Polynomial::variable(ctx, j) * rational_from_double(A[j](r, c));
                m(r, c) = e;
            }
        return m;
    }

    // Level-1 value at a commutative point.
    Eigen::MatrixXd at(const std::vector<double>& t) const {
        Eigen::MatrixXd M = A0;
        for (std::size_t j = 0; j < A.size(); ++j) M += t.at(j) * A[j];
        return M;
    }
};

}  // namespace freealg
