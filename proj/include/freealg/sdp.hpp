#pragma once

// Dense block SDP in standard form:
//   min <C, X>  s.t.  <A_i, X> = b_i,  X = diag(X_1, ..., X_K) PSD.
// Homogeneous self-dual embedding with HKM search directions.

#include <freealg/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace freealg {

using BlockMatrix = std::vector<Eigen::MatrixXd>;

struct SdpProblem {
    std::vector<std::size_t> blocks;
    std::vector<BlockMatrix> A;
    std::vector<double> b;
    BlockMatrix C;  // empty for pure feasibility

    std::size_t m() const { return A.size(); }

    BlockMatrix zero() const {
        BlockMatrix Z;
        for (auto n : blocks) Z.push_back(Eigen::MatrixXd::Zero(n, n));
        return Z;
    }

    void add_constraint(BlockMatrix Ai, double bi) {
        A.push_back(std::move(Ai));
        b.push_back(bi);
    }

    void validate() const {
        if (A.size() != b.size()) throw ContractError("constraint count and right-hand side differ");
        auto check = [&](const BlockMatrix& M) {
            if (M.size() != blocks.size()) throw ContractError("block count mismatch");
            for (std::size_t k = 0; k < blocks.size(); ++k)
                if (static_cast<std::size_t>(M[k].rows()) != blocks[k] || static_cast<std::size_t>(M[k].cols()) != blocks[k])
                    throw ContractError("block dimension mismatch");
        };
        for (auto& Ai : A) check(Ai);
        if (!C.empty()) check(C);
    }
};

enum class SdpStatus { feasible, infeasible, indeterminate };

inline const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::feasible: return "feasible";
        case SdpStatus::infeasible: return "infeasible";
        default: return "indeterminate";
    }
}

struct SdpOptions {
    std::size_t max_iter = 200;
    double tol = 1e-9;
    double certificate_margin = 1e-6;
};

struct SdpResult {
    SdpStatus status = SdpStatus::indeterminate;
    BlockMatrix X;
    Eigen::VectorXd y;  // dual point, or the Farkas ray when infeasible
    double residual = 0.0;
    double min_eig = 0.0;
    double margin = 0.0;
    std::size_t iterations = 0;
    std::string message;
};

namespace sdp_detail {

inline double inner(const BlockMatrix& U, const BlockMatrix& V) {
    double s = 0;
    for (std::size_t k = 0; k < U.size(); ++k) s += U[k].cwiseProduct(V[k]).sum();
    return s;
}

inline double fro(const BlockMatrix& U) { return std::sqrt(inner(U, U)); }

inline BlockMatrix axpy(double a, const BlockMatrix& X, const BlockMatrix& Y) {
    BlockMatrix R = Y;
    for (std::size_t k = 0; k < R.size(); ++k) R[k] += a * X[k];
    return R;
}

inline Eigen::VectorXd apply_ops(const std::vector<BlockMatrix>& A, const BlockMatrix& X) {
    Eigen::VectorXd r(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) r(i) = inner(A[i], X);
    return r;
}

inline BlockMatrix adjoint(const std::vector<BlockMatrix>& A, const Eigen::VectorXd& y, const BlockMatrix& shape) {
    BlockMatrix R = shape;
    for (auto& M : R) M.setZero();
    for (std::size_t i = 0; i < A.size(); ++i)
        if (y(i) != 0)
            for (std::size_t k = 0; k < R.size(); ++k) R[k] += y(i) * A[i][k];
    return R;
}

inline double min_eig(const BlockMatrix& X) {
    double m = std::numeric_limits<double>::infinity();
    for (auto& B : X)
        if (B.size()) m = std::min(m, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B, Eigen::EigenvaluesOnly).eigenvalues()(0));
    return m;
}

// Largest step keeping X + a dX positive definite.
inline double max_step(const BlockMatrix& X, const BlockMatrix& dX) {
    double a = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < X.size(); ++k) {
        if (X[k].size() == 0) continue;
        Eigen::LLT<Eigen::MatrixXd> llt(X[k]);
        Eigen::MatrixXd Li = llt.matrixL().solve(Eigen::MatrixXd::Identity(X[k].rows(), X[k].cols()));
        Eigen::MatrixXd S = Li * dX[k] * Li.transpose();
        double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly).eigenvalues()(0);
        if (lmin < 0) a = std::min(a, -1.0 / lmin);
    }
    return a;
}

inline Eigen::VectorXd svec(const BlockMatrix& M) {
    std::size_t N = 0;
    for (auto& B : M) N += static_cast<std::size_t>(B.rows() * (B.rows() + 1) / 2);
    Eigen::VectorXd v(N);
    std::size_t t = 0;
    for (auto& B : M)
        for (Eigen::Index i = 0; i < B.rows(); ++i)
            for (Eigen::Index j = i; j < B.cols(); ++j) v(t++) = i == j ? B(i, j) : std::sqrt(2.0) * 0.5 * (B(i, j) + B(j, i));
    return v;
}

}  // namespace sdp_detail

inline SdpResult solve_sdp(const SdpProblem& P, const SdpOptions& o = {}) {
    using namespace sdp_detail;
    P.validate();
    SdpResult res;
    const std::size_t m0 = P.m();
    BlockMatrix C = P.C.empty() ? P.zero() : P.C;
    bool has_objective = fro(C) > 0;
    if (m0 == 0) {
        res.status = SdpStatus::feasible;
        res.X = P.zero();
        res.y = Eigen::VectorXd(0);
        res.message = "no constraints";
        return res;
    }

    // Drop dependent constraints; an inconsistent one yields a ray with A^T y = 0.
    Eigen::MatrixXd Avec(m0, svec(P.A[0]).size());
    for (std::size_t i = 0; i < m0; ++i) Avec.row(i) = svec(P.A[i]).transpose();
    Eigen::VectorXd b0 = Eigen::Map<const Eigen::VectorXd>(P.b.data(), m0);
    double bscale = std::max(1.0, b0.norm());
    double Ascale = std::max(1.0, Avec.norm());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Avec.transpose());
    qr.setThreshold(1e-12);
    std::size_t r = qr.rank();
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < r; ++k) keep.push_back(qr.colsPermutation().indices()(k));
    if (r < m0) {
        Eigen::MatrixXd Ak(Avec.cols(), r);
        Eigen::VectorXd bk(r);
        for (std::size_t k = 0; k < r; ++k) {
            Ak.col(k) = Avec.row(keep[k]).transpose();
            bk(k) = b0(keep[k]);
        }
        auto ls = Ak.colPivHouseholderQr();
        for (std::size_t k = r; k < m0; ++k) {
            std::size_t i = qr.colsPermutation().indices()(k);
            Eigen::VectorXd c = ls.solve(Avec.row(i).transpose());
            double gap = b0(i) - bk.dot(c);
            if (std::abs(gap) > 1e-9 * bscale) {
                Eigen::VectorXd y = Eigen::VectorXd::Zero(m0);
                y(i) = 1;
                for (std::size_t t = 0; t < r; ++t) y(keep[t]) -= c(t);
                if (gap < 0) y = -y;
                res.y = y;
                res.margin = std::abs(gap) / (y.norm() * bscale);
                res.status = res.margin >= o.certificate_margin ? SdpStatus::infeasible : SdpStatus::indeterminate;
                res.message = "inconsistent linear constraints";
                return res;
            }
        }
    }
    std::vector<BlockMatrix> A;
    Eigen::VectorXd b(r);
    for (std::size_t k = 0; k < r; ++k) {
        A.push_back(P.A[keep[k]]);
        b(k) = b0(keep[k]);
    }
    auto lift = [&](const Eigen::VectorXd& yr) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(m0);
        for (std::size_t k = 0; k < r; ++k) y(keep[k]) = yr(k);
        return y;
    };

    const std::size_t m = r;
    double Cscale = std::max(1.0, fro(C));
    double nu = 1.0;
    for (auto n : P.blocks) nu += static_cast<double>(n);
    BlockMatrix X = P.zero(), Z = P.zero();
    for (std::size_t k = 0; k < X.size(); ++k) {
        X[k].setIdentity();
        Z[k].setIdentity();
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    double tau = 1, kappa = 1;

    for (std::size_t it = 0; it <= o.max_iter; ++it) {
        res.iterations = it;
        Eigen::VectorXd AX = apply_ops(A, X);
        Eigen::VectorXd Rp = b * tau - AX;
        BlockMatrix ATy = adjoint(A, y, X);
        BlockMatrix Rd = C;
        for (std::size_t k = 0; k < Rd.size(); ++k) Rd[k] = C[k] * tau - ATy[k] - Z[k];
        double cx = inner(C, X), by = b.dot(y);
        double Rg = kappa + cx - by;
        double mu = (inner(X, Z) + tau * kappa) / nu;

        double pres = Rp.norm() / tau / bscale;
        double dres = fro(Rd) / tau / Cscale;
        double gap = std::abs(cx - by) / tau / (1.0 + std::abs(cx / tau) + std::abs(by / tau));
        bool primal_ok = pres <= o.tol;
        if (primal_ok && (!has_objective || (dres <= o.tol && gap <= o.tol))) {
            res.status = SdpStatus::feasible;
            res.X = X;
            for (auto& B : res.X) B /= tau;
            res.y = lift(y / tau);
            res.residual = pres * bscale;
            res.min_eig = min_eig(res.X);
            res.message = "converged";
            return res;
        }
        if (by > 0) {
            // Farkas ray: b^T y > 0 with -A^T y PSD.
            Eigen::VectorXd ray = y / by;
            BlockMatrix S = adjoint(A, ray, X);
            for (auto& B : S) B = -B;
            double lam = min_eig(S);
            double viol = std::max(0.0, -lam);
            if (viol <= 1e-9 * Ascale * ray.norm() || (tau / kappa < 1e-10 && viol <= 1e-7)) {
                Eigen::VectorXd full = lift(ray);
                double margin = 1.0 / (full.norm() * bscale);
                if (margin >= o.certificate_margin && viol <= 1e-9 * std::max(1.0, full.norm()) * Ascale) {
                    res.status = SdpStatus::infeasible;
                    res.y = full;
                    res.margin = margin;
                    res.min_eig = lam;
                    res.message = "dual improving ray";
                    return res;
                }
            }
        }
        if (it == o.max_iter) break;

        // Schur complement and right-hand sides.
        BlockMatrix Zi = Z;
        for (std::size_t k = 0; k < Z.size(); ++k)
            Zi[k] = Z[k].llt().solve(Eigen::MatrixXd::Identity(Z[k].rows(), Z[k].cols()));
        std::vector<BlockMatrix> W(m, X);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < X.size(); ++k) W[i][k] = X[k] * A[i][k] * Zi[k];
        Eigen::MatrixXd M(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                double s = 0;
                for (std::size_t k = 0; k < X.size(); ++k) s += A[j][k].cwiseProduct(W[i][k].transpose()).sum();
                M(i, j) = M(j, i) = s;
            }
        Eigen::VectorXd g(m);
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0;
            for (std::size_t k = 0; k < X.size(); ++k) s += C[k].cwiseProduct(W[i][k].transpose()).sum();
            g(i) = s;
        }
        BlockMatrix XCZ = X;
        for (std::size_t k = 0; k < X.size(); ++k) XCZ[k] = X[k] * C[k] * Zi[k];
        double cc = 0;
        for (std::size_t k = 0; k < X.size(); ++k) cc += C[k].cwiseProduct(XCZ[k].transpose()).sum();
        Eigen::LDLT<Eigen::MatrixXd> Mf(M);
        Eigen::VectorXd v2 = Mf.solve(g + b);

        struct Dir {
            BlockMatrix dX, dZ;
            Eigen::VectorXd dy;
            double dtau, dkappa;
        };
        auto direction = [&](double sigma) {
            double eta = 1.0 - sigma;
            BlockMatrix T = X, XRZ = X;
            for (std::size_t k = 0; k < X.size(); ++k) {
                T[k] = sigma * mu * Zi[k] - X[k];
                XRZ[k] = X[k] * Rd[k] * Zi[k];
            }
            Eigen::VectorXd r1 = eta * Rp - apply_ops(A, T);
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0;
                for (std::size_t k = 0; k < X.size(); ++k) s += A[i][k].cwiseProduct(XRZ[k].transpose()).sum();
                r1(i) += eta * s;
            }
            double c0 = inner(C, T);
            for (std::size_t k = 0; k < X.size(); ++k) c0 -= eta * C[k].cwiseProduct(XRZ[k].transpose()).sum();
            double r2 = eta * Rg + c0 + (sigma * mu - tau * kappa) / tau;
            Eigen::VectorXd v1 = Mf.solve(r1);
            Eigen::VectorXd bg = b - g;
            Dir d;
            d.dtau = (r2 - bg.dot(v1)) / (bg.dot(v2) + cc + kappa / tau);
            d.dy = v1 + d.dtau * v2;
            BlockMatrix ATdy = adjoint(A, d.dy, X);
            d.dZ = X;
            d.dX = X;
            for (std::size_t k = 0; k < X.size(); ++k) {
                d.dZ[k] = C[k] * d.dtau - ATdy[k] + eta * Rd[k];
                Eigen::MatrixXd S = X[k] * d.dZ[k] * Zi[k];
                d.dX[k] = sigma * mu * Zi[k] - X[k] - 0.5 * (S + S.transpose());
            }
            d.dkappa = (sigma * mu - tau * kappa - kappa * d.dtau) / tau;
            return d;
        };
        auto step = [&](const Dir& d) {
            double a = std::min(max_step(X, d.dX), max_step(Z, d.dZ));
            if (d.dtau < 0) a = std::min(a, -tau / d.dtau);
            if (d.dkappa < 0) a = std::min(a, -kappa / d.dkappa);
            return a;
        };
        Dir aff = direction(0.0);
        double a_aff = std::min(1.0, step(aff));
        double sigma = std::clamp(std::pow(1.0 - a_aff, 3.0), 1e-4, 0.9);
        Dir d = direction(sigma);
        double a = std::min(1.0, 0.95 * step(d));
        if (!(a > 0) || !std::isfinite(a)) break;
        X = axpy(a, d.dX, X);
        Z = axpy(a, d.dZ, Z);
        for (auto& B : X) B = 0.5 * (B + B.transpose()).eval();
        for (auto& B : Z) B = 0.5 * (B + B.transpose()).eval();
        y += a * d.dy;
        tau += a * d.dtau;
        kappa += a * d.dkappa;
        if (!(tau > 0) || !(kappa > 0)) break;
    }
    res.status = SdpStatus::indeterminate;
    res.X = X;
    for (auto& B : res.X) B /= tau;
    res.y = lift(y / tau);
    res.residual = (b - apply_ops(A, res.X)).norm();
    res.min_eig = min_eig(res.X);
    res.message = "iteration limit or stalled step";
    return res;
}

// SDPA sparse format. Our problem is SDPA's dual: F_i = A_i, c_i = b_i, F_0 = -C.
inline void write_sdpa(std::ostream& os, const SdpProblem& P, const std::string& comment = "") {
    P.validate();
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "\"" << comment << "\n";
    os << P.m() << " = mDIM\n";
    os << P.blocks.size() << " = nBLOCK\n";
    for (std::size_t k = 0; k < P.blocks.size(); ++k) os << (k ? " " : "") << P.blocks[k];
    os << " = bLOCKsTRUCT\n";
    for (std::size_t i = 0; i < P.m(); ++i) os << (i ? " " : "") << num(P.b[i]);
    os << "\n";
    auto emit = [&](std::size_t mat, const BlockMatrix& F, double sign) {
        for (std::size_t k = 0; k < F.size(); ++k)
            for (Eigen::Index i = 0; i < F[k].rows(); ++i)
                for (Eigen::Index j = i; j < F[k].cols(); ++j)
                    if (F[k](i, j) != 0)
                        os << mat << " " << k + 1 << " " << i + 1 << " " << j + 1 << " " << num(sign * F[k](i, j)) << "\n";
    };
    if (!P.C.empty()) emit(0, P.C, -1.0);
    for (std::size_t i = 0; i < P.m(); ++i) emit(i + 1, P.A[i], 1.0);
}

}  // namespace freealg
