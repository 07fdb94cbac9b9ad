#pragma once

#include <freealg/errors.hpp>
#include <freealg/rational.hpp>

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace freealg {

// Dense exact matrix, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c, Rational(0)) {}

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static RationalMatrix from_rows(const std::vector<std::vector<Rational>>& rows) {
        RationalMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < m.rows_; ++i) {
            if (rows[i].size() != m.cols_) throw ContractError("ragged matrix rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    static RationalMatrix from_double(const Eigen::MatrixXd& d) {
        RationalMatrix m(d.rows(), d.cols());
        for (std::size_t i = 0; i < m.rows_; ++i)
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rational_from_double(d(i, j));
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    RationalMatrix transpose() const {
        RationalMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    RationalMatrix& operator+=(const RationalMatrix& o) {
        same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    RationalMatrix& operator-=(const RationalMatrix& o) {
        same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    RationalMatrix& operator*=(const Rational& s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend RationalMatrix operator+(RationalMatrix a, const RationalMatrix& b) { return a += b; }
    friend RationalMatrix operator-(RationalMatrix a, const RationalMatrix& b) { return a -= b; }
    friend RationalMatrix operator*(RationalMatrix a, const Rational& s) { return a *= s; }
    friend RationalMatrix operator*(const Rational& s, RationalMatrix a) { return a *= s; }

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
        if (a.cols_ != b.rows_) throw ContractError("exact matrix shape mismatch");
        RationalMatrix m(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Rational& aik = a(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (b(k, j) != 0) m(i, j) += aik * b(k, j);
            }
        return m;
    }

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

    bool is_zero() const {
        for (auto& v : a_)
            if (v != 0) return false;
        return true;
    }

    Eigen::MatrixXd to_double() const {
        Eigen::MatrixXd d(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) d(i, j) = (*this)(i, j).get_d();
        return d;
    }

    std::string str() const {
        std::string out = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            out += i ? ", [" : "[";
            for (std::size_t j = 0; j < cols_; ++j) out += (j ? ", " : "") + (*this)(i, j).get_str();
            out += "]";
        }
        return out + "]";
    }

private:
    void same_shape(const RationalMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw ContractError("exact matrix shape mismatch");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> a_;
};

inline RationalMatrix kron(const RationalMatrix& A, const RationalMatrix& B) {
    RationalMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) {
            if (A(i, j) == 0) continue;
            for (std::size_t k = 0; k < B.rows(); ++k)
                for (std::size_t l = 0; l < B.cols(); ++l) K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
        }
    return K;
}

// Symmetric rational LDL^T without pivoting beyond skipping zero columns.
// Returns true when the matrix is positive semidefinite, decided exactly.
inline bool exact_psd(RationalMatrix M) {
    std::size_t n = M.rows();
    if (M.cols() != n) throw ContractError("exact_psd needs a square matrix");
    if (!(M == M.transpose())) return false;
    for (std::size_t k = 0; k < n; ++k) {
        const Rational piv = M(k, k);
        if (piv < 0) return false;
        if (piv == 0) {
            for (std::size_t j = k + 1; j < n; ++j)
                if (M(k, j) != 0) return false;
            continue;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (M(i, k) == 0) continue;
            Rational f = M(i, k) / piv;
            for (std::size_t j = k + 1; j < n; ++j) M(i, j) -= f * M(k, j);
        }
    }
    return true;
}

// Inertia (negative, zero, positive) of a symmetric rational matrix by congruence.
inline std::array<std::size_t, 3> exact_inertia(RationalMatrix M) {
    std::size_t n = M.rows();
    if (M.cols() != n) throw ContractError("inertia needs a square matrix");
    if (!(M == M.transpose())) throw ContractError("inertia needs a symmetric matrix");
    std::array<std::size_t, 3> out{0, 0, 0};
    std::vector<std::size_t> live(n);
    for (std::size_t i = 0; i < n; ++i) live[i] = i;
    while (!live.empty()) {
        std::size_t piv = live.size();
        for (std::size_t k = 0; k < live.size(); ++k)
            if (M(live[k], live[k]) != 0) {
                piv = k;
                break;
            }
        if (piv < live.size()) {
            std::size_t p = live[piv];
            Rational d = M(p, p);
            ++out[d < 0 ? 0 : 2];
            live.erase(live.begin() + static_cast<long>(piv));
            for (auto r : live)
                for (auto c : live) M(r, c) -= M(r, p) * M(p, c) / d;
            continue;
        }
        std::size_t a = n, b = n;
        for (std::size_t x = 0; x < live.size() && a == n; ++x)
            for (std::size_t y = x + 1; y < live.size(); ++y)
                if (M(live[x], live[y]) != 0) {
                    a = x;
                    b = y;
                    break;
                }
        if (a == n) {
            out[1] += live.size();
            break;
        }
        std::size_t i = live[a], j = live[b];
        Rational off = M(i, j);
        ++out[0];
        ++out[2];
        live.erase(live.begin() + static_cast<long>(b));
        live.erase(live.begin() + static_cast<long>(a));
        for (auto r : live)
            for (auto c : live) M(r, c) -= (M(r, i) * M(j, c) + M(r, j) * M(i, c)) / off;
    }
    return out;
}

// One solution of K x = r (free unknowns set to zero), or nullopt when inconsistent.
inline std::optional<std::vector<Rational>> solve_exact(RationalMatrix K, std::vector<Rational> r) {
    std::size_t m = K.rows(), n = K.cols();
    if (r.size() != m) throw ContractError("right-hand side length mismatch");
    std::vector<std::size_t> pivcol;
    std::size_t row = 0;
    for (std::size_t c = 0; c < n && row < m; ++c) {
        std::size_t p = row;
        while (p < m && K(p, c) == 0) ++p;
        if (p == m) continue;
        if (p != row) {
            for (std::size_t j = 0; j < n; ++j) std::swap(K(p, j), K(row, j));
            std::swap(r[p], r[row]);
        }
        Rational inv = 1 / K(row, c);
        for (std::size_t j = c; j < n; ++j) K(row, j) *= inv;
        r[row] *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || K(i, c) == 0) continue;
            Rational f = K(i, c);
            for (std::size_t j = c; j < n; ++j) K(i, j) -= f * K(row, j);
            r[i] -= f * r[row];
        }
        pivcol.push_back(c);
        ++row;
    }
    for (std::size_t i = row; i < m; ++i)
        if (r[i] != 0) return std::nullopt;
    std::vector<Rational> x(n, Rational(0));
    for (std::size_t k = 0; k < pivcol.size(); ++k) x[pivcol[k]] = r[k];
    return x;
}

}  // namespace freealg
