#include "support.hpp"

#include <gtest/gtest.h>

using namespace freealg;

namespace {

MatrixTuple scalar_point(const ContextPtr& ctx, std::initializer_list<double> v) {
    MatrixTuple X(1, {});
    for (double t : v) X.mats.push_back(Eigen::MatrixXd::Constant(1, 1, t));
    while (X.g() < ctx->size()) X.mats.push_back(Eigen::MatrixXd::Zero(1, 1));
    return X;
}

Eigen::MatrixXd diag2(double a, double b) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
    D(0, 0) = a;
    D(1, 1) = b;
    return D;
}

}  // namespace

TEST(Ldl, ScalarPivotExample) {
    auto ctx = Context::make({{"a", VarKind::symmetric, VarClass::x}, {"b", VarKind::free, VarClass::x}, {"c", VarKind::symmetric, VarClass::x}});
    auto M = parse_expr_matrix("a, T(b)\nb, c", ctx);
    auto dec = ldl_decompose(M);
    EXPECT_TRUE(dec.identity_permutation());
    EXPECT_EQ(format_expression(dec.L.entry(1, 0)), "b*inv(a)");
    EXPECT_EQ(format_expression(dec.L.entry(0, 1)), "0");
    EXPECT_EQ(format_expression(dec.D.entry(0, 0)), "a");
    EXPECT_EQ(format_expression(dec.D.entry(1, 1)), "c - b*inv(a)*T(b)");
    ASSERT_EQ(dec.blocks.size(), 3u);
    EXPECT_EQ(dec.blocks.back().size, 0u);

    Rng rng(1);
    auto X = sample_tuple(3, *ctx, Distribution::gaussian_general, rng);
    EXPECT_LT(ldl_psd_equivalence(M, dec, X).reconstruction_error, 1e-10);
}

TEST(Ldl, AntidiagonalBlock) {
    auto ctx = Context::free({"b"});
    auto dec = ldl_decompose(parse_expr_matrix("0, b; T(b), 0", ctx));
    ASSERT_EQ(dec.blocks.size(), 2u);
    EXPECT_EQ(dec.blocks[0].kind, LdlBlock::Kind::antidiagonal);
    EXPECT_EQ(dec.blocks[1].size, 0u);
    EXPECT_EQ(dec.L.str(), "[1, 0]\n[0, 1]\n");
    EXPECT_EQ(dec.D.str(), "[0, b]\n[T(b), 0]\n");
}

TEST(Ldl, Identity) {
    auto ctx = Context::symmetric({"x"});
    auto dec = ldl_decompose(parse_expr_matrix("1, 0, 0; 0, 1, 0; 0, 0, 1", ctx));
    EXPECT_TRUE(dec.identity_permutation());
    EXPECT_EQ(dec.L.str(), "[1, 0, 0]\n[0, 1, 0]\n[0, 0, 1]\n");
    EXPECT_EQ(dec.D.str(), dec.L.str());
    auto r = ldl_psd_equivalence(parse_expr_matrix("1, 0, 0; 0, 1, 0; 0, 0, 1", ctx), dec, scalar_point(ctx, {7}));
    EXPECT_TRUE(r.m_psd && r.d_psd);
}

TEST(Ldl, DiskMatrixAtTwoPoints) {
    auto ctx = Context::symmetric({"x"});
    auto M = parse_expr_matrix("1, x\nx, 1", ctx);
    auto dec = ldl_decompose(M);
    EXPECT_EQ(format_expression(dec.D.entry(1, 1)), "1 - x^2");

    auto X = scalar_point(ctx, {0.5});
    EXPECT_LT((dec.D.evaluate(X) - diag2(1, 0.75)).cwiseAbs().maxCoeff(), 1e-15);
    auto in = ldl_psd_equivalence(M, dec, X);
    EXPECT_TRUE(in.m_psd && in.d_psd);

    auto Y = scalar_point(ctx, {2});
    EXPECT_LT((dec.D.evaluate(Y) - diag2(1, -3)).cwiseAbs().maxCoeff(), 1e-15);
    auto out = ldl_psd_equivalence(M, dec, Y);
    EXPECT_FALSE(out.m_psd || out.d_psd);
    EXPECT_EQ(out.m_signature.neg, 1u);
    EXPECT_EQ(out.d_signature.neg, 1u);
}

TEST(Ldl, ZeroPivotIsPermutedAway) {
    auto ctx = Context::symmetric({"x"});
    auto dec = ldl_decompose(parse_expr_matrix("0, x; x, 1", ctx));
    EXPECT_EQ(dec.perm, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(format_expression(dec.D.entry(1, 1)), "-x^2");
}

TEST(Ldl, TrailingZeroBlock) {
    auto ctx = Context::symmetric({"x"});
    auto dec = ldl_decompose(parse_expr_matrix("1, x; x, x^2", ctx));
    ASSERT_EQ(dec.blocks.size(), 2u);
    EXPECT_EQ(dec.blocks[1].kind, LdlBlock::Kind::zero);
    EXPECT_EQ(dec.blocks[1].size, 1u);
    EXPECT_EQ(format_expression(dec.L.entry(1, 0)), "x");
}

TEST(Ldl, NonSymmetricIsRejected) {
    auto ctx = Context::free({"x"});
    EXPECT_THROW(ldl_decompose(parse_expr_matrix("1, x; x, 1", ctx)), ContractError);
    EXPECT_THROW(ldl_decompose(parse_expr_matrix("1, x; 0, 1", Context::symmetric({"x"}))), ContractError);
}

TEST(Ldl, ParseRejectsRaggedRows) {
    auto ctx = Context::symmetric({"x"});
    EXPECT_THROW(parse_expr_matrix("1, x; x", ctx), ParseError);
}

TEST(Ldl, ConstantMatrixMatchesDenseOracle) {
    std::mt19937_64 rng(9);
    auto ctx = Context::symmetric({"x"});
    for (int k = 0; k < 10; ++k) {
        Eigen::MatrixXd A = gaussian_matrix(rng, 4, true);
        Eigen::LDLT<Eigen::MatrixXd> oracle(A);
        Eigen::MatrixXd P = oracle.transpositionsP() * Eigen::MatrixXd::Identity(4, 4);
        Eigen::MatrixXd PA = P * A * P.transpose();
        ExprMatrix M(ctx, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) M(i, j) = expr::constant(rational_from_double(PA(i, j)));
        auto dec = ldl_decompose(M);
        EXPECT_TRUE(dec.identity_permutation());
        auto X = scalar_point(ctx, {0});
        Eigen::VectorXd d = dec.D.evaluate(X).diagonal();
        EXPECT_LT((d - oracle.vectorD()).cwiseAbs().maxCoeff(), 1e-9 * A.cwiseAbs().maxCoeff());
        EXPECT_LT((dec.L.evaluate(X) - Eigen::MatrixXd(oracle.matrixL())).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Ldl, RandomSignaturesAgree) {
    auto ctx = Context::symmetric({"x1", "x2"});
    std::mt19937_64 rng(17);
    Rng srng(18);
    std::size_t evaluated = 0, antidiagonal_checked = 0;
    for (int k = 0; k < 20; ++k) {
        auto P = fixture::random_symmetric_matrix(ctx, 3, rng);
        auto M = ExprMatrix::from(P);
        auto dec = ldl_decompose(M);
        for (int s = 0; s < 20; ++s) {
            auto X = sample_tuple(1 + s % 3, *ctx, Distribution::gaussian_symmetric, srng);
            LdlEquivalence r;
            try {
                r = ldl_psd_equivalence(M, dec, X);
            } catch (const DomainError&) {
                continue;
            }
            ++evaluated;
            EXPECT_LT(r.reconstruction_error, 1e-8) << P;
            EXPECT_EQ(r.m_signature, r.d_signature) << P;
            EXPECT_TRUE(r.equivalent());
            for (auto& b : dec.blocks)
                if (b.kind == LdlBlock::Kind::antidiagonal && freealg::evaluate(dec.D.entry(b.start, b.start + 1), X).norm() > 1e-9) {
                    EXPECT_FALSE(r.d_psd);
                    ++antidiagonal_checked;
                }
        }
    }
    EXPECT_GE(evaluated, 300u);
    EXPECT_GT(antidiagonal_checked, 0u);
}
