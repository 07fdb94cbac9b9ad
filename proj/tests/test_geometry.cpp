#include <freealg/fixtures.hpp>
#include <freealg/geometry.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace freealg;

namespace {

// X = diag(0, Y) with Y invertible symmetric, v = e₁.
VarietyPoint example_point(const Polynomial& p, std::size_t n, Rng& rng) {
    Eigen::MatrixXd Y = gaussian_matrix(rng, n - 1, true) + 3.0 * Eigen::MatrixXd::Identity(n - 1, n - 1);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
    X.bottomRightCorner(n - 1, n - 1) = Y;
    return variety_point(p, MatrixTuple(n, {X}), Eigen::VectorXd::Unit(n, 0));
}

Eigen::MatrixXd random_columns(Rng& rng, std::size_t n, std::size_t d) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXd Z(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) Z(i, j) = N(rng);
    return Z;
}

}  // namespace

TEST(Tangent, LinearPolynomial) {
    auto ctx = Context::symmetric({"x"});
    Rng rng(1);
    auto p = parse_polynomial("x", ctx);
    auto pt = example_point(p, 3, rng);
    auto t = clamped_tangent(p, pt);
    EXPECT_EQ(t.codimension, 3u);
    EXPECT_EQ(static_cast<std::size_t>(t.basis.cols()), 6u - 3u);
    for (Eigen::Index k = 0; k < t.basis.cols(); ++k) EXPECT_LT((t.direction(k)[0] * pt.v).norm(), 1e-12);
    EXPECT_TRUE(full_rank_test(p, pt).full_rank);
}

TEST(Tangent, PowerAtSingularPoint) {
    auto ctx = Context::symmetric({"x"});
    Rng rng(2);
    for (int k : {2, 3, 4}) {
        auto p = parse_polynomial("x^" + std::to_string(k), ctx);
        for (std::size_t n : {2u, 3u, 4u}) {
            auto pt = example_point(p, n, rng);
            ASSERT_TRUE(pt.on_variety());
            auto t = clamped_tangent(p, pt);
            EXPECT_EQ(t.codimension, n - 1);
            auto fr = full_rank_test(p, pt);
            EXPECT_FALSE(fr.full_rank);
            EXPECT_EQ(fr.rank, n - 1);
            Eigen::MatrixXd S = second_fundamental_form(p, pt, t);
            if (k > 2) EXPECT_LT(S.cwiseAbs().maxCoeff(), 1e-9) << "k=" << k;
        }
    }
}

TEST(Tangent, SquareFormIsMinusTwiceNorm) {
    auto ctx = Context::symmetric({"x"});
    Rng rng(3);
    auto p = parse_polynomial("x^2", ctx);
    auto pt = example_point(p, 3, rng);
    auto t = clamped_tangent(p, pt);
    Eigen::MatrixXd S = second_fundamental_form(p, pt, t);
    for (Eigen::Index k = 0; k < t.basis.cols(); ++k) {
        Eigen::VectorXd Hv = t.direction(k)[0] * pt.v;
        EXPECT_NEAR(S(k, k), -2.0 * Hv.squaredNorm(), 1e-12);
    }
    EXPECT_LE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues().maxCoeff(), 1e-12);
}

TEST(Tangent, AffineHasZeroForm) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto p = parse_polynomial("x1 - x2", ctx);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    auto pt = variety_point(p, MatrixTuple(2, {A, A}), Eigen::VectorXd::Unit(2, 1));
    auto t = clamped_tangent(p, pt);
    EXPECT_LT(second_fundamental_form(p, pt, t).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Tangent, OffVarietyIsContractError) {
    auto ctx = Context::symmetric({"x"});
    auto p = parse_polynomial("3", ctx);
    auto pt = variety_point(p, MatrixTuple(2, {Eigen::MatrixXd::Identity(2, 2)}), Eigen::VectorXd::Unit(2, 0));
    EXPECT_FALSE(pt.on_variety());
    EXPECT_THROW(clamped_tangent(p, pt), ContractError);
}

TEST(FullRank, ZeroVectorIsDeficient) {
    auto ctx = Context::symmetric({"x"});
    auto p = parse_polynomial("x", ctx);
    auto pt = variety_point(p, MatrixTuple(2, {Eigen::MatrixXd::Identity(2, 2)}), Eigen::VectorXd::Zero(2));
    auto r = full_rank_test(p, pt);
    EXPECT_FALSE(r.full_rank);
    EXPECT_EQ(r.rank, 0u);
}

TEST(FullRank, FullRankMatchesCodimension) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto p = parse_polynomial("x1*x2 + x2*x1 - x1", ctx);
    Rng rng(5);
    for (int k = 0; k < 10; ++k) {
        auto X = sample_tuple(3, *ctx, Distribution::gaussian_symmetric, rng);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(evaluate(p, X));
        // p − λ vanishes on the eigenvector of λ
        auto q = p - Polynomial(ctx, rational_from_double(es.eigenvalues()(0)));
        auto pt = variety_point(q, X, es.eigenvectors().col(0));
        ASSERT_TRUE(pt.on_variety());
        auto fr = full_rank_test(q, pt);
        EXPECT_TRUE(fr.full_rank);
        EXPECT_EQ(clamped_tangent(q, pt).codimension, 3u);
    }
}

TEST(Chsy, SpecExamples) {
    Rng rng(6);
    EXPECT_EQ(chsy_codimension(1, random_columns(rng, 4, 2)).observed, 1u);
    EXPECT_EQ(chsy_codimension(1, random_columns(rng, 4, 1)).observed, 0u);
    EXPECT_EQ(chsy_codimension(2, random_columns(rng, 5, 3)).observed, 6u);
}

TEST(Chsy, FormulaOnGrid) {
    Rng rng(7);
    for (std::size_t g : {1u, 2u})
        for (std::size_t d : {1u, 2u, 3u})
            for (int k = 0; k < 5; ++k) {
                auto r = chsy_codimension(g, random_columns(rng, d + 2, d));
                EXPECT_TRUE(r.matches()) << g << " " << d;
            }
}

TEST(Chsy, DependentVectorsAreRejected) {
    Eigen::MatrixXd Z(4, 2);
    Z << 1, 2, 0, 0, 1, 2, 0, 0;
    EXPECT_THROW(chsy_codimension(1, Z), ContractError);
    EXPECT_THROW(chsy_codimension(1, Eigen::MatrixXd::Identity(2, 2)), ContractError);
}

TEST(Chsy, BorderImageCodimension) {
    Rng rng(8);
    std::normal_distribution<double> N(0.0, 1.0);
    for (std::size_t g : {1u, 2u})
        for (std::size_t d : {1u, 2u}) {
            std::vector<std::string> names;
            for (std::size_t j = 0; j < g; ++j) names.push_back("x" + std::to_string(j + 1));
            auto ctx = Context::symmetric(names);
            std::size_t kappa = words_up_to(alphabet_of(*ctx, g == 1 ? std::vector<std::size_t>{0} : std::vector<std::size_t>{0, 1}), d).size();
            std::size_t n = kappa + 1;
            auto X = sample_tuple(n, *ctx, Distribution::gaussian_symmetric, rng);
            Eigen::VectorXd v(n);
            for (std::size_t i = 0; i < n; ++i) v(i) = N(rng);
            auto r = border_image_codimension(ctx, X, v, d);
            EXPECT_EQ(r.observed, g * kappa * (kappa - 1) / 2);
        }
}

TEST(Dependence, SpecExamples) {
    auto ctx = Context::symmetric({"x"});
    TupleSampler sampler = [&](std::size_t n, Rng& rng) { return sample_tuple(n, *ctx, Distribution::gaussian_symmetric, rng); };
    auto dep = common_dependence({parse_expression("x", ctx), parse_expression("2*x", ctx)}, sampler, 10, 1);
    ASSERT_EQ(dep.status, DependenceStatus::dependent);
    Eigen::Vector2d expect(2, -1);
    expect.normalize();
    EXPECT_LT((dep.lambda - expect).norm(), 1e-9);

    auto ind = common_dependence({parse_expression("1", ctx), parse_expression("x", ctx)}, sampler, 10, 1);
    EXPECT_EQ(ind.status, DependenceStatus::independent_on_samples);
    EXPECT_GT(ind.smallest_singular, 1e-3);
}

TEST(Dependence, BergmanIsOneOnThreeByThree) {
    auto ctx = Context::free({"x", "y"});
    auto b = fixtures::bergman(ctx);
    TupleSampler sampler = [&](std::size_t n, Rng& rng) { return sample_tuple(n, *ctx, Distribution::gaussian_general, rng); };
    auto dep = common_dependence({b, parse_expression("1", ctx)}, sampler, 20, 3, {3}, 1e-6);
    ASSERT_EQ(dep.status, DependenceStatus::dependent);
    Eigen::Vector2d expect(1, -1);
    expect.normalize();
    EXPECT_LT((dep.lambda - expect).norm(), 1e-6);
}

TEST(Dependence, AllSkippedIsInconclusive) {
    auto ctx = Context::symmetric({"x"});
    TupleSampler zero = [&](std::size_t n, Rng&) { return MatrixTuple(n, {Eigen::MatrixXd::Zero(n, n)}); };
    auto r = common_dependence({parse_expression("inv(x)", ctx), parse_expression("1", ctx)}, zero, 4, 1);
    EXPECT_EQ(r.status, DependenceStatus::inconclusive);
    EXPECT_EQ(r.skipped, 4u);
}

TEST(Zariski, ZeroPoint) {
    auto ctx = Context::symmetric({"x1", "x2"});
    MatrixTuple X(1, {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)});
    auto z = zariski_annihilator(ctx, X, Eigen::VectorXd::Ones(1), 1);
    EXPECT_EQ(z.dim(), 2u);
    EXPECT_EQ(z.rank + z.dim(), 3u);
    auto polys = z.polynomials();
    for (auto& q : polys) EXPECT_EQ(q.coeff(Word{}), Rational(0));
}

TEST(Zariski, ReflexiveAndDirectSums) {
    auto ctx = Context::symmetric({"x1", "x2"});
    Rng rng(10);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        std::size_t n = 2 + k % 2, d = 2;
        auto X = sample_tuple(n, *ctx, Distribution::gaussian_symmetric, rng);
        auto Y = sample_tuple(n, *ctx, Distribution::gaussian_symmetric, rng);
        Eigen::VectorXd v(n), w(n);
        for (std::size_t i = 0; i < n; ++i) v(i) = N(rng), w(i) = N(rng);
        auto z = zariski_annihilator(ctx, X, v, d);
        EXPECT_EQ(z.rank + z.dim(), 7u);
        EXPECT_TRUE(z.contains(X, v));
        Eigen::VectorXd vv(2 * n), vw(2 * n);
        vv << v, v;
        vw << v, w;
        EXPECT_TRUE(z.contains(direct_sum(X, X), vv));
        auto zs = zariski_annihilator(ctx, direct_sum(X, Y), vw, d);
        EXPECT_TRUE(zs.subspace_of(z));
    }
}

TEST(Zariski, MinimumDegreeEvidence) {
    auto ctx = Context::symmetric({"x"});
    auto p = parse_polynomial("x^2 - 1", ctx);
    Rng rng(11);
    std::vector<VarietyPoint> pool;
    for (int k = 0; k < 6; ++k) {
        Eigen::MatrixXd Q = gaussian_matrix(rng, 3, false).householderQr().householderQ();
        Eigen::Vector3d d(1, -1, 1 + k);
        Eigen::MatrixXd X = Q * d.asDiagonal() * Q.transpose();
        Eigen::VectorXd v = Q.col(k % 2);
        auto pt = variety_point(p, MatrixTuple(3, {X}), v);
        ASSERT_TRUE(pt.on_variety());
        pool.push_back(pt);
    }
    auto r = minimum_degree_check(p, pool);
    EXPECT_FALSE(r.lower_degree_found);
    EXPECT_EQ(r.annihilator_dims, (std::vector<std::size_t>{0, 0}));
}
