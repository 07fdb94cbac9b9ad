#include <freealg/fixtures.hpp>
#include <freealg/pencils.hpp>

#include <gtest/gtest.h>

using namespace freealg;
using fixtures::mat;

namespace {

MatrixTuple point(std::initializer_list<double> v) {
    MatrixTuple X(1, {});
    for (double t : v) X.mats.push_back(Eigen::MatrixXd::Constant(1, 1, t));
    return X;
}

AffineLinearPencil disk_pencil() {
    return AffineLinearPencil(Context::symmetric({"x"}), Eigen::MatrixXd::Identity(2, 2), {mat({{0, 1}, {1, 0}})});
}

// L_j(x, y) = [[1, γx],[γx, α + y]]
AffineLinearPencil tv_block(double alpha) {
    double gamma = std::pow(1 + 2 * alpha * alpha, 0.25);
    return AffineLinearPencil(Context::symmetric({"x", "y"}), mat({{1, 0}, {0, alpha}}),
                              {mat({{0, gamma}, {gamma, 0}}), mat({{0, 0}, {0, 1}})});
}

}  // namespace

TEST(PencilMembership, GammaAtHalf) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto r = pencil_membership(fixtures::gamma_pencil(ctx), point({0.5, 0}));
    EXPECT_TRUE(r.inside);
    EXPECT_NEAR(r.margin, 0.5, 1e-15);
}

TEST(PencilMembership, MonicAtZero) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto r = pencil_membership(fixtures::delta_pencil(ctx), MatrixTuple(3, {Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3)}));
    EXPECT_TRUE(r.inside);
    EXPECT_NEAR(r.margin, 1.0, 1e-15);
}

TEST(PencilMembership, OutsideGivesEigenvector) {
    auto r = pencil_membership(disk_pencil(), point({2}));
    EXPECT_FALSE(r.inside);
    EXPECT_NEAR(r.margin, -1, 1e-14);
    Eigen::MatrixXd L = mat({{1, 2}, {2, 1}});
    EXPECT_LT((L * r.eigenvector + r.eigenvector).norm(), 1e-12);
}

TEST(PencilMembership, SizeMismatch) {
    auto ctx = Context::symmetric({"x1", "x2"});
    EXPECT_THROW(pencil_membership(fixtures::gamma_pencil(ctx), point({0.5})), ContractError);
    MatrixTuple bad(2, {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 3)});
    EXPECT_THROW(pencil_membership(fixtures::gamma_pencil(ctx), bad), ContractError);
}

TEST(PencilMembership, DeltaGammaAgreeAtLevelOne) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto D = fixtures::delta_pencil(ctx), G = fixtures::gamma_pencil(ctx);
    Rng rng(5);
    std::uniform_real_distribution<double> R(0.0, 1.5), A(0.0, 2 * M_PI);
    std::size_t compared = 0;
    for (int k = 0; k < 500; ++k) {
        double r = R(rng), a = A(rng);
        if (std::abs(r - 1) < 1e-9) continue;
        auto X = point({r * std::cos(a), r * std::sin(a)});
        EXPECT_EQ(pencil_membership(D, X).inside, pencil_membership(G, X).inside) << r;
        ++compared;
    }
    EXPECT_GE(compared, 499u);
}

TEST(PencilMembership, DeltaStrictlyLargerAtLevelTwo) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto s = pencil_separation(fixtures::delta_pencil(ctx), fixtures::gamma_pencil(ctx), 2, 20000, 3);
    ASSERT_TRUE(s.X.has_value());
    EXPECT_TRUE(pencil_membership(fixtures::delta_pencil(ctx), *s.X).inside);
    EXPECT_FALSE(pencil_membership(fixtures::gamma_pencil(ctx), *s.X).inside);
}

TEST(MonicNormalize, MonicUnchanged) {
    auto L = disk_pencil();
    auto M = monic_normalize(L);
    EXPECT_EQ(M.A0, L.A0);
    EXPECT_EQ(M.A[0], L.A[0]);
}

TEST(MonicNormalize, SingularConstantRejected) {
    AffineLinearPencil L(Context::symmetric({"x"}), mat({{1, 0}, {0, 0}}), {mat({{0, 1}, {1, 0}})});
    EXPECT_THROW(monic_normalize(L), NormalizationError);
}

TEST(MonicNormalize, PreservesMembership) {
    for (double alpha : {1.0, 2.0, 0.25}) {
        auto L = tv_block(alpha);
        auto M = monic_normalize(L);
        EXPECT_TRUE(M.is_monic());
        Rng rng(11);
        for (std::size_t n : {1, 2})
            for (int k = 0; k < 200; ++k) {
                auto X = sample_tuple(n, *L.ctx, Distribution::gaussian_symmetric, rng);
                auto a = pencil_membership(L, X), b = pencil_membership(M, X);
                if (std::abs(a.margin) < 1e-9) continue;
                EXPECT_EQ(a.inside, b.inside) << alpha;
            }
    }
    auto ctx = Context::symmetric({"x1", "x2", "y1", "y2"});
    auto L = fixtures::tv_projection_pencil(ctx, 2.0);
    auto M = monic_normalize(L);
    Rng rng(12);
    for (int k = 0; k < 200; ++k) {
        auto X = sample_tuple(2, *ctx, Distribution::gaussian_symmetric, rng, 0.3);
        EXPECT_EQ(pencil_membership(L, X).inside, pencil_membership(M, X).inside);
    }
}

TEST(LevelOne, DiskIsBoundedAndNonempty) {
    auto a = pencil_level_one_analysis(disk_pencil());
    EXPECT_FALSE(a.empty);
    EXPECT_TRUE(a.bounded);
    EXPECT_NEAR(a.max_exit, 1.0, 1e-6);
    EXPECT_EQ(a.rays_tested, 2u + 64u);
}

TEST(LevelOne, IdentityIsUnbounded) {
    AffineLinearPencil L(Context::symmetric({"x"}), Eigen::MatrixXd::Identity(2, 2), {Eigen::MatrixXd::Zero(2, 2)});
    auto a = pencil_level_one_analysis(L);
    EXPECT_FALSE(a.empty);
    EXPECT_FALSE(a.bounded);
    ASSERT_TRUE(a.escaping_ray.has_value());
}

TEST(LevelOne, IndefinitePencilIsEmpty) {
    AffineLinearPencil L(Context::symmetric({"x"}), mat({{0, 1}, {1, 0}}), {mat({{1, 0}, {0, -1}})});
    auto a = pencil_level_one_analysis(L);
    EXPECT_TRUE(a.empty);
    EXPECT_NEAR(a.interior_margin, -1, 1e-9);
}

TEST(LevelOne, HalfPlaneEscapesAlongAxis) {
    // diag(1 + x, 1 + y) is unbounded only in the positive quadrant.
    AffineLinearPencil L(Context::symmetric({"x", "y"}), Eigen::MatrixXd::Identity(2, 2),
                         {mat({{1, 0}, {0, 0}}), mat({{0, 0}, {0, 1}})});
    EXPECT_FALSE(pencil_level_one_analysis(L).bounded);
}

TEST(LevelOne, BoundedRaysAllExit) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto a = pencil_level_one_analysis(fixtures::delta_pencil(ctx), {200, 3});
    EXPECT_TRUE(a.bounded);
    EXPECT_EQ(a.rays_tested, 204u);
    EXPECT_NEAR(a.max_exit, 1.0, 1e-6);
}

TEST(Component, TvAtHalf) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto r = dp_component_membership(tv_polynomial(ctx), point({0.5, 0.5}));
    EXPECT_EQ(r.status, ComponentStatus::in_component);
    EXPECT_NEAR(r.margin, 0.875, 1e-15);
    EXPECT_NEAR(r.path_min, 0.875, 1e-15);
}

TEST(Component, ZeroIsInComponent) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto r = dp_component_membership(tv_polynomial(ctx), MatrixTuple(2, {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)}));
    EXPECT_EQ(r.status, ComponentStatus::in_component);
    EXPECT_EQ(r.steps, 0u);
}

TEST(Component, OutsideSet) {
    auto ctx = Context::symmetric({"x1", "x2"});
    EXPECT_EQ(dp_component_membership(tv_polynomial(ctx), point({1, 0.5})).status, ComponentStatus::outside_set);
}

TEST(Component, DoubleWellCrossing) {
    auto ctx = Context::symmetric({"x"});
    auto p = parse_polynomial("(1 - x^2)*(4 - x^2)", ctx);
    auto r = dp_component_membership(p, point({3}));
    EXPECT_EQ(r.status, ComponentStatus::disconnected_evidence);
    EXPECT_GT(r.margin, 0);
    EXPECT_LE(r.bracket_lo, 1.0 / 3);
    EXPECT_GT(r.bracket_hi, 1.0 / 3);
    EXPECT_LE(r.bracket_hi - r.bracket_lo, 1e-6);

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
    D(0, 0) = 3;
    D(1, 1) = 0.5;
    EXPECT_EQ(dp_component_membership(p, MatrixTuple(2, {D})).status, ComponentStatus::disconnected_evidence);
    EXPECT_EQ(dp_component_membership(p, point({0.9})).status, ComponentStatus::in_component);
    EXPECT_THROW(dp_component_membership(parse_polynomial("x^2", ctx), point({1})), ContractError);
}

TEST(TvSearch, LevelTwoFindsWitness) {
    auto s = tv_nonconvexity_search(2, 100000, 1);
    ASSERT_TRUE(s.found());
    auto ctx = Context::symmetric({"x1", "x2"});
    auto p = tv_polynomial(ctx);
    auto& w = *s.witness;
    EXPECT_GE(min_eigenvalue(evaluate(p, w.X)), 1e-6);
    EXPECT_GE(min_eigenvalue(evaluate(p, w.Y)), 1e-6);
    EXPECT_LE(min_eigenvalue(evaluate(p, w.M)), -1e-6);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_LT((w.M.mats[j] - 0.5 * (w.X.mats[j] + w.Y.mats[j])).norm(), 1e-15);

    auto again = tv_nonconvexity_search(2, 100000, 1);
    ASSERT_TRUE(again.found());
    EXPECT_EQ(again.candidates, s.candidates);
    EXPECT_EQ(again.witness->X.mats[0], w.X.mats[0]);
    EXPECT_EQ(again.witness->Y.mats[1], w.Y.mats[1]);
}

TEST(TvSearch, LevelOneNotFound) {
    auto s = tv_nonconvexity_search(1, 5000, 1);
    EXPECT_FALSE(s.found());
    EXPECT_EQ(s.candidates, 5000u);
    EXPECT_GT(s.best_midpoint, 0);
}

TEST(TvSearch, BallNotFound) {
    auto ctx = Context::symmetric({"x1", "x2"});
    for (std::size_t n : {1, 2, 3}) {
        NonconvexityOptions o;
        o.n = n;
        o.budget = 3000;
        auto s = nonconvexity_search(ball_polynomial(ctx), o);
        EXPECT_FALSE(s.found()) << n;
        EXPECT_GT(s.best_midpoint, 0) << n;
    }
}

TEST(Projection, TvScreenIsProjection) {
    auto ctx = Context::symmetric({"x1", "x2", "y1", "y2"});
    auto L = fixtures::tv_projection_pencil(ctx, 1.0);
    Rng rng(21);
    std::uniform_real_distribution<double> U(-1.3, 1.3);
    std::size_t inside = 0, outside = 0;
    while (inside < 200 || outside < 200) {
        double a = U(rng), b = U(rng);
        double m = 1 - std::pow(a, 4) - std::pow(b, 4);
        if (m > 1e-6 && inside < 200) {
            auto r = projection_lift(L, point({a, b}));
            EXPECT_TRUE(r.found) << a << " " << b;
            if (r.found) {
                MatrixTuple Z = point({a, b});
                for (auto& Y : r.Y.mats) Z.mats.push_back(Y);
                EXPECT_TRUE(pencil_membership(L, Z).inside);
            }
            ++inside;
        } else if (m < -1e-6 && outside < 200) {
            EXPECT_FALSE(projection_lift(L, point({a, b})).found) << a << " " << b;
            ++outside;
        }
    }
}

TEST(Exploratory, RepresentabilityPencil) {
    // [[1, x],[x, 0]] is singular at 0; its level-one set is empty and it cannot be normalized.
    AffineLinearPencil L(Context::symmetric({"x"}), mat({{1, 0}, {0, 0}}), {mat({{0, 1}, {1, 0}})});
    EXPECT_TRUE(pencil_level_one_analysis(L).empty);
    EXPECT_THROW(monic_normalize(L), NormalizationError);
}
