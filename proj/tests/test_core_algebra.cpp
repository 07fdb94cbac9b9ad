#include <freealg/polynomial.hpp>
#include <freealg/expressions.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace freealg;

namespace {

ContextPtr sym3() { return Context::symmetric({"x1", "x2", "x3"}); }

Polynomial P(const std::string& s, const ContextPtr& ctx) { return parse_polynomial(s, ctx); }

Polynomial random_poly(std::mt19937_64& rng, const ContextPtr& ctx, std::size_t max_deg, std::size_t terms) {
    std::uniform_int_distribution<int> coef(-5, 5), deg(0, static_cast<int>(max_deg));
    std::uniform_int_distribution<std::size_t> var(0, ctx->size() - 1);
    std::bernoulli_distribution flip(0.5);
    Polynomial p(ctx);
    for (std::size_t t = 0; t < terms; ++t) {
        Word w;
        int d = deg(rng);
        for (int i = 0; i < d; ++i) {
            auto v = var(rng);
            w.push_back({static_cast<std::uint32_t>(v), !ctx->is_symmetric(v) && flip(rng)});
        }
        p.add_term(w, coef(rng));
    }
    return p;
}

}  // namespace

TEST(Multiply, IdentityFactor) {
    auto ctx = sym3();
    auto c = P("x1*x2 - x2*x1", ctx);
    EXPECT_EQ(c * Polynomial(ctx, 1), c);
}

TEST(Multiply, CommutatorSquared) {
    auto ctx = sym3();
    auto c = P("x1*x2 - x2*x1", ctx);
    auto h1 = P("x1*x2*x1*x2 - x1*x2^2*x1 - x2*x1^2*x2 + x2*x1*x2*x1", ctx);
    EXPECT_EQ(c * c, h1);
}

TEST(Multiply, DegreeAdditivityOnRandomPairs) {
    std::mt19937_64 rng(7);
    auto ctx = Context::make({{"x", VarKind::symmetric, VarClass::x}, {"y", VarKind::free, VarClass::x}});
    int checked = 0;
    while (checked < 50) {
        auto p = random_poly(rng, ctx, 4, 4), q = random_poly(rng, ctx, 4, 4);
        if (p.is_zero() || q.is_zero()) continue;
        auto pq = p * q;
        ASSERT_FALSE(pq.is_zero());
        EXPECT_EQ(*pq.degree(), *p.degree() + *q.degree());
        ++checked;
    }
}

TEST(Multiply, MismatchedContextsThrow) {
    auto a = P("x1", sym3());
    auto b = P("y", Context::symmetric({"y"}));
    EXPECT_THROW(a * b, ContextError);
}

TEST(Multiply, BruteForceCoefficientRule) {
    std::mt19937_64 rng(11);
    auto ctx = Context::symmetric({"a", "b"});
    for (int r = 0; r < 20; ++r) {
        auto p = random_poly(rng, ctx, 3, 3), q = random_poly(rng, ctx, 3, 3);
        auto pq = p * q;
        for (auto& w : words_up_to(alphabet_of(*ctx, {0, 1}), 6)) {
            Rational s = 0;
            for (std::size_t k = 0; k <= w.size(); ++k)
                s += p.coeff(Word(w.begin(), w.begin() + k)) * q.coeff(Word(w.begin() + k, w.end()));
            ASSERT_EQ(pq.coeff(w), s);
        }
    }
}

TEST(Transpose, ReversesWords) {
    auto ctx = sym3();
    EXPECT_EQ(P("2 - 3*x1^2*x2*x3", ctx).transpose(), P("2 - 3*x3*x2*x1^2", ctx));
}

TEST(Transpose, CommutatorIsSkew) {
    auto ctx = sym3();
    auto c = P("x1*x2 - x2*x1", ctx);
    EXPECT_EQ(c.transpose(), -c);
}

TEST(Transpose, FreeVariablesToggle) {
    auto ctx = Context::free({"x1", "x2"});
    auto q = P("1 + T(x1)*x2 - T(x2)*x1", ctx);
    EXPECT_EQ(q.transpose(), P("1 + T(x2)*x1 - T(x1)*x2", ctx));
    EXPECT_EQ(q.transpose().transpose(), q);
}

TEST(Transpose, AntiAutomorphism) {
    std::mt19937_64 rng(3);
    auto ctx = Context::make({{"x", VarKind::free, VarClass::x}, {"y", VarKind::symmetric, VarClass::x}});
    for (int i = 0; i < 100; ++i) {
        auto p = random_poly(rng, ctx, 3, 4), q = random_poly(rng, ctx, 3, 4);
        ASSERT_EQ((p * q).transpose(), q.transpose() * p.transpose());
    }
}

TEST(Transpose, MatrixPolynomial) {
    auto ctx = Context::free({"x"});
    MatrixPolynomial m(ctx, 1, 2);
    m(0, 0) = P("x", ctx);
    m(0, 1) = P("x*T(x)*x", ctx);
    auto t = m.transpose();
    EXPECT_EQ(t.rows(), 2u);
    EXPECT_EQ(t(0, 0), P("T(x)", ctx));
    EXPECT_EQ(t(1, 0), P("T(x)*x*T(x)", ctx));
    EXPECT_EQ(t.transpose(), m);
}

TEST(Degree, LongestWord) {
    auto ctx = sym3();
    auto r = P("1 - 3*x1*x2 - 3*x2*x1 - 2*x1^2*x2^4*x1^2", ctx);
    EXPECT_EQ(r.degree(), 8u);
    auto parts = r.homogeneous_parts();
    ASSERT_EQ(parts.size(), 9u);
    Polynomial sum(ctx);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        for (auto& [w, c] : parts[k].terms()) EXPECT_EQ(w.size(), k);
        sum += parts[k];
        EXPECT_EQ(parts[k].homogeneous_part(k), parts[k]);
    }
    EXPECT_EQ(sum, r);
}

TEST(Degree, ZeroSentinel) {
    Polynomial z(sym3());
    EXPECT_FALSE(z.degree().has_value());
    EXPECT_TRUE(z.homogeneous_parts().empty());
}

TEST(Degree, SymmetricJ) {
    auto ctx = sym3();
    auto j = P("x1*x2 + x2*x1", ctx);
    EXPECT_EQ(j.degree(), 2u);
    EXPECT_TRUE(j.is_homogeneous());
    EXPECT_TRUE(j.is_symmetric());
}

TEST(Substitute, DirectionToState) {
    auto ctx = Context::make({{"x1", VarKind::symmetric, VarClass::x},
                              {"x2", VarKind::symmetric, VarClass::x},
                              {"h1", VarKind::symmetric, VarClass::h},
                              {"h2", VarKind::symmetric, VarClass::h}});
    auto q = P("2*h1*h2*x1*x2 + 2*h2*h1*x2*x1", ctx);
    auto r = q.substitute({{2, P("x1", ctx)}, {3, P("x2", ctx)}});
    EXPECT_EQ(r, P("2*x1*x2*x1*x2 + 2*x2*x1*x2*x1", ctx));
}

TEST(Substitute, IdentityAndZero) {
    auto ctx = Context::symmetric({"x"});
    auto p = P("x^4 + 1", ctx);
    EXPECT_EQ(p.substitute({{0, P("x", ctx)}}), p);
    EXPECT_EQ(p.substitute({{0, Polynomial(ctx)}}), Polynomial(ctx, 1));
}

TEST(Collapse, Commutator) {
    auto ctx = sym3();
    EXPECT_TRUE(commutative_collapse(P("x1*x2 - x2*x1", ctx)).is_zero());
}

TEST(Collapse, TvScreen) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto c = commutative_collapse(P("1 - x1^4 - x2^4", ctx));
    EXPECT_EQ(c.str(), "1 - t1^4 - t2^4");
}

TEST(Collapse, ExponentCount) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto c = commutative_collapse(P("x1*x2*x1", ctx));
    EXPECT_EQ(c.coeff({2, 1}), 1);
    EXPECT_EQ(c.terms().size(), 1u);
}

TEST(Words, SigmaCounts) {
    auto ctx = Context::symmetric({"a", "b"});
    EXPECT_EQ(words_up_to(alphabet_of(*ctx, {0, 1}), 3).size(), sigma(2, 3));
    EXPECT_EQ(sigma(2, 3), 15u);
    EXPECT_EQ(sigma(1, 4), 5u);
}
