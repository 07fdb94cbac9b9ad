#include <freealg/expressions.hpp>

#include <gtest/gtest.h>

using namespace freealg;

TEST(Parse, Commutator) {
    auto ctx = Context::symmetric({"x1", "x2"});
    auto e = parse_expression("x1*x2 - x2*x1", ctx);
    ASSERT_TRUE(e.is_polynomial());
    auto p = e.to_polynomial();
    EXPECT_EQ(p.coeff({{0, false}, {1, false}}), 1);
    EXPECT_EQ(p.coeff({{1, false}, {0, false}}), -1);
    EXPECT_EQ(p.size(), 2u);
    EXPECT_EQ(format_polynomial(p), "x1*x2 - x2*x1");
}

TEST(Parse, ZeroPolynomial) {
    auto ctx = Context::symmetric({"x"});
    auto p = parse_polynomial("0", ctx);
    EXPECT_TRUE(p.is_zero());
    EXPECT_EQ(format_polynomial(p), "0");
}

#include <freealg/equivalence.hpp>
#include <freealg/fixtures.hpp>

TEST(Parse, ContractionS) {
    auto ctx = Context::free({"x"});
    auto s = parse_expression("T(x)*inv(1 - x*T(x))", ctx);
    ASSERT_EQ(s.root->kind, NodeKind::product);
    ASSERT_EQ(s.root->children.size(), 2u);
    EXPECT_EQ(s.root->children[0]->kind, NodeKind::variable);
    EXPECT_TRUE(s.root->children[0]->transposed);
    EXPECT_EQ(s.root->children[1]->kind, NodeKind::inverse);
    EXPECT_FALSE(s.is_polynomial());
}

TEST(Parse, Errors) {
    auto ctx = Context::symmetric({"x"});
    try {
        parse_expression("x + y", ctx);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position, 4u);
    }
    EXPECT_THROW(parse_expression("x * (x + 1", ctx), ParseError);
    EXPECT_THROW(parse_expression("x ^", ctx), ParseError);
    EXPECT_THROW(parse_expression("inv(0)", ctx), ParseError);
    EXPECT_THROW(parse_expression("3/0", ctx), ParseError);
}

TEST(Parse, Literals) {
    auto ctx = Context::symmetric({"x"});
    EXPECT_EQ(parse_polynomial("0.25*x + 3/4 x", ctx), parse_polynomial("x", ctx));
    EXPECT_EQ(parse_polynomial("(x + 1)^2", ctx), parse_polynomial("x^2 + 2*x + 1", ctx));
    EXPECT_EQ(parse_polynomial("T(x)", ctx), parse_polynomial("x", ctx));
    EXPECT_EQ(parse_polynomial("-(x - 2)", ctx), parse_polynomial("2 - x", ctx));
}

TEST(Format, CanonicalPolynomialRoundTrip) {
    auto ctx = Context::make({{"x1", VarKind::symmetric, VarClass::x}, {"x2", VarKind::free, VarClass::x}});
    for (auto t : {"x1*x2 - x2*x1", "3/4*x1*T(x2)*x2 - 1", "x1^3*T(x2)^2 + 2", "0", "-x1"}) {
        auto p = parse_polynomial(t, ctx);
        EXPECT_EQ(parse_polynomial(p.str(), ctx), p);
        EXPECT_EQ(parse_polynomial(p.str(), ctx).str(), p.str());
    }
}

TEST(Format, StructuralRoundTrip) {
    auto ctx = Context::make({{"x", VarKind::free, VarClass::x}, {"y", VarKind::free, VarClass::x}});
    for (auto t : {"T(x)*inv(1 - x*T(x))", "inv(1 - T(x)*x)*T(x)", "-x*y + 2*(x + y)^2 - 3/4*inv(x)",
                   "T(x*y + 1) - (x - y)", "x*(y*x)^3*(-2)", "-(x + y) - 3", "-(x*y)*x"}) {
        auto e = parse_expression(t, ctx);
        auto text = format_expression(e);
        auto again = parse_expression(text, ctx);
        EXPECT_TRUE(expr::structurally_equal(e.root, again.root)) << t << " -> " << text;
        EXPECT_EQ(format_expression(again), text);
    }
}

TEST(Format, BergmanRoundTrips) {
    auto ctx = Context::free({"x", "y"});
    auto b = fixtures::bergman(ctx);
    auto text = format_expression(b);
    auto again = parse_expression(text, ctx);
    EXPECT_TRUE(expr::structurally_equal(b.root, again.root));
    EXPECT_EQ(format_expression(again), text);
}

TEST(Format, Commutator) {
    auto ctx = Context::symmetric({"x1", "x2"});
    EXPECT_EQ(format_expression(parse_expression("x1*x2 - x2*x1", ctx)), "x1*x2 - x2*x1");
    EXPECT_EQ(format_expression(Expression(Polynomial(ctx))), "0");
}

TEST(Equivalence, ContractionIdentity) {
    auto ctx = Context::free({"x"});
    auto s = parse_expression("T(x)*inv(1 - x*T(x))", ctx);
    auto t = parse_expression("inv(1 - T(x)*x)*T(x)", ctx);
    EquivalenceOptions o;
    o.contraction = 0.95;
    auto v = numeric_equivalence(s, t, {1, 2, 3, 4, 5}, 100, 42, o);
    EXPECT_TRUE(v.equivalent);
    for (auto& st : v.per_size) EXPECT_EQ(st.tested, 20u);
}

TEST(Equivalence, BergmanSeparatesSizes) {
    auto ctx = Context::free({"x", "y"});
    auto b = fixtures::bergman(ctx);
    Expression zero(ctx, expr::constant(0));
    EXPECT_TRUE(numeric_equivalence(b, zero, {2}, 40, 1).equivalent);
    auto v3 = numeric_equivalence(b, zero, {3}, 40, 1);
    ASSERT_FALSE(v3.equivalent);
    EXPECT_EQ(v3.witness->n, 3u);
    Expression one(ctx, expr::constant(1));
    EXPECT_TRUE(numeric_equivalence(b, one, {3}, 40, 1, {1e-6}).equivalent);
}

TEST(Equivalence, SelfAndDeterminism) {
    auto ctx = Context::free({"x"});
    auto e = parse_expression("inv(2 + x*T(x))*x", ctx);
    auto a = numeric_equivalence(e, e, {3}, 10, 7);
    EXPECT_TRUE(a.equivalent);
    auto f = parse_expression("x", ctx);
    auto v1 = numeric_equivalence(e, f, {2, 3}, 10, 7), v2 = numeric_equivalence(e, f, {2, 3}, 10, 7);
    ASSERT_FALSE(v1.equivalent);
    EXPECT_EQ(v1.witness->mats[0], v2.witness->mats[0]);
}

TEST(Equivalence, TransposeOfInverse) {
    auto ctx = Context::free({"x", "y"});
    auto a = parse_expression("T(inv(x*y + 2))", ctx), b = parse_expression("inv(T(x*y + 2))", ctx);
    EXPECT_TRUE(numeric_equivalence(a, b, {1, 3, 4}, 30, 3).equivalent);
}

TEST(Equivalence, AllOutsideDomainIsInconclusive) {
    auto ctx = Context::symmetric({"x"});
    auto a = parse_expression("inv(x - x)", ctx);
    EXPECT_THROW(numeric_equivalence(a, a, {2}, 5, 1), InconclusiveError);
}

TEST(Serialize, PushTransposeMatchesEvaluation) {
    auto ctx = Context::free({"x", "y"});
    auto e = parse_expression("T(x*inv(y + 3)*T(y))", ctx);
    Expression p(ctx, expr::push_transpose(*ctx, e.root));
    EXPECT_TRUE(numeric_equivalence(e, p, {3}, 10, 2).equivalent);
}
