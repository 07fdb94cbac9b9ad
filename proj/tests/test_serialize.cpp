#include <freealg/fixtures.hpp>
#include <freealg/serialize.hpp>

#include <gtest/gtest.h>

using namespace freealg;

TEST(Serialize, PolynomialRoundTrip) {
    auto ctx = Context::make({{"x", VarKind::symmetric, VarClass::x}, {"a", VarKind::free, VarClass::x}});
    auto p = parse_polynomial("3/2 - x*T(a)*a + a^2 - 7*x^3", ctx);
    auto j = polynomial_to_json(p);
    auto q = polynomial_from_json(Json::parse(j.dump()));
    EXPECT_EQ(q.str(), p.str());
    EXPECT_EQ(parse_polynomial(j["text"].get<std::string>(), q.context()).str(), p.str());
    EXPECT_EQ(j["variables"][1]["kind"], "free");
}

TEST(Serialize, ExpressionNodeList) {
    auto ctx = Context::free({"x", "y"});
    auto e = parse_expression("T(x)*inv(1 - x*T(x)) + 2/3*y^2", ctx);
    auto j = Json::parse(expression_to_json(e).dump());
    auto& nodes = j["nodes"];
    for (auto& n : nodes)
        if (n.contains("children"))
            for (auto& c : n["children"]) EXPECT_LT(c.get<std::size_t>(), n["id"].get<std::size_t>());
    EXPECT_EQ(j["root"].get<std::size_t>() + 1, nodes.size());
    auto back = expression_from_json(j);
    EXPECT_EQ(format_expression(back), format_expression(e));
    EXPECT_TRUE(expr::structurally_equal(back.root, parse_expression(format_expression(e), back.ctx).root));
}

TEST(Serialize, TupleRoundTrip) {
    Rng rng(2);
    auto ctx = Context::symmetric({"x", "y"});
    auto X = sample_tuple(3, *ctx, Distribution::gaussian_symmetric, rng);
    auto Y = tuple_from_json(Json::parse(tuple_to_json(X).dump()));
    ASSERT_EQ(Y.n, 3u);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(X.mats[j], Y.mats[j]);
    EXPECT_THROW(tuple_from_json(Json::parse(R"({"n": 2, "matrices": [[1, 2, 3]]})")), ContractError);
}

TEST(Serialize, PencilRoundTrip) {
    auto ctx = Context::symmetric({"x1", "x2", "y1", "y2"});
    auto L = fixtures::tv_projection_pencil(ctx, 1.0);
    auto M = pencil_from_json(Json::parse(pencil_to_json(L).dump()));
    EXPECT_EQ(M.A0, L.A0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(M.A[j], L.A[j]);
    EXPECT_EQ((*M.ctx)[2].name, "y1");
}

TEST(Serialize, SosCertificateReverifies) {
    auto ctx = Context::symmetric({"x"});
    auto f = parse_polynomial("x^2 - 2*x + 2", ctx);
    auto r = sos_decompose(f);
    ASSERT_TRUE(r.certificate);
    auto j = Json::parse(sos_certificate_to_json(*r.certificate, *ctx).dump());
    Polynomial sum(ctx);
    for (auto& t : j["squares"]) {
        auto s = parse_polynomial(t["f"][0].get<std::string>(), ctx);
        sum += s.transpose() * s * parse_rational(t["scale"].get<std::string>());
    }
    EXPECT_EQ((sum - f).str(), "0");
}

TEST(Serialize, WitnessIsDeterministic) {
    auto a = nonconvexity_to_json(tv_nonconvexity_search(2, 100000, 4)).dump();
    auto b = nonconvexity_to_json(tv_nonconvexity_search(2, 100000, 4)).dump();
    EXPECT_EQ(a, b);
    auto j = Json::parse(a);
    ASSERT_EQ(j["status"], "witness");
    auto ctx = Context::symmetric({"x1", "x2"});
    auto p = tv_polynomial(ctx);
    EXPECT_LE(min_eigenvalue(evaluate(p, tuple_from_json(j["witness"]["midpoint"]))), -1e-6);
    EXPECT_GE(min_eigenvalue(evaluate(p, tuple_from_json(j["witness"]["X"]))), 1e-6);
}
