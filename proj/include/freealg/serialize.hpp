#pragma once

#include <freealg/pencils.hpp>
#include <freealg/positivity.hpp>

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace freealg {

using Json = nlohmann::ordered_json;

inline Json context_to_json(const Context& ctx) {
    Json a = Json::array();
    for (auto& v : ctx.vars()) a.push_back({{"name", v.name}, {"kind", to_string(v.kind)}, {"class", to_string(v.cls)}});
    return a;
}

inline ContextPtr context_from_json(const Json& j) {
    std::vector<VariableSpec> specs;
    for (auto& v : j) {
        VariableSpec s;
        s.name = v.at("name").get<std::string>();
        auto kind = v.value("kind", std::string("symmetric"));
        if (kind != "symmetric" && kind != "free") throw ContextError("unknown variable kind '" + kind + "'");
        s.kind = kind == "free" ? VarKind::free : VarKind::symmetric;
        auto cls = v.value("class", std::string("x"));
        if (cls == "x") s.cls = VarClass::x;
        else if (cls == "h") s.cls = VarClass::h;
        else if (cls == "a") s.cls = VarClass::a;
        else throw ContextError("unknown variable class '" + cls + "'");
        specs.push_back(s);
    }
    return Context::make(std::move(specs));
}

inline Json word_to_json(const Word& w, const Context& ctx) {
    Json a = Json::array();
    for (auto& l : w) a.push_back(letter_text(l, ctx));
    return a;
}

inline Word word_from_json(const Json& j, const Context& ctx) {
    Word w;
    for (auto& s : j) {
        auto t = s.get<std::string>();
        bool tr = t.size() > 3 && t.rfind("T(", 0) == 0 && t.back() == ')';
        auto name = tr ? t.substr(2, t.size() - 3) : t;
        auto i = ctx.index(name);
        if (tr && ctx.is_symmetric(i)) tr = false;
        w.push_back({static_cast<std::uint32_t>(i), tr});
    }
    return w;
}

// {"variables": [...], "terms": [{"coeff": "p/q", "word": [...]}], "text": ...}
inline Json polynomial_to_json(const Polynomial& p) {
    Json terms = Json::array();
    for (auto& [w, c] : p.terms()) terms.push_back({{"coeff", to_string(c)}, {"word", word_to_json(w, *p.context())}});
    return {{"variables", context_to_json(*p.context())}, {"terms", terms}, {"text", p.str()}};
}

inline Polynomial polynomial_from_json(const Json& j, ContextPtr ctx = nullptr) {
    if (!ctx) ctx = context_from_json(j.at("variables"));
    Polynomial p(ctx);
    for (auto& t : j.at("terms")) p.add_term(word_from_json(t.at("word"), *ctx), parse_rational(t.at("coeff").get<std::string>()));
    return p;
}

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::constant: return "constant";
        case NodeKind::variable: return "variable";
        case NodeKind::sum: return "sum";
        case NodeKind::product: return "product";
        case NodeKind::inverse: return "inverse";
        case NodeKind::transpose: return "transpose";
    }
    return "?";
}

// {"variables": [...], "nodes": [{"id", "kind", ...}], "root": id}; children precede parents.
inline Json expression_to_json(const Expression& e) {
    Json nodes = Json::array();
    std::map<const ExprNode*, std::size_t> ids;
    auto visit = [&](auto&& self, const Expr& n) -> std::size_t {
        if (auto it = ids.find(n.get()); it != ids.end()) return it->second;
        Json kids = Json::array();
        for (auto& c : n->children) kids.push_back(self(self, c));
        std::size_t id = nodes.size();
        Json node = {{"id", id}, {"kind", to_string(n->kind)}};
        if (n->kind == NodeKind::constant) node["value"] = to_string(n->value);
        else if (n->kind == NodeKind::variable) {
            node["name"] = (*e.ctx)[n->var].name;
            node["transposed"] = n->transposed;
        } else node["children"] = kids;
        nodes.push_back(node);
        ids[n.get()] = id;
        return id;
    };
    std::size_t root = visit(visit, e.root);
    return {{"variables", context_to_json(*e.ctx)}, {"nodes", nodes}, {"root", root}, {"text", format_expression(e)}};
}

inline Expression expression_from_json(const Json& j, ContextPtr ctx = nullptr) {
    if (!ctx) ctx = context_from_json(j.at("variables"));
    std::vector<Expr> built;
    for (auto& n : j.at("nodes")) {
        if (n.at("id").get<std::size_t>() != built.size()) throw ContractError("expression nodes must be numbered in order");
        auto kind = n.at("kind").get<std::string>();
        std::vector<Expr> kids;
        if (n.contains("children"))
            for (auto& c : n["children"]) {
                auto k = c.get<std::size_t>();
                if (k >= built.size()) throw ContractError("expression node refers forward");
                kids.push_back(built[k]);
            }
        auto one = [&] {
            if (kids.size() != 1) throw ContractError(kind + " node needs one child");
            return kids[0];
        };
        if (kind == "constant") built.push_back(expr::constant(parse_rational(n.at("value").get<std::string>())));
        else if (kind == "variable") {
            auto i = ctx->index(n.at("name").get<std::string>());
            built.push_back(expr::variable(*ctx, i, n.value("transposed", false) && !ctx->is_symmetric(i)));
        } else if (kind == "sum") built.push_back(expr::sum(std::move(kids)));
        else if (kind == "product") built.push_back(expr::product(std::move(kids)));
        else if (kind == "inverse") built.push_back(expr::inverse(one()));
        else if (kind == "transpose") built.push_back(expr::transpose(*ctx, one()));
        else throw ContractError("unknown expression node kind '" + kind + "'");
    }
    auto root = j.at("root").get<std::size_t>();
    if (root >= built.size()) throw ContractError("expression root out of range");
    return Expression(ctx, built[root]);
}

inline Json matrix_to_json(const Eigen::MatrixXd& M) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const Json& j) {
    std::size_t r = j.size(), c = r ? j[0].size() : 0;
    Eigen::MatrixXd M(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (j[i].size() != c) throw ContractError("matrix rows have different lengths");
        for (std::size_t k = 0; k < c; ++k) M(i, k) = j[i][k].get<double>();
    }
    return M;
}

inline Json rational_matrix_to_json(const RationalMatrix& M) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < M.cols(); ++j) r.push_back(to_string(M(i, j)));
        rows.push_back(r);
    }
    return rows;
}

inline Json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd vector_from_json(const Json& j) {
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// {"n": n, "matrices": [[row-major entries], ...]}
inline Json tuple_to_json(const MatrixTuple& X) {
    Json mats = Json::array();
    for (auto& M : X.mats) {
        Json flat = Json::array();
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            for (Eigen::Index j = 0; j < M.cols(); ++j) flat.push_back(M(i, j));
        mats.push_back(flat);
    }
    return {{"n", X.n}, {"matrices", mats}};
}

inline MatrixTuple tuple_from_json(const Json& j) {
    MatrixTuple X;
    X.n = j.at("n").get<std::size_t>();
    for (auto& flat : j.at("matrices")) {
        if (flat.size() != X.n * X.n) throw ContractError("tuple matrix needs n*n entries");
        Eigen::MatrixXd M(X.n, X.n);
        for (std::size_t i = 0; i < X.n; ++i)
            for (std::size_t k = 0; k < X.n; ++k) M(i, k) = flat[i * X.n + k].get<double>();
        X.mats.push_back(M);
    }
    return X;
}

// {"variables": [names], "A0": rows, "A": [rows, ...]}
inline Json pencil_to_json(const AffineLinearPencil& L) {
    Json names = Json::array(), A = Json::array();
    for (auto& v : L.ctx->vars()) names.push_back(v.name);
    for (auto& M : L.A) A.push_back(matrix_to_json(M));
    return {{"variables", names}, {"A0", matrix_to_json(L.A0)}, {"A", A}};
}

inline AffineLinearPencil pencil_from_json(const Json& j) {
    std::vector<std::string> names;
    if (j.contains("variables")) names = j.at("variables").get<std::vector<std::string>>();
    else
        for (std::size_t k = 0; k < j.at("A").size(); ++k) names.push_back("x" + std::to_string(k + 1));
    std::vector<Eigen::MatrixXd> A;
    for (auto& M : j.at("A")) A.push_back(matrix_from_json(M));
    return AffineLinearPencil(Context::symmetric(names), matrix_from_json(j.at("A0")), std::move(A));
}

inline Json square_terms_to_json(const std::vector<SquareTerm>& terms) {
    Json a = Json::array();
    for (auto& t : terms) {
        Json f = Json::array();
        for (auto& p : t.f) f.push_back(p.str());
        a.push_back({{"scale", to_string(t.scale)}, {"f", f}});
    }
    return a;
}

inline Json sos_certificate_to_json(const SosCertificate& c, const Context& ctx) {
    Json basis = Json::array();
    for (auto& w : c.basis) basis.push_back(word_text(w, ctx));
    return {{"exact", c.exact},       {"residual", c.residual}, {"min_eig", c.min_eig},
            {"basis", basis},         {"gram", matrix_to_json(c.gram)}, {"squares", square_terms_to_json(c.squares)}};
}

inline Json wsos_certificate_to_json(const WsosCertificate& c, const Context& ctx) {
    Json j = {{"exact", c.exact},
              {"residual", c.residual},
              {"degree_cap", c.degree_cap},
              {"bound", c.bound_used == DegreeBound::floor ? "floor" : "ceil"},
              {"weight_degree", c.weight_degree ? Json(*c.weight_degree) : Json(nullptr)},
              {"sos", sos_certificate_to_json(c.sos, ctx)},
              {"weights", square_terms_to_json(c.weights)}};
    return j;
}

inline Json quadratic_witness_to_json(const QuadraticWitness& w) {
    return {{"X", tuple_to_json(w.X)},
            {"z_eigenvalue", w.z_eigenvalue},
            {"z_eigenvector", vector_to_json(w.z_eigenvector)},
            {"N_recipe", w.N_recipe},
            {"N_used", w.N_used},
            {"q_value", w.q_value},
            {"scale", w.scale},
            {"verified", w.verified},
            {"W", tuple_to_json(w.W)},
            {"H", tuple_to_json(w.H)},
            {"omega", vector_to_json(w.omega)}};
}

inline Json nonconvexity_to_json(const NonconvexitySearch& s) {
    Json j = {{"status", s.found() ? "witness" : "not-found"},
              {"candidates", s.candidates},
              {"best_midpoint", s.best_midpoint},
              {"options",
               {{"n", s.options.n}, {"budget", s.options.budget}, {"seed", s.options.seed}, {"shrink", s.options.shrink}}}};
    if (s.witness) {
        auto& w = *s.witness;
        j["witness"] = {{"X", tuple_to_json(w.X)},
                        {"Y", tuple_to_json(w.Y)},
                        {"midpoint", tuple_to_json(w.M)},
                        {"x_margin", w.x_margin},
                        {"y_margin", w.y_margin},
                        {"midpoint_eigenvalue", w.midpoint.value},
                        {"midpoint_eigenvector", vector_to_json(w.midpoint.vector)}};
    }
    return j;
}

}  // namespace freealg
