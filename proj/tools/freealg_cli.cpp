#include <freealg/bvmm.hpp>
#include <freealg/equivalence.hpp>
#include <freealg/geometry.hpp>
#include <freealg/ldl.hpp>
#include <freealg/serialize.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace freealg;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, failure = 1, parse_failure = 2, indeterminate = 3 };

struct Config {
    std::uint64_t seed = 1;
    double tol = 1e-8;
    std::size_t samples = 20;
    std::vector<std::size_t> sizes{2};
    std::string format = "text";
    std::string export_sdpa;
    std::vector<std::string> vars, free_vars, hvars;
};

struct Report {
    std::string command;
    Json result = Json::object();
    int exit = ok;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Inline JSON when the argument starts with '{' or '[', a file path otherwise.
Json load_json(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t\n");
    std::string text = first != std::string::npos && (arg[first] == '{' || arg[first] == '[') ? arg : slurp(arg);
    return Json::parse(text);
}

std::string input_text(const std::string& inline_text, const std::string& file) {
    if (!file.empty()) return slurp(file);
    if (inline_text.empty()) throw ContractError("no input given; pass text or -f FILE");
    return inline_text;
}

// Declared variables, or every identifier in the inputs as a symmetric variable; names listed in --directions are directions.
ContextPtr context_for(const Config& c, const std::vector<std::string>& texts) {
    std::vector<VariableSpec> specs;
    for (auto& n : c.vars) specs.push_back({n, VarKind::symmetric, VarClass::x});
    for (auto& n : c.free_vars) specs.push_back({n, VarKind::free, VarClass::x});
    if (specs.empty())
        for (auto& t : texts)
            for (auto& id : scan_identifiers(t))
                if (std::none_of(specs.begin(), specs.end(), [&](auto& s) { return s.name == id; }))
                    specs.push_back({id, VarKind::symmetric, VarClass::x});
    for (auto& s : specs)
        if (std::find(c.hvars.begin(), c.hvars.end(), s.name) != c.hvars.end()) s.cls = VarClass::h;
    return Context::make(std::move(specs));
}

Json matrix_of_text(const MatrixPolynomial& M) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < M.cols(); ++j) r.push_back(M(i, j).str());
        rows.push_back(r);
    }
    return rows;
}

Json signature_json(const Signature& s) { return {{"neg", s.neg}, {"zero", s.zero}, {"pos", s.pos}}; }

void export_sdpa(const Config& c, const SdpProblem& P, const std::string& comment) {
    if (c.export_sdpa.empty()) return;
    std::ofstream out(c.export_sdpa);
    if (!out) throw ContractError("cannot write '" + c.export_sdpa + "'");
    write_sdpa(out, P, comment);
}

// Human text derived from the structured result.
void render(std::ostream& os, const Json& j, int indent) {
    std::string pad(indent, ' ');
    auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    auto flat = [](const Json& a) {
        return std::all_of(a.begin(), a.end(), [](const Json& v) { return v.is_primitive(); });
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const Json& v = it.value();
        os << pad << it.key() << ":";
        if (v.is_primitive()) {
            os << " " << scalar(v) << "\n";
        } else if (v.is_array() && flat(v)) {
            os << " [";
            for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << scalar(v[k]);
            os << "]\n";
        } else if (v.is_array()) {
            os << "\n";
            for (auto& e : v) {
                if (e.is_array() && flat(e)) {
                    os << pad << "  [";
                    for (std::size_t k = 0; k < e.size(); ++k) os << (k ? ", " : "") << scalar(e[k]);
                    os << "]\n";
                } else if (e.is_object()) {
                    os << pad << "  -\n";
                    render(os, e, indent + 4);
                } else {
                    os << pad << "  " << e.dump() << "\n";
                }
            }
        } else {
            os << "\n";
            render(os, v, indent + 2);
        }
    }
}

Report cmd_parse(const Config& c, const std::string& text) {
    auto ctx = context_for(c, {text});
    auto e = parse_expression(text, ctx);
    Report r{"parse"};
    r.result["canonical"] = format_expression(e);
    r.result["polynomial"] = e.is_polynomial();
    if (e.is_polynomial()) {
        auto p = e.to_polynomial();
        r.result["symmetric"] = p.is_symmetric();
        r.result["degree"] = p.degree() ? Json(*p.degree()) : Json(nullptr);
        r.result["terms"] = polynomial_to_json(p)["terms"];
    }
    r.result["variables"] = context_to_json(*ctx);
    if (c.format == "json") r.result["expression"] = expression_to_json(e);
    return r;
}

Report cmd_eval(const Config& c, const std::string& text, const std::string& point) {
    auto ctx = context_for(c, {text});
    auto e = parse_expression(text, ctx);
    auto X = validated(tuple_from_json(load_json(point)), *ctx);
    Report r{"eval"};
    r.result["expression"] = format_expression(e);
    r.result["value"] = matrix_to_json(evaluate(e, X));
    return r;
}

Report cmd_derive(const Config& c, const std::string& text, std::size_t order) {
    auto ctx = context_for(c, {text});
    auto dm = with_directions(ctx);
    auto e = parse_expression(text, dm.ctx);
    Report r{"derive"};
    r.result["order"] = order;
    r.result["derivative"] = format_expression(directional_derivative(e, order, dm));
    return r;
}

Report cmd_hessian(const Config& c, const std::string& text, std::optional<std::pair<std::string, std::string>> relaxed) {
    auto ctx = context_for(c, {text});
    auto dm = with_directions(ctx);
    auto p = parse_polynomial(text, dm.ctx);
    Report r{relaxed ? "relaxed-hessian" : "hessian"};
    if (relaxed) {
        RelaxedHessianParams prm{parse_rational(relaxed->first), parse_rational(relaxed->second)};
        r.result["lambda"] = to_string(prm.lambda);
        r.result["delta"] = to_string(prm.delta);
        r.result["relaxed_hessian"] = relaxed_hessian(p, prm, dm).str();
    } else {
        r.result["hessian"] = hessian(p, dm).str();
    }
    return r;
}

Json bvmm_json(const BvMm& rep) {
    Json border = Json::array(), blocks = Json::array();
    for (auto& w : rep.border) border.push_back(word_text(w, *rep.ctx));
    std::size_t nb = rep.border.empty() ? 0 : BvMm::block_index(rep.border.back()) + 1;
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            if (auto B = rep.Zblock(i, j); B && !rep.block_is_zero(i, j))
                blocks.push_back({{"i", i}, {"j", j}, {"Z", matrix_of_text(*B)}});
    return {{"border", border}, {"ell", rep.ell}, {"middle", matrix_of_text(rep.Z)}, {"blocks", blocks}};
}

Report cmd_mm(const Config& c, const std::string& text, bool of_hessian) {
    auto ctx = context_for(c, {text});
    Report r{"mm"};
    if (of_hessian) {
        auto dm = with_directions(ctx);
        auto q = hessian(parse_polynomial(text, dm.ctx), dm);
        r.result["quadratic"] = q.str();
        r.result["representation"] = bvmm_json(extract_bvmm(q, dm));
    } else {
        auto q = parse_polynomial(text, ctx);
        r.result["quadratic"] = q.str();
        r.result["representation"] = bvmm_json(extract_bvmm(q));
    }
    return r;
}

Report cmd_gram(const Config& c, const std::string& text, std::optional<std::size_t> degree) {
    auto ctx = context_for(c, {text});
    auto f = parse_polynomial(text, ctx);
    if (!f.degree()) throw ContractError("gram needs a nonzero polynomial");
    std::size_t d = degree ? *degree : (*f.degree() + 1) / 2;
    auto G = gram_matrix(f, d);
    Json basis = Json::array();
    for (auto& w : G.basis) basis.push_back(word_text(w, *ctx));
    Report r{"gram"};
    r.result["degree"] = d;
    r.result["basis"] = basis;
    r.result["gram"] = rational_matrix_to_json(G.G);
    r.result["reexpands"] = (G.reexpand() - f).is_zero();
    return r;
}

Report cmd_sos(const Config& c, const std::string& text) {
    auto ctx = context_for(c, {text});
    auto f = parse_polynomial(text, ctx);
    auto res = sos_decompose(f);
    export_sdpa(c, res.problem, "sos feasibility for " + f.str());
    Report r{"sos"};
    r.result["polynomial"] = f.str();
    r.result["status"] = to_string(res.status);
    if (!res.message.empty()) r.result["message"] = res.message;
    if (res.certificate) r.result["certificate"] = sos_certificate_to_json(*res.certificate, *ctx);
    if (res.status == SdpStatus::indeterminate) r.exit = indeterminate;
    return r;
}

Report cmd_wsos(const Config& c, const std::string& text, const std::string& pencil, const std::string& bound) {
    auto L = pencil_from_json(load_json(pencil));
    auto p = parse_polynomial(text, L.ctx);
    WsosOptions o;
    o.bound = bound == "floor" ? DegreeBound::floor : bound == "ceil" ? DegreeBound::ceil : DegreeBound::automatic;
    auto res = wsos_decompose(p, L, o);
    export_sdpa(c, res.problem, "weighted sos feasibility for " + p.str());
    Report r{"wsos"};
    r.result["polynomial"] = p.str();
    r.result["status"] = to_string(res.status);
    if (!res.message.empty()) r.result["message"] = res.message;
    if (res.certificate) r.result["certificate"] = wsos_certificate_to_json(*res.certificate, *L.ctx);
    if (res.status == SdpStatus::indeterminate) r.exit = indeterminate;
    return r;
}

Report cmd_ldl(const Config& c, const std::string& text, const std::string& point) {
    auto ctx = context_for(c, {text});
    auto M = parse_expr_matrix(text, ctx);
    auto dec = ldl_decompose(M);
    Report r{"ldl"};
    r.result["permutation"] = dec.perm;
    Json blocks = Json::array();
    for (auto& b : dec.blocks) blocks.push_back({{"kind", to_string(b.kind)}, {"start", b.start}, {"size", b.size}});
    r.result["blocks"] = blocks;
    auto entries = [](const ExprMatrix& M) {
        Json rows = Json::array();
        for (std::size_t i = 0; i < M.n; ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < M.n; ++j) row.push_back(format_expression(M.entry(i, j)));
            rows.push_back(row);
        }
        return rows;
    };
    r.result["L"] = entries(dec.L);
    r.result["D"] = entries(dec.D);
    if (!point.empty()) {
        auto X = validated(tuple_from_json(load_json(point)), *ctx);
        auto eq = ldl_psd_equivalence(M, dec, X, c.tol);
        r.result["at_point"] = {{"m_signature", signature_json(eq.m_signature)},
                                {"d_signature", signature_json(eq.d_signature)},
                                {"reconstruction_error", eq.reconstruction_error},
                                {"equivalent", eq.equivalent()}};
    }
    return r;
}

Report cmd_pencil(const Config& c, const std::string& sub, const std::string& pencil, const std::string& point) {
    auto L = pencil_from_json(load_json(pencil));
    Report r{"pencil " + sub};
    if (sub == "member") {
        auto m = pencil_membership(L, tuple_from_json(load_json(point)), 0.0);
        r.result["verdict"] = m.inside ? "inside" : "outside";
        r.result["margin"] = m.margin;
        if (!m.inside) r.result["eigenvector"] = vector_to_json(m.eigenvector);
    } else if (sub == "normalize") {
        r.result["pencil"] = pencil_to_json(monic_normalize(L));
    } else {
        LevelOneOptions o;
        o.seed = c.seed;
        auto a = pencil_level_one_analysis(L, o);
        r.result["empty"] = a.empty;
        r.result["bounded"] = a.bounded;
        r.result["interior_margin"] = a.interior_margin;
        if (!a.empty) r.result["interior_point"] = a.interior;
        if (a.escaping_ray) r.result["escaping_ray"] = *a.escaping_ray;
        r.result["rays_tested"] = a.rays_tested;
        if (!a.empty && a.bounded) r.result["max_exit"] = a.max_exit;
    }
    return r;
}

Report cmd_set_member(const Config& c, const std::string& text, const std::string& point) {
    auto ctx = context_for(c, {text});
    auto p = parse_polynomial(text, ctx);
    auto res = dp_component_membership(p, validated(tuple_from_json(load_json(point)), *ctx));
    Report r{"set member"};
    r.result["verdict"] = to_string(res.status);
    r.result["margin"] = res.margin;
    r.result["path_min"] = res.path_min;
    r.result["steps"] = res.steps;
    if (res.status == ComponentStatus::disconnected_evidence) r.result["bracket"] = {res.bracket_lo, res.bracket_hi};
    return r;
}

Report cmd_variety(const Config& c, const std::string& text, const std::string& points) {
    auto ctx = context_for(c, {text});
    auto p = parse_polynomial(text, ctx);
    auto j = load_json(points);
    if (j.is_object()) j = Json::array({j});
    Report r{"variety probe"};
    Json out = Json::array();
    for (auto& e : j) {
        auto X = validated(tuple_from_json(e.at("X")), *ctx);
        auto pt = variety_point(p, X, vector_from_json(e.at("v")));
        Json rep = {{"residual", pt.residual}, {"on_variety", pt.on_variety(c.tol)}};
        if (pt.on_variety(c.tol)) {
            auto cr = probe_point(p, pt, c.tol);
            rep["rank"] = cr.rank;
            rep["codimension"] = cr.codimension;
            rep["full_rank"] = cr.full_rank;
            rep["curvature_margin"] = cr.curvature_margin;
            rep["curvature_positive"] = cr.curvature_positive;
        }
        out.push_back(rep);
    }
    r.result["points"] = out;
    return r;
}

Report cmd_tv(const Config& c, std::size_t n, std::size_t budget) {
    Report r{"tv search"};
    r.result = nonconvexity_to_json(tv_nonconvexity_search(n, budget, c.seed));
    return r;
}

Report cmd_equiv(const Config& c, const std::string& a, const std::string& b, double contraction) {
    auto ctx = context_for(c, {a, b});
    EquivalenceOptions o;
    o.tol = c.tol;
    o.contraction = contraction;
    auto v = numeric_equivalence(parse_expression(a, ctx), parse_expression(b, ctx), c.sizes, c.samples, c.seed, o);
    Report r{"equiv"};
    r.result["equivalent"] = v.equivalent;
    Json per = Json::array();
    for (auto& s : v.per_size) per.push_back({{"n", s.n}, {"tested", s.tested}, {"skipped", s.skipped}});
    r.result["per_size"] = per;
    if (v.witness) {
        r.result["witness"] = tuple_to_json(*v.witness);
        r.result["witness_diff"] = v.witness_diff;
    }
    return r;
}

Report cmd_fock(const Config& c, const std::string& text, std::optional<std::size_t> k) {
    auto ctx = context_for(c, {text});
    auto p = parse_polynomial(text, ctx);
    if (p.is_zero()) throw ContractError("the zero polynomial has no witness");
    auto w = fock_witness(p, k ? *k : *p.degree());
    bool nonzero = false;
    for (std::size_t i = 0; i < w.image.rows(); ++i) nonzero = nonzero || w.image(i, 0) != 0;
    Report r{"fock"};
    r.result["k"] = w.k;
    r.result["size"] = w.basis.size();
    r.result["nonzero"] = nonzero;
    r.result["image"] = rational_matrix_to_json(w.image);
    return r;
}

Report cmd_chsy(const Config& c, std::size_t g, std::size_t d, std::size_t n) {
    Rng rng(c.seed);
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXd Z(n, d);
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index j = 0; j < Z.cols(); ++j) Z(i, j) = N(rng);
    auto res = chsy_codimension(g, Z);
    Report r{"chsy"};
    r.result = {{"g", g}, {"d", d}, {"n", n}, {"rank", res.rank}, {"observed", res.observed}, {"expected", res.expected},
                {"matches", res.matches()}};
    return r;
}

Report cmd_convexity(const Config& c, const std::string& text) {
    auto ctx = context_for(c, {text});
    auto p = parse_polynomial(text, ctx);
    auto v = convexity_probe(p, c.sizes, c.samples, c.seed, c.tol);
    Report r{"convexity"};
    r.result["tested"] = v.tested;
    r.result["min_eig"] = v.min_eig;
    r.result["verdict"] = v.violation_found() ? "not-convex" : "no-violation";
    if (v.violation) {
        r.result["X"] = tuple_to_json(v.violation->X);
        r.result["Y"] = tuple_to_json(v.violation->Y);
        r.result["gap"] = matrix_to_json(v.violation->gap);
        r.result["eigenvalue"] = v.violation->eigenvalue;
    }
    return r;
}

Report cmd_region(const Config& c, const std::string& text, bool of_hessian) {
    auto ctx = context_for(c, {text});
    RegionCheckOptions o;
    o.sizes = c.sizes;
    o.samples = c.samples;
    o.seed = c.seed;
    RegionVerdict v;
    if (of_hessian) {
        auto dm = with_directions(ctx);
        auto q = hessian(parse_polynomial(text, dm.ctx), dm);
        v = middle_matrix_region_check(extract_bvmm(q, dm), std::nullopt, o);
    } else {
        v = middle_matrix_region_check(parse_polynomial(text, ctx), std::nullopt, o);
    }
    Report r{"region"};
    r.result["tested"] = v.tested;
    r.result["min_eig"] = v.min_eig;
    r.result["verdict"] = v.psd_on_samples() ? "psd-on-samples" : "violation";
    if (v.violation) r.result["witness"] = quadratic_witness_to_json(*v.violation);
    return r;
}

Json provenance(const Config& c) {
    return {{"tool", "freealg"}, {"version", kVersion}, {"seed", c.seed}, {"tol", c.tol}, {"samples", c.samples}, {"sizes", c.sizes}};
}

void emit(const Config& c, const Report& r) {
    if (c.format == "json") {
        Json out = {{"command", r.command}, {"provenance", provenance(c)}, {"result", r.result}};
        std::cout << out.dump(2) << "\n";
    } else {
        render(std::cout, r.result, 0);
    }
}

int fail(const Config& c, int code, const std::string& kind, const std::string& msg, std::optional<std::size_t> pos = {}) {
    if (c.format == "json") {
        Json err = {{"error", kind}, {"message", msg}};
        if (pos) err["position"] = *pos;
        std::cout << err.dump(2) << "\n";
    }
    std::cerr << kind << ": " << msg << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free noncommutative polynomial toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    Config cfg;
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--tol", cfg.tol, "Relative tolerance")->capture_default_str();
    app.add_option("--samples", cfg.samples, "Number of random samples")->capture_default_str();
    app.add_option("--sizes", cfg.sizes, "Matrix sizes to sample")->delimiter(',')->allow_extra_args(false);
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--export-sdpa", cfg.export_sdpa, "Write the SDP in SDPA sparse format");
    app.add_option("--vars", cfg.vars, "Symmetric variables, in order")->delimiter(',')->allow_extra_args(false);
    app.add_option("--free", cfg.free_vars, "Free (non-symmetric) variables")->delimiter(',')->allow_extra_args(false);
    app.add_option("--directions", cfg.hvars, "Variables acting as directions in a quadratic")->delimiter(',')->allow_extra_args(false);

    std::string text, file, text2, point, pencil, bound = "auto";
    std::size_t order = 1, g = 1, d = 1, n = 0, level = 2, budget = 100000;
    std::optional<std::size_t> degree, k;
    std::string lambda = "0", delta = "0";
    double contraction = 0;
    bool of_hessian = false;

    auto with_input = [&](CLI::App* s) {
        s->add_option("input", text, "Polynomial or expression text");
        s->add_option("-f,--file", file, "Read the input from a file");
        return s;
    };

    auto* parse = with_input(app.add_subcommand("parse", "Parse and print the canonical form"));
    auto* eval = with_input(app.add_subcommand("eval", "Evaluate on a matrix tuple"));
    eval->add_option("--point", point, "Tuple as JSON or a path")->required();
    auto* derive = with_input(app.add_subcommand("derive", "Directional derivative"));
    derive->add_option("--order", order)->capture_default_str();
    auto* hess = with_input(app.add_subcommand("hessian", "Hessian in the direction variables"));
    auto* rhess = with_input(app.add_subcommand("relaxed-hessian", "Relaxed Hessian"));
    rhess->add_option("--lambda", lambda)->capture_default_str();
    rhess->add_option("--delta", delta)->capture_default_str();
    auto* mm = with_input(app.add_subcommand("mm", "Border vector and middle matrix"));
    mm->add_flag("--hessian", of_hessian, "Take the Hessian first");
    auto* gram = with_input(app.add_subcommand("gram", "Canonical Gram matrix"));
    gram->add_option("--degree", degree);
    auto* sos = with_input(app.add_subcommand("sos", "Sum of squares certificate"));
    auto* wsos = with_input(app.add_subcommand("wsos", "Weighted sum of squares over a monic pencil"));
    wsos->add_option("--pencil", pencil, "Pencil as JSON or a path")->required();
    wsos->add_option("--bound", bound)->check(CLI::IsMember({"auto", "floor", "ceil"}))->capture_default_str();
    auto* ldl = with_input(app.add_subcommand("ldl", "Block LDL of a symbolic symmetric matrix"));
    ldl->add_option("--point", point, "Optional tuple for a signature comparison");

    auto* pen = app.add_subcommand("pencil", "Linear pencil operations");
    pen->require_subcommand(1);
    for (auto name : {"member", "normalize", "analyze"}) {
        auto* s = pen->add_subcommand(name);
        s->add_option("--pencil", pencil, "Pencil as JSON or a path")->required();
        if (std::string(name) == "member") s->add_option("--point", point)->required();
    }
    auto* set = app.add_subcommand("set", "Positivity sets");
    set->require_subcommand(1);
    auto* set_member = with_input(set->add_subcommand("member", "Component-of-zero membership"));
    set_member->add_option("--point", point)->required();
    auto* variety = app.add_subcommand("variety", "Variety points");
    variety->require_subcommand(1);
    auto* probe = with_input(variety->add_subcommand("probe", "Tangent, rank and curvature at points"));
    probe->add_option("--points", point, "Point list as JSON or a path")->required();
    auto* tv = app.add_subcommand("tv", "TV screen");
    tv->require_subcommand(1);
    auto* tv_search = tv->add_subcommand("search", "Search for a nonconvexity witness");
    tv_search->add_option("--n", level)->capture_default_str();
    tv_search->add_option("--budget", budget)->capture_default_str();
    auto* equiv = app.add_subcommand("equiv", "Numerical equivalence of two expressions");
    equiv->add_option("a", text)->required();
    equiv->add_option("b", text2)->required();
    equiv->add_option("--contraction", contraction, "Sample contractions with this norm bound");
    auto* fock = with_input(app.add_subcommand("fock", "Fock-space nonvanishing witness"));
    fock->add_option("--k", k, "Truncation degree");
    auto* chsy = app.add_subcommand("chsy", "Codimension of the CHSY space");
    chsy->add_option("--g", g)->required();
    chsy->add_option("--d", d)->required();
    chsy->add_option("--n", n)->required();
    auto* conv = with_input(app.add_subcommand("convexity", "Random matrix convexity probe"));
    auto* region = with_input(app.add_subcommand("region", "Middle matrix positivity check with a witness"));
    region->add_flag("--hessian", of_hessian, "Take the Hessian first");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        auto in = [&] { return input_text(text, file); };
        Report r;
        if (*parse) r = cmd_parse(cfg, in());
        else if (*eval) r = cmd_eval(cfg, in(), point);
        else if (*derive) r = cmd_derive(cfg, in(), order);
        else if (*hess) r = cmd_hessian(cfg, in(), std::nullopt);
        else if (*rhess) r = cmd_hessian(cfg, in(), std::make_pair(lambda, delta));
        else if (*mm) r = cmd_mm(cfg, in(), of_hessian);
        else if (*gram) r = cmd_gram(cfg, in(), degree);
        else if (*sos) r = cmd_sos(cfg, in());
        else if (*wsos) r = cmd_wsos(cfg, in(), pencil, bound);
        else if (*ldl) r = cmd_ldl(cfg, in(), point);
        else if (*pen) r = cmd_pencil(cfg, pen->get_subcommands().front()->get_name(), pencil, point);
        else if (*set_member) r = cmd_set_member(cfg, in(), point);
        else if (*probe) r = cmd_variety(cfg, in(), point);
        else if (*tv_search) r = cmd_tv(cfg, level, budget);
        else if (*equiv) r = cmd_equiv(cfg, text, text2, contraction);
        else if (*fock) r = cmd_fock(cfg, in(), k);
        else if (*chsy) r = cmd_chsy(cfg, g, d, n);
        else if (*conv) r = cmd_convexity(cfg, in());
        else if (*region) r = cmd_region(cfg, in(), of_hessian);
        emit(cfg, r);
        return r.exit;
    } catch (const ParseError& e) {
        return fail(cfg, parse_failure, "parse error", e.what(), e.position);
    } catch (const Json::parse_error& e) {
        return fail(cfg, parse_failure, "parse error", e.what(), e.byte);
    } catch (const InconclusiveError& e) {
        return fail(cfg, indeterminate, "indeterminate", e.what());
    } catch (const std::exception& e) {
        return fail(cfg, failure, "error", e.what());
    }
}
