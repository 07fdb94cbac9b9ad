#pragma once

#include <freealg/expressions.hpp>

#include <map>
#include <vector>

namespace freealg {

// Pairs state variables with direction variables inside an extended context.
struct DirectionMap {
    ContextPtr ctx;
    std::map<std::size_t, std::size_t> dir;  // x index -> h index

    std::vector<std::size_t> state_vars() const {
        std::vector<std::size_t> v;
        for (auto& [x, h] : dir) v.push_back(x);
        return v;
    }
    std::vector<std::size_t> direction_vars() const {
        std::vector<std::size_t> v;
        for (auto& [x, h] : dir) v.push_back(h);
        return v;
    }
};

inline std::string default_direction_name(const std::string& x) {
    if (!x.empty() && x[0] == 'x') return "h" + x.substr(1);
    return "h_" + x;
}

// Declares (or reuses) h-class partners for the given variables; each inherits its variable's kind.
inline DirectionMap with_directions(const ContextPtr& ctx, const std::vector<std::size_t>& vars,
                                    const std::vector<std::string>& names = {}) {
    std::vector<VariableSpec> extra;
    DirectionMap m;
    std::size_t next = ctx->size();
    std::map<std::size_t, std::size_t> dir;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        const auto& spec = (*ctx)[vars[k]];
        std::string name = k < names.size() ? names[k] : default_direction_name(spec.name);
        if (auto existing = ctx->find(name)) {
            const auto& e = (*ctx)[*existing];
            if (e.cls != VarClass::h || e.kind != spec.kind)
                throw ContextError("direction name '" + name + "' already names a different variable");
            dir[vars[k]] = *existing;
            continue;
        }
        extra.push_back({name, spec.kind, VarClass::h});
        dir[vars[k]] = next++;
    }
    m.ctx = extra.empty() ? ctx : ctx->extended(extra);
    m.dir = std::move(dir);
    return m;
}

// Directions for every x-class variable of the context.
inline DirectionMap with_directions(const ContextPtr& ctx) { return with_directions(ctx, ctx->of_class(VarClass::x)); }

inline std::size_t factorial(std::size_t k) {
    std::size_t f = 1;
    for (std::size_t i = 2; i <= k; ++i) f *= i;
    return f;
}

// ℓ! times the t^ℓ coefficient of p(x + t h).
inline Polynomial directional_derivative(const Polynomial& p, std::size_t order, const DirectionMap& dm) {
    Polynomial out(dm.ctx);
    if (order == 0) return p.in_context(dm.ctx);
    Rational scale(static_cast<long>(factorial(order)));
    for (auto& [w, c] : p.terms()) {
        std::vector<std::size_t> pos;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (dm.dir.count(w[i].var)) pos.push_back(i);
        if (pos.size() < order) continue;
        std::vector<bool> pick(pos.size(), false);
        std::fill(pick.begin(), pick.begin() + order, true);
        do {
            Word v = w;
            for (std::size_t k = 0; k < pos.size(); ++k)
                if (pick[k]) v[pos[k]].var = static_cast<std::uint32_t>(dm.dir.at(w[pos[k]].var));
            out.add_term(v, c * scale);
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return out;
}

inline Polynomial directional_derivative(const Polynomial& p, std::size_t order = 1) {
    return directional_derivative(p, order, with_directions(p.context()));
}

inline Polynomial hessian(const Polynomial& p, const DirectionMap& dm) { return directional_derivative(p, 2, dm); }
inline Polynomial hessian(const Polynomial& p) { return directional_derivative(p, 2); }

namespace detail {

inline Expr derive_once(const Context& ctx, const DirectionMap& dm, const Expr& e,
                        std::unordered_map<const ExprNode*, Expr>& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    Expr r;
    switch (e->kind) {
        case NodeKind::constant: r = expr::constant(0); break;
        case NodeKind::variable: {
            auto it = dm.dir.find(e->var);
            r = it == dm.dir.end() ? expr::constant(0) : expr::variable(ctx, it->second, e->transposed);
            break;
        }
        case NodeKind::sum: {
            std::vector<Expr> terms;
            for (auto& c : e->children) terms.push_back(derive_once(ctx, dm, c, memo));
            r = expr::add(terms);
            break;
        }
        case NodeKind::product: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                Expr d = derive_once(ctx, dm, e->children[i], memo);
                if (expr::is_constant(d, 0)) continue;
                std::vector<Expr> f = e->children;
                f[i] = d;
                terms.push_back(expr::mul(f));
            }
            r = expr::add(terms);
            break;
        }
        case NodeKind::inverse: {
            Expr d = derive_once(ctx, dm, e->children[0], memo);
            r = expr::is_constant(d, 0) ? expr::constant(0) : expr::mul({expr::constant(-1), e, d, e});
            break;
        }
        case NodeKind::transpose: {
            Expr d = derive_once(ctx, dm, e->children[0], memo);
            r = expr::transpose(ctx, d);
            break;
        }
    }
    memo.emplace(e.get(), r);
    return r;
}

}  // namespace detail

// Repeated first derivatives with h held fixed give the ℓ-th directional derivative.
inline Expression directional_derivative(const Expression& e, std::size_t order, const DirectionMap& dm) {
    if (!e.ctx->prefix_of(*dm.ctx)) throw ContextError("direction map does not extend the expression context");
    Expr cur = e.root;
    for (std::size_t k = 0; k < order; ++k) {
        std::unordered_map<const ExprNode*, Expr> memo;
        cur = detail::derive_once(*dm.ctx, dm, cur, memo);
    }
    return Expression(dm.ctx, cur);
}

inline Expression directional_derivative(const Expression& e, std::size_t order = 1) {
    return directional_derivative(e, order, with_directions(e.ctx));
}

// (s + sᵀ)/2
inline Expression symmetrize(const Expression& e) {
    return Expression(e.ctx, expr::mul({expr::constant(Rational(1, 2)), expr::add({e.root, expr::transpose(*e.ctx, e.root)})}));
}

struct RelaxedHessianParams {
    Rational lambda = 0;
    Rational delta = 0;
};

// Σ_j Σ_{deg w ≤ k} wᵀ h_j² w over words in the state variables.
inline Polynomial tilde_v_square(const DirectionMap& dm, std::size_t k) {
    const auto& ctx = *dm.ctx;
    auto words = words_up_to(alphabet_of(ctx, dm.state_vars()), k);
    Polynomial out(dm.ctx);
    for (auto [x, h] : dm.dir) {
        Polynomial hj = Polynomial::variable(dm.ctx, h);
        // For a free direction, h_jᵀ h_j plays the role of h_j².
        Polynomial sq = Polynomial::variable(dm.ctx, h, true) * hj;
        for (auto& w : words) {
            Polynomial mw = Polynomial::monomial(dm.ctx, w);
            out += mw.transpose() * sq * mw;
        }
    }
    return out;
}

inline Polynomial relaxed_hessian(const Polynomial& p, const RelaxedHessianParams& prm, const DirectionMap& dm) {
    if (!p.is_symmetric()) throw ContractError("relaxed Hessian needs a symmetric polynomial");
    Polynomial q = hessian(p, dm);
    if (prm.lambda != 0) {
        Polynomial d1 = directional_derivative(p, 1, dm);
        q += (d1.transpose() * d1) * prm.lambda;
    }
    if (prm.delta != 0 && p.degree() && *p.degree() >= 1) q += tilde_v_square(dm, *p.degree() - 1) * prm.delta;
    return q;
}

inline Polynomial relaxed_hessian(const Polynomial& p, const RelaxedHessianParams& prm) {
    return relaxed_hessian(p, prm, with_directions(p.context()));
}

}  // namespace freealg
