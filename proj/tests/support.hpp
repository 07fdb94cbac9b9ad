#pragma once

#include <freealg/ldl.hpp>

#include <random>

namespace freealg::fixture {

inline Polynomial random_polynomial(const ContextPtr& ctx, std::size_t max_deg, std::size_t max_terms, std::mt19937_64& rng) {
    std::vector<std::size_t> vars(ctx->size());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
    auto words = words_up_to(alphabet_of(*ctx, vars), max_deg);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), count(1, max_terms);
    std::uniform_int_distribution<int> coef(-3, 3);
    Polynomial p(ctx);
    for (std::size_t k = count(rng); k > 0; --k) {
        int c = coef(rng);
        p.add_term(words[pick(rng)], c == 0 ? 1 : c);
    }
    return p;
}

// Symmetric matrix of polynomials; about a third of the diagonal and off-diagonal entries are zero.
inline MatrixPolynomial random_symmetric_matrix(const ContextPtr& ctx, std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> die(0, 2);
    MatrixPolynomial M(ctx, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            if (die(rng) == 0) continue;
            Polynomial p = random_polynomial(ctx, 2, 3, rng);
            if (i == j) {
                M(i, i) = p + p.transpose();
            } else {
                M(i, j) = p;
                M(j, i) = p.transpose();
            }
        }
    return M;
}

// Random symmetric homogeneous quartic.
inline Polynomial random_symmetric_quartic(const ContextPtr& ctx, std::mt19937_64& rng, std::size_t terms = 3) {
    std::vector<std::size_t> vars(ctx->size());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
    auto words = words_of_length(alphabet_of(*ctx, vars), 4);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> coef(1, 3);
    Polynomial p(ctx);
    for (std::size_t t = 0; t < terms; ++t) p.add_term(words[pick(rng)], coef(rng));
    return p + p.transpose();
}

}  // namespace freealg::fixture
