#pragma once

#include <freealg/evaluator.hpp>

#include <optional>
#include <vector>

namespace freealg {

struct EquivalenceOptions {
    double tol = 1e-10;
    Distribution dist = Distribution::gaussian_general;
    // When positive, each sampled matrix is rescaled to spectral norm U(0,1)·contraction.
    double contraction = 0.0;
};

struct SizeStats {
    std::size_t n = 0;
    std::size_t tested = 0;
    std::size_t skipped = 0;
    double max_rel_diff = 0.0;
};

struct EquivalenceVerdict {
    bool equivalent = true;
    std::optional<MatrixTuple> witness;
    double witness_diff = 0.0;
    std::vector<SizeStats> per_size;
};

inline double spectral_norm(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(0);
}

// Difference in operator norm relative to max(1, ‖A‖, ‖B‖).
inline double relative_difference(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    double scale = std::max({1.0, spectral_norm(A), spectral_norm(B)});
    return spectral_norm(A - B) / scale;
}

inline MatrixTuple sample_for_equivalence(std::size_t n, const Context& ctx, const EquivalenceOptions& o, Rng& rng) {
    MatrixTuple X = sample_tuple(n, ctx, o.dist, rng);
    if (o.contraction > 0) {
        std::uniform_real_distribution<double> U(0.05, 1.0);
        for (auto& M : X.mats) {
            double s = spectral_norm(M);
            if (s > 0) M *= o.contraction * U(rng) / s;
        }
    }
    return X;
}

// Sampling-based verdict; samples are spread round-robin over the sizes.
inline EquivalenceVerdict numeric_equivalence(const Expression& a, const Expression& b, const std::vector<std::size_t>& sizes,
                                              std::size_t samples, std::uint64_t seed, EquivalenceOptions o = {}) {
    if (samples == 0) throw ContractError("numeric equivalence needs at least one sample");
    if (sizes.empty()) throw ContractError("numeric equivalence needs at least one size");
    auto ctx = join_contexts(a.ctx, b.ctx);
    Rng rng(seed);
    EquivalenceVerdict v;
    for (auto n : sizes) v.per_size.push_back({n, 0, 0, 0.0});
    std::size_t tested = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        auto& st = v.per_size[s % sizes.size()];
        MatrixTuple X = sample_for_equivalence(st.n, *ctx, o, rng);
        Eigen::MatrixXd A, B;
        try {
            A = evaluate(a, X);
            B = evaluate(b, X);
        } catch (const DomainError&) {
            ++st.skipped;
            continue;
        }
        ++st.tested;
        ++tested;
        double d = relative_difference(A, B);
        st.max_rel_diff = std::max(st.max_rel_diff, d);
        if (d > o.tol && v.equivalent) {
            v.equivalent = false;
            v.witness = X;
            v.witness_diff = d;
        }
    }
    if (tested == 0) throw InconclusiveError("every sample fell outside a domain of regularity");
    return v;
}

}  // namespace freealg
