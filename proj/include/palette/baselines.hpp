#pragma once

#include <span>

#include "palette/providers.hpp"

namespace palette {

/// softmax(sum_i weights[i] * log p_i(x)). Negative weights bias away from
/// a term; the output is a valid distribution for any finite weights.
TokenDistribution weighted_log_linear(std::span<const TokenDistribution> dists,
                                      std::span<const double> weights);

/// Model-level weighted log-linear formula: each term pairs a model with a
/// signed weight. Needs at least one term; all models share one vocabulary.
struct WeightedFormula {
    struct Term {
        ModelPtr model;
        double weight = 1.0;
    };
    std::vector<Term> terms;

    void validate() const;

    /// Queries every term's model at `ctx` and mixes the results.
    TokenDistribution evaluate(const Context& ctx) const;
};

/// Token-wise maximum of two distributions, renormalized.
TokenDistribution union_combine(const TokenDistribution& a, const TokenDistribution& b);

/// probs proportional to base(x) * score(x), scores in [0, 1]. Throws
/// Errc::degenerate_product when every token is zeroed out.
TokenDistribution classifier_guided(const TokenDistribution& base,
                                    std::span<const double> scores);

}  // namespace palette
