#include "palette/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace palette {

TokenDistribution weighted_log_linear(std::span<const TokenDistribution> dists,
                                      std::span<const double> weights) {
    if (dists.empty()) raise(Errc::empty_terms, "weighted combination of zero terms");
    if (dists.size() != weights.size()) {
        raise(Errc::invalid_argument, "got " + std::to_string(dists.size()) +
                                          " distributions but " + std::to_string(weights.size()) +
                                          " weights");
    }
    const auto& vocab = dists[0].vocab();
    for (const auto& d : dists) {
        if (!same_vocab(vocab, d.vocab())) {
            raise(Errc::vocab_mismatch, "terms use different vocabulary objects");
        }
    }
    for (double w : weights) {
        if (!std::isfinite(w)) raise(Errc::invalid_weight, "non-finite combination weight");
    }

    const auto n = static_cast<size_t>(vocab->size());
    std::vector<double> acc(n, 0.0);
    for (size_t i = 0; i < dists.size(); ++i) {
        for (size_t x = 0; x < n; ++x) {
            acc[x] += weights[i] * dists[i].log_prob(static_cast<int32_t>(x));
        }
    }
    return softmax_normalize(LogWeights(vocab, std::move(acc)));
}

void WeightedFormula::validate() const {
    if (terms.empty()) raise(Errc::empty_terms, "formula has no terms");
    for (const auto& term : terms) {
        if (!term.model) raise(Errc::invalid_argument, "formula term has no model");
        if (!std::isfinite(term.weight)) raise(Errc::invalid_weight, "non-finite term weight");
        if (!same_vocab(terms.front().model->vocab(), term.model->vocab())) {
            raise(Errc::vocab_mismatch, "formula terms use different vocabulary objects");
        }
    }
}

TokenDistribution WeightedFormula::evaluate(const Context& ctx) const {
    validate();
    std::vector<TokenDistribution> dists;
    std::vector<double> weights;
    dists.reserve(terms.size());
    weights.reserve(terms.size());
    for (const auto& term : terms) {
        dists.push_back(term.model->next_distribution(ctx));
        weights.push_back(term.weight);
    }
    return weighted_log_linear(dists, weights);
}

TokenDistribution union_combine(const TokenDistribution& a, const TokenDistribution& b) {
    if (!same_vocab(a.vocab(), b.vocab())) {
        raise(Errc::vocab_mismatch, "union over different vocabulary objects");
    }
    const auto n = static_cast<size_t>(a.size());
    std::vector<double> probs(n);
    for (size_t x = 0; x < n; ++x) {
        probs[x] = std::max(a.prob(static_cast<int32_t>(x)), b.prob(static_cast<int32_t>(x)));
    }
    return TokenDistribution(a.vocab(), std::move(probs));
}

TokenDistribution classifier_guided(const TokenDistribution& base,
                                    std::span<const double> scores) {
    if (scores.size() != static_cast<size_t>(base.size())) {
        raise(Errc::invalid_argument, "score vector length != vocabulary size");
    }
    const auto n = static_cast<size_t>(base.size());
    std::vector<double> probs(n);
    double sum = 0.0;
    for (size_t x = 0; x < n; ++x) {
        const double s = scores[x];
        if (!(s >= 0.0 && s <= 1.0)) {
            raise(Errc::invalid_probability,
                  "classifier score " + std::to_string(s) + " outside [0, 1]");
        }
        probs[x] = base.prob(static_cast<int32_t>(x)) * s;
        sum += probs[x];
    }
    if (sum <= 0.0) {
        raise(Errc::degenerate_product, "classifier scores zero out every token");
    }
    return TokenDistribution(base.vocab(), std::move(probs));
}

}  // namespace palette
