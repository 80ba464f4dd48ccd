#include "palette/distribution.hpp"

#include <algorithm>
#include <string>

namespace palette {

double clamp_probability(double p, double eps) {
    if (std::isnan(p)) {
        raise(Errc::invalid_probability, "cannot clamp NaN");
    }
    if (!(eps > 0.0 && eps < 0.01)) {
        raise(Errc::invalid_argument, "clamp epsilon must lie in (0, 0.01)");
    }
    return std::min(std::max(p, eps), 1.0 - eps);
}

TokenDistribution::TokenDistribution(VocabPtr vocab, std::vector<double> probs)
    : vocab_(std::move(vocab)), probs_(std::move(probs)) {
    if (!vocab_) {
        raise(Errc::invalid_argument, "distribution requires a vocabulary");
    }
    if (static_cast<int32_t>(probs_.size()) != vocab_->size()) {
        raise(Errc::vocab_mismatch, "distribution has " + std::to_string(probs_.size()) +
                                        " entries for a vocabulary of " +
                                        std::to_string(vocab_->size()));
    }
    double sum = 0.0;
    for (size_t i = 0; i < probs_.size(); ++i) {
        const double p = probs_[i];
        if (!std::isfinite(p) || p < 0.0) {
            raise(Errc::invalid_probability,
                  "entry " + std::to_string(i) + " = " + std::to_string(p));
        }
        sum += p;
    }
    if (sum <= 0.0) {
        raise(Errc::invalid_probability, "distribution sums to zero");
    }
    for (auto& p : probs_) {
        p = std::min(std::max(p / sum, kProbEpsilon), 1.0);
    }
}

TokenDistribution TokenDistribution::uniform(VocabPtr vocab) {
    if (!vocab) raise(Errc::invalid_argument, "uniform requires a vocabulary");
    const auto n = static_cast<size_t>(vocab->size());
    return TokenDistribution(std::move(vocab), std::vector<double>(n, 1.0 / double(n)));
}

int32_t TokenDistribution::argmax() const {
    int32_t best = 0;
    for (int32_t i = 1; i < size(); ++i) {
        if (probs_[static_cast<size_t>(i)] > probs_[static_cast<size_t>(best)]) best = i;
    }
    return best;
}

LogWeights::LogWeights(VocabPtr vocab, std::vector<double> weights)
    : vocab_(std::move(vocab)), weights_(std::move(weights)) {
    if (!vocab_) {
        raise(Errc::invalid_argument, "log weights require a vocabulary");
    }
    if (static_cast<int32_t>(weights_.size()) != vocab_->size()) {
        raise(Errc::vocab_mismatch, "weight vector has " + std::to_string(weights_.size()) +
                                        " entries for a vocabulary of " +
                                        std::to_string(vocab_->size()));
    }
    for (size_t i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i])) {
            raise(Errc::invalid_weight,
                  "weight " + std::to_string(i) + " = " + std::to_string(weights_[i]));
        }
    }
}

TokenDistribution softmax_normalize(const LogWeights& w) {
    const auto& ws = w.weights();
    const double max_w = *std::max_element(ws.begin(), ws.end());
    std::vector<double> probs(ws.size());
    for (size_t i = 0; i < ws.size(); ++i) {
        probs[i] = std::exp(ws[i] - max_w);
    }
    return TokenDistribution(w.vocab(), std::move(probs));
}

double complement_prob(const TokenDistribution& d, int32_t token) {
    if (token < 0 || token >= d.size()) {
        raise(Errc::unknown_token, "token id " + std::to_string(token) + " out of range");
    }
    return clamp_probability(1.0 - d.prob(token));
}

}  // namespace palette
