#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "palette/vocab.hpp"

namespace palette {

/// Probability floor. Exact-mode coefficients contain 1/p, so every
/// probability that enters combination arithmetic is kept >= kProbEpsilon.
inline constexpr double kProbEpsilon = 1e-12;

/// Clamps p into [eps, 1-eps]. NaN is rejected; eps must lie in (0, 0.01).
double clamp_probability(double p, double eps = kProbEpsilon);

/// Probability vector over a vocabulary. Construction normalizes the input
/// and clamps each entry into [kProbEpsilon, 1], so downstream log/1-p
/// arithmetic never sees zeros. Immutable after construction.
class TokenDistribution {
public:
    /// `probs` must be finite, nonnegative, with a positive sum; it is
    /// rescaled to sum to 1 and clamped. Throws Errc::invalid_probability
    /// or Errc::vocab_mismatch on a length mismatch.
    TokenDistribution(VocabPtr vocab, std::vector<double> probs);

    static TokenDistribution uniform(VocabPtr vocab);

    const VocabPtr& vocab() const { return vocab_; }
    int32_t size() const { return static_cast<int32_t>(probs_.size()); }
    double prob(int32_t id) const { return probs_[static_cast<size_t>(id)]; }
    double log_prob(int32_t id) const { return std::log(probs_[static_cast<size_t>(id)]); }
    const std::vector<double>& probs() const { return probs_; }

    /// Index of the largest entry; ties resolve to the lowest index.
    int32_t argmax() const;

private:
    VocabPtr vocab_;
    std::vector<double> probs_;
};

/// Unnormalized log-space scores over a vocabulary. Entries must be finite
/// (Errc::invalid_weight otherwise).
class LogWeights {
public:
    LogWeights(VocabPtr vocab, std::vector<double> weights);

    const VocabPtr& vocab() const { return vocab_; }
    int32_t size() const { return static_cast<int32_t>(weights_.size()); }
    double weight(int32_t id) const { return weights_[static_cast<size_t>(id)]; }
    const std::vector<double>& weights() const { return weights_; }

private:
    VocabPtr vocab_;
    std::vector<double> weights_;
};

/// exp-normalizes log weights into a distribution. The max weight is
/// subtracted before exponentiation, so arbitrarily shifted inputs are safe.
TokenDistribution softmax_normalize(const LogWeights& w);

/// p(token != x) = 1 - p(x), clamped into [kProbEpsilon, 1-kProbEpsilon].
double complement_prob(const TokenDistribution& d, int32_t token);

}  // namespace palette
