#include "palette/decode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace palette {

void SamplerConfig::validate() const {
    switch (kind) {
        case SamplerKind::greedy:
            break;
        case SamplerKind::temperature:
            if (!(temperature > 0.0) || !std::isfinite(temperature)) {
                raise(Errc::invalid_argument, "temperature must be a positive real");
            }
            break;
        case SamplerKind::top_k:
            if (k < 1) raise(Errc::invalid_argument, "top-k needs k >= 1");
            if (!(temperature > 0.0) || !std::isfinite(temperature)) {
                raise(Errc::invalid_argument, "temperature must be a positive real");
            }
            break;
        case SamplerKind::top_p:
            if (!(p > 0.0 && p <= 1.0)) raise(Errc::invalid_argument, "top-p needs p in (0, 1]");
            if (!(temperature > 0.0) || !std::isfinite(temperature)) {
                raise(Errc::invalid_argument, "temperature must be a positive real");
            }
            break;
    }
}

namespace {

// Uniform double in [0, 1) built from the top 53 bits, so draws do not
// depend on the standard library's distribution implementation.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int32_t sample_cdf(std::span<const double> probs, double u) {
    double cum = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return static_cast<int32_t>(i);
    }
    return static_cast<int32_t>(probs.size() - 1);
}

// Indices ordered by probability descending, index ascending on ties.
std::vector<int32_t> order_desc(const TokenDistribution& dist) {
    std::vector<int32_t> idx(static_cast<size_t>(dist.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int32_t a, int32_t b) { return dist.prob(a) > dist.prob(b); });
    return idx;
}

}  // namespace

int32_t sample_token(const TokenDistribution& dist, const SamplerConfig& sampler,
                     std::mt19937_64& rng) {
    sampler.validate();
    if (sampler.kind == SamplerKind::greedy) {
        return dist.argmax();
    }

    // Temperature rescale in log space.
    std::vector<double> weights(static_cast<size_t>(dist.size()));
    for (int32_t i = 0; i < dist.size(); ++i) {
        weights[static_cast<size_t>(i)] = dist.log_prob(i) / sampler.temperature;
    }
    TokenDistribution scaled = softmax_normalize(LogWeights(dist.vocab(), std::move(weights)));

    if (sampler.kind == SamplerKind::temperature) {
        return sample_cdf(scaled.probs(), uniform01(rng));
    }

    auto idx = order_desc(scaled);
    size_t keep = idx.size();
    if (sampler.kind == SamplerKind::top_k) {
        keep = std::min<size_t>(static_cast<size_t>(sampler.k), idx.size());
    } else {  // top_p
        double cum = 0.0;
        for (size_t i = 0; i < idx.size(); ++i) {
            cum += scaled.prob(idx[i]);
            if (cum >= sampler.p) {
                keep = i + 1;
                break;
            }
        }
    }
    std::vector<double> kept(keep);
    double total = 0.0;
    for (size_t i = 0; i < keep; ++i) total += scaled.prob(idx[i]);
    for (size_t i = 0; i < keep; ++i) kept[i] = scaled.prob(idx[i]) / total;
    return idx[static_cast<size_t>(sample_cdf(kept, uniform01(rng)))];
}

GenerationTrace generate(const StepFn& step, const Context& prompt, int max_tokens,
                         const SamplerConfig& sampler) {
    if (max_tokens < 0) raise(Errc::invalid_argument, "max_tokens must be >= 0");
    sampler.validate();

    GenerationTrace trace;
    trace.prompt = prompt;
    std::mt19937_64 rng(sampler.seed);
    Context ctx = prompt;

    for (int i = 0; i < max_tokens; ++i) {
        StepOutput out = [&] {
            try {
                return step(ctx);
            } catch (const Error& e) {
                throw Error(e.code(), "step " + std::to_string(i) + ": " + e.what());
            }
        }();
        const int32_t tok = sample_token(out.dist, sampler, rng);
        trace.tokens.push_back(tok);
        trace.step_distributions.push_back(std::move(out.dist));
        if (out.terms) trace.step_terms.push_back(std::move(*out.terms));
        ctx.tokens.push_back(tok);

        const auto eot = trace.step_distributions.back().vocab()->end_of_text();
        if (eot && tok == *eot) break;
    }
    return trace;
}

double perplexity(const AttributeModel& reference, std::span<const int32_t> tokens,
                  const Context& prompt) {
    if (tokens.empty()) raise(Errc::empty_sequence, "perplexity of an empty sequence");
    Context ctx = prompt;
    double log2_sum = 0.0;
    for (int32_t tok : tokens) {
        const TokenDistribution dist = reference.next_distribution(ctx);
        if (tok < 0 || tok >= dist.size()) {
            raise(Errc::unknown_token, "scored token id " + std::to_string(tok) + " out of range");
        }
        log2_sum += std::log2(dist.prob(tok));
        ctx.tokens.push_back(tok);
    }
    return std::exp2(-log2_sum / static_cast<double>(tokens.size()));
}

StepFn palette_strategy(PaletteConfig config) {
    config.validate();
    return [config = std::move(config)](const Context& ctx) -> StepOutput {
        CombineResult res = palette_combine(config, ctx);
        return StepOutput{std::move(res.dist), std::move(res.terms)};
    };
}

}  // namespace palette
