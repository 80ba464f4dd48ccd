#pragma once

#include <functional>
#include <optional>
#include <random>

#include "palette/combine.hpp"

namespace palette {

enum class SamplerKind { greedy, temperature, top_k, top_p };

struct SamplerConfig {
    SamplerKind kind = SamplerKind::temperature;
    double temperature = 1.0;  ///< > 0; applies to every non-greedy kind
    int32_t k = 1;             ///< top_k: candidates kept
    double p = 1.0;            ///< top_p: smallest prefix with cumulative mass >= p
    uint64_t seed = 0;

    void validate() const;
};

/// What a combination strategy yields for one step. `terms` is present when
/// the strategy exposes its coefficient record (the palette does).
struct StepOutput {
    TokenDistribution dist;
    std::optional<CombineTerms> terms;
};

/// A decoding strategy maps a context to the next-token distribution.
using StepFn = std::function<StepOutput(const Context&)>;

/// Everything one generation produced, for audit and scoring.
struct GenerationTrace {
    Context prompt;
    std::vector<int32_t> tokens;
    std::vector<TokenDistribution> step_distributions;
    std::vector<CombineTerms> step_terms;  ///< empty unless the strategy reports terms
};

/// Draws one token. Greedy ignores the RNG; ties go to the lowest index.
int32_t sample_token(const TokenDistribution& dist, const SamplerConfig& sampler,
                     std::mt19937_64& rng);

/// Autoregressive generation: repeatedly queries `step`, samples, appends.
/// Stops after max_tokens tokens or right after emitting the vocabulary's
/// end-of-text token. Identical inputs and seed produce identical traces.
/// Provider failures are rethrown with the step index attached.
GenerationTrace generate(const StepFn& step, const Context& prompt, int max_tokens,
                         const SamplerConfig& sampler);

/// exp2 of the average negative log2-likelihood of `tokens` under
/// `reference`, each step conditioned on prompt ++ preceding tokens.
/// Throws Errc::empty_sequence for an empty token list.
double perplexity(const AttributeModel& reference, std::span<const int32_t> tokens,
                  const Context& prompt);

/// Wraps a combination config as a decoding strategy (with terms reported).
StepFn palette_strategy(PaletteConfig config);

}  // namespace palette
