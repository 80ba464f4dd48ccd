#pragma once

#include <map>
#include <string>
#include <vector>

#include "palette/decode.hpp"

namespace palette::eval {

/// Token -> polarity in {-1, +1}; unlisted tokens are neutral.
struct Lexicon {
    std::map<std::string, int> polarity;

    bool empty() const { return polarity.empty(); }
};

/// (mean polarity over scored tokens + 1) / 2. Tokens without an entry are
/// ignored; a text with no scored tokens sits at the neutral 0.5.
double lexicon_score(const Vocabulary& vocab, std::span<const int32_t> tokens,
                     const Lexicon& lexicon);

/// One cell of a sweep/table report.
struct ReportRow {
    std::string strategy;
    double param = 0.0;  ///< swept value: s, t, or strength ratio
    double score_mean = 0.0;
    double score_std = 0.0;
    double ppl_mean = 0.0;
    uint64_t seed = 0;  ///< grid-point seed the repetitions derive from

    bool operator==(const ReportRow&) const = default;
};

enum class StrategyKind { palette, linear, union_deduct };

std::string_view to_string(StrategyKind k);

/// A full experiment description: models, combination knobs, decoding
/// setup, scorer and repetition counts.
struct Scenario {
    VocabPtr vocab;
    ModelPtr base;
    std::vector<AttributeSpec> attributes;
    Context prompt;
    SamplerConfig sampler;
    int max_tokens = 24;
    int generations_per_point = 50;
    size_t swept_attribute = 0;  ///< which attribute a strength sweep varies
    Lexicon scorer;
    CombineMode mode = CombineMode::sigmoid;
    CombineScale scale = CombineScale::normalized;
    double t = 0.0;
    uint64_t master_seed = 0;

    void validate() const;
};

/// Deterministic per-point / per-repetition seed stream.
uint64_t derive_seed(uint64_t master, uint64_t grid_index);
uint64_t derive_seed(uint64_t master, uint64_t grid_index, uint64_t repetition);

/// Builds the scenario's decoding strategy with explicit per-attribute
/// strengths. `union_coeff` is the deduction weight of the unioned
/// distribution (union strategy only).
StepFn make_strategy(const Scenario& scenario, StrategyKind kind,
                     std::span<const double> strengths, double union_coeff);

/// Swept-strength run: one row per grid point, generations_per_point
/// generations each, scored by the lexicon and measured for perplexity
/// against the base model.
std::vector<ReportRow> run_strength_sweep(const Scenario& scenario,
                                          std::span<const double> s_grid, int jobs = 1);

/// Complement-coefficient sweep; the t = 0 point is the reference row.
std::vector<ReportRow> run_t_sweep(const Scenario& scenario, std::span<const double> t_grid,
                                   int jobs = 1);

struct ConflictTable {
    std::vector<ReportRow> rows;  ///< ordered by strategy, then grid index
    double frac_palette_ge_linear = 0.0;
    double frac_palette_ge_union = 0.0;
};

/// Strength-ratio table across strategies. Each ratio scales every
/// non-reference attribute's strength; the reference (last) attribute keeps
/// its configured strength. Requires at least two attributes.
ConflictTable run_conflict_eval(const Scenario& scenario,
                                std::span<const StrategyKind> strategies,
                                std::span<const double> ratio_grid, int jobs = 1);

/// Spearman rank correlation with average ranks on ties.
double spearman_rank_correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace palette::eval
