#include "palette/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "palette/baselines.hpp"

namespace palette::eval {

double lexicon_score(const Vocabulary& vocab, std::span<const int32_t> tokens,
                     const Lexicon& lexicon) {
    if (lexicon.empty()) raise(Errc::invalid_argument, "lexicon is empty");
    int64_t sum = 0, scored = 0;
    for (int32_t id : tokens) {
        auto it = lexicon.polarity.find(vocab.token(id));
        if (it == lexicon.polarity.end()) continue;
        sum += it->second;
        ++scored;
    }
    if (scored == 0) return 0.5;
    return (static_cast<double>(sum) / static_cast<double>(scored) + 1.0) / 2.0;
}

std::string_view to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::palette: return "palette";
        case StrategyKind::linear: return "linear";
        case StrategyKind::union_deduct: return "union";
    }
    return "?";
}

void Scenario::validate() const {
    if (!vocab) raise(Errc::invalid_argument, "scenario requires a vocabulary");
    if (!base) raise(Errc::invalid_argument, "scenario requires a base model");
    if (!same_vocab(vocab, base->vocab())) {
        raise(Errc::vocab_mismatch, "base model uses a different vocabulary object");
    }
    PaletteConfig cfg{base, attributes, t, mode, scale};
    cfg.validate();
    sampler.validate();
    if (max_tokens < 1) raise(Errc::invalid_argument, "scenario needs max_tokens >= 1");
    if (generations_per_point < 1) {
        raise(Errc::invalid_argument, "scenario needs generations_per_point >= 1");
    }
    if (!attributes.empty() && swept_attribute >= attributes.size()) {
        raise(Errc::invalid_argument, "swept attribute index out of range");
    }
    if (scorer.empty()) raise(Errc::invalid_argument, "scenario requires a lexicon");
    for (const auto& [tok, pol] : scorer.polarity) {
        if (!vocab->find(tok)) {
            raise(Errc::unknown_token, "lexicon token '" + tok + "' not in the vocabulary");
        }
        if (pol != 1 && pol != -1) {
            raise(Errc::invalid_argument, "lexicon polarity must be +1 or -1");
        }
    }
    for (int32_t id : prompt.tokens) {
        if (id < 0 || id >= vocab->size()) {
            raise(Errc::unknown_token, "prompt token id out of range");
        }
    }
}

uint64_t derive_seed(uint64_t master, uint64_t grid_index) {
    uint64_t z = master + 0x9e3779b97f4a7c15ULL * (grid_index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t master, uint64_t grid_index, uint64_t repetition) {
    return derive_seed(derive_seed(master, grid_index), repetition);
}

StepFn make_strategy(const Scenario& scenario, StrategyKind kind,
                     std::span<const double> strengths, double union_coeff) {
    if (strengths.size() != scenario.attributes.size()) {
        raise(Errc::invalid_argument, "strength vector does not match the attribute list");
    }
    std::vector<AttributeSpec> attrs = scenario.attributes;
    for (size_t i = 0; i < attrs.size(); ++i) {
        // The complement weight follows the main strength unless configured apart.
        const bool tied = attrs[i].complement_strength == attrs[i].strength;
        attrs[i].strength = strengths[i];
        if (tied) attrs[i].complement_strength = strengths[i];
    }

    switch (kind) {
        case StrategyKind::palette: {
            PaletteConfig cfg{scenario.base, std::move(attrs), scenario.t, scenario.mode,
                              scenario.scale};
            return palette_strategy(std::move(cfg));
        }
        case StrategyKind::linear: {
            WeightedFormula formula;
            formula.terms.push_back({scenario.base, 1.0});
            for (const auto& a : attrs) {
                formula.terms.push_back(
                    {a.model, (a.sign == AttributeSign::main ? 1.0 : -1.0) * a.strength});
            }
            formula.validate();
            return [formula = std::move(formula)](const Context& ctx) -> StepOutput {
                return StepOutput{formula.evaluate(ctx), std::nullopt};
            };
        }
        case StrategyKind::union_deduct: {
            if (attrs.size() < 2) {
                raise(Errc::invalid_scenario, "union strategy needs at least two attributes");
            }
            return [attrs = std::move(attrs), union_coeff](const Context& ctx) -> StepOutput {
                // Reference attribute (last) is the base; the token-wise max
                // of all attribute distributions is deducted with the swept
                // coefficient.
                std::vector<TokenDistribution> dists;
                dists.reserve(attrs.size());
                for (const auto& a : attrs) dists.push_back(a.model->next_distribution(ctx));
                TokenDistribution unioned = dists[0];
                for (size_t i = 1; i < dists.size(); ++i) {
                    unioned = union_combine(unioned, dists[i]);
                }
                const TokenDistribution both[] = {dists.back(), std::move(unioned)};
                const double weights[] = {1.0, -union_coeff};
                return StepOutput{weighted_log_linear(both, weights), std::nullopt};
            };
        }
    }
    raise(Errc::invalid_argument, "unknown strategy");
}

namespace {

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& body) {
    if (jobs < 1) jobs = 1;
    const size_t workers = std::min<size_t>(static_cast<size_t>(jobs), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex err_mu;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Runs one grid point: generations_per_point generations, scored and
/// measured for perplexity against the scenario base.
ReportRow run_point(const Scenario& scenario, StrategyKind kind,
                    std::span<const double> strengths, double union_coeff, double param,
                    size_t grid_index) {
    const StepFn strategy = make_strategy(scenario, kind, strengths, union_coeff);
    std::vector<double> scores, ppls;
    scores.reserve(static_cast<size_t>(scenario.generations_per_point));
    ppls.reserve(static_cast<size_t>(scenario.generations_per_point));
    for (int rep = 0; rep < scenario.generations_per_point; ++rep) {
        SamplerConfig sampler = scenario.sampler;
        sampler.seed = derive_seed(scenario.master_seed, grid_index, static_cast<uint64_t>(rep));
        const GenerationTrace trace =
            generate(strategy, scenario.prompt, scenario.max_tokens, sampler);
        scores.push_back(lexicon_score(*scenario.vocab, trace.tokens, scenario.scorer));
        ppls.push_back(trace.tokens.empty()
                           ? 1.0
                           : perplexity(*scenario.base, trace.tokens, scenario.prompt));
    }
    const double n = static_cast<double>(scores.size());
    const double score_mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
    double var = 0.0;
    for (double s : scores) var += (s - score_mean) * (s - score_mean);
    ReportRow row;
    row.strategy = std::string(to_string(kind));
    row.param = param;
    row.score_mean = score_mean;
    row.score_std = std::sqrt(var / n);
    row.ppl_mean = std::accumulate(ppls.begin(), ppls.end(), 0.0) / n;
    row.seed = derive_seed(scenario.master_seed, grid_index);
    return row;
}

}  // namespace

std::vector<ReportRow> run_strength_sweep(const Scenario& scenario,
                                          std::span<const double> s_grid, int jobs) {
    scenario.validate();
    if (scenario.attributes.empty()) {
        raise(Errc::invalid_scenario, "strength sweep needs at least one attribute");
    }
    if (s_grid.empty()) raise(Errc::invalid_argument, "empty strength grid");

    std::vector<ReportRow> rows(s_grid.size());
    parallel_for(s_grid.size(), jobs, [&](size_t gi) {
        std::vector<double> strengths;
        strengths.reserve(scenario.attributes.size());
        for (const auto& a : scenario.attributes) strengths.push_back(a.strength);
        strengths[scenario.swept_attribute] = s_grid[gi];
        rows[gi] = run_point(scenario, StrategyKind::palette, strengths, 0.0, s_grid[gi], gi);
    });
    return rows;
}

std::vector<ReportRow> run_t_sweep(const Scenario& scenario, std::span<const double> t_grid,
                                   int jobs) {
    scenario.validate();
    if (scenario.attributes.empty()) {
        raise(Errc::invalid_scenario, "complement sweep needs at least one attribute");
    }
    if (t_grid.empty()) raise(Errc::invalid_argument, "empty t grid");

    std::vector<double> strengths;
    strengths.reserve(scenario.attributes.size());
    for (const auto& a : scenario.attributes) strengths.push_back(a.strength);

    std::vector<ReportRow> rows(t_grid.size());
    parallel_for(t_grid.size(), jobs, [&](size_t gi) {
        if (t_grid[gi] < 0.0) raise(Errc::invalid_argument, "t must be >= 0");
        Scenario point = scenario;
        point.t = t_grid[gi];
        rows[gi] = run_point(point, StrategyKind::palette, strengths, 0.0, t_grid[gi], gi);
    });
    return rows;
}

ConflictTable run_conflict_eval(const Scenario& scenario,
                                std::span<const StrategyKind> strategies,
                                std::span<const double> ratio_grid, int jobs) {
    scenario.validate();
    if (scenario.attributes.size() < 2) {
        raise(Errc::invalid_scenario, "conflict evaluation needs at least two attributes");
    }
    if (strategies.empty()) raise(Errc::invalid_argument, "no strategies selected");
    if (ratio_grid.empty()) raise(Errc::invalid_argument, "empty ratio grid");

    const size_t n_ratio = ratio_grid.size();
    std::vector<ReportRow> rows(strategies.size() * n_ratio);
    std::vector<size_t> work(rows.size());
    std::iota(work.begin(), work.end(), 0);
    parallel_for(work.size(), jobs, [&](size_t wi) {
        const size_t si = wi / n_ratio;
        const size_t gi = wi % n_ratio;
        const double ratio = ratio_grid[gi];
        if (!(ratio >= 0.0)) raise(Errc::invalid_argument, "ratios must be >= 0");
        // The ratio scales every non-reference strength; the reference
        // (last) attribute keeps its configured strength. Seeds depend on
        // the grid index only, so strategies face identical draws.
        std::vector<double> strengths;
        strengths.reserve(scenario.attributes.size());
        for (size_t i = 0; i < scenario.attributes.size(); ++i) {
            const double s = scenario.attributes[i].strength;
            strengths.push_back(i + 1 < scenario.attributes.size() ? ratio * s : s);
        }
        rows[wi] = run_point(scenario, strategies[si], strengths, ratio, ratio, gi);
    });

    ConflictTable table;
    table.rows = std::move(rows);
    auto mean_scores = [&](StrategyKind kind) -> std::vector<double> {
        std::vector<double> out;
        for (size_t si = 0; si < strategies.size(); ++si) {
            if (strategies[si] != kind) continue;
            for (size_t gi = 0; gi < n_ratio; ++gi) {
                out.push_back(table.rows[si * n_ratio + gi].score_mean);
            }
        }
        return out;
    };
    const auto palette = mean_scores(StrategyKind::palette);
    const auto linear = mean_scores(StrategyKind::linear);
    const auto unioned = mean_scores(StrategyKind::union_deduct);
    auto frac_ge = [&](const std::vector<double>& other) {
        if (palette.empty() || other.size() != palette.size()) return 0.0;
        size_t wins = 0;
        for (size_t i = 0; i < palette.size(); ++i) {
            if (palette[i] >= other[i]) ++wins;
        }
        return static_cast<double>(wins) / static_cast<double>(palette.size());
    };
    table.frac_palette_ge_linear = frac_ge(linear);
    table.frac_palette_ge_union = frac_ge(unioned);
    return table;
}

double spearman_rank_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        raise(Errc::invalid_argument, "rank correlation needs two matched series");
    }
    auto ranks = [](std::span<const double> v) {
        std::vector<size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        size_t i = 0;
        while (i < idx.size()) {
            size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) return 0.0;
    return num / std::sqrt(dx * dy);
}

}  // namespace palette::eval
