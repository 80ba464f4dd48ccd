#include "palette/combine.hpp"

#include <cmath>

namespace palette {

std::string_view to_string(CombineMode m) {
    return m == CombineMode::exact ? "exact" : "sigmoid";
}

std::string_view to_string(CombineScale s) {
    return s == CombineScale::normalized ? "normalized" : "canonical";
}

double coefficient_c(double p, CombineMode mode) {
    if (std::isnan(p)) raise(Errc::invalid_probability, "coefficient input is NaN");
    return mode == CombineMode::exact ? 1.0 + 1.0 / p : 2.0 + std::exp(-p);
}

double coefficient_bound() { return 2.0 + std::exp(-1.0); }

void PaletteConfig::validate() const {
    if (!base) raise(Errc::invalid_argument, "combination requires a base model");
    if (!(t >= 0.0) || !std::isfinite(t)) {
        raise(Errc::invalid_argument, "complement coefficient t must be finite and >= 0");
    }
    const auto& vocab = base->vocab();
    for (const auto& attr : attributes) {
        if (!attr.model) {
            raise(Errc::invalid_argument, "attribute '" + attr.id + "' has no model");
        }
        if (!same_vocab(vocab, attr.model->vocab())) {
            raise(Errc::vocab_mismatch,
                  "attribute '" + attr.id + "' uses a different vocabulary object");
        }
        if (!(attr.strength >= 0.0) || !std::isfinite(attr.strength)) {
            raise(Errc::invalid_argument, "attribute '" + attr.id + "' strength must be >= 0");
        }
        if (!(attr.complement_strength >= 0.0) || !std::isfinite(attr.complement_strength)) {
            raise(Errc::invalid_argument,
                  "attribute '" + attr.id + "' complement strength must be >= 0");
        }
        for (int32_t tok : attr.attribute_tokens) {
            if (tok < 0 || tok >= vocab->size()) {
                raise(Errc::unknown_token, "attribute '" + attr.id + "' token id " +
                                               std::to_string(tok) + " out of range");
            }
        }
    }
}

namespace {

struct TermView {
    const TokenDistribution* dist;
    double strength;
    double complement_strength;
    double sign;
};

CombineTerms make_terms(const VocabPtr& vocab, std::span<const TermView> views, CombineMode mode,
                        CombineScale scale, double t) {
    const auto n_tok = static_cast<size_t>(vocab->size());

    double sum_s = 0.0, sum_s_comp = 0.0;
    for (const auto& v : views) {
        if (!same_vocab(vocab, v.dist->vocab())) {
            raise(Errc::vocab_mismatch,
                  "attribute distribution uses a different vocabulary object");
        }
        sum_s += v.strength;
        sum_s_comp += v.complement_strength;
    }

    CombineTerms terms;
    terms.t = t;
    terms.m1 = scale == CombineScale::canonical ? 1.0 : 1.0 + coefficient_bound() * sum_s;
    terms.m2 = coefficient_bound() * sum_s_comp;
    terms.complement_active = t > 0.0 && sum_s_comp > 0.0;
    terms.sign.reserve(views.size());
    terms.c.reserve(views.size());
    terms.c_comp.reserve(views.size());
    for (const auto& v : views) {
        terms.sign.push_back(v.sign);
        std::vector<double> row(n_tok), row_comp(n_tok);
        for (size_t x = 0; x < n_tok; ++x) {
            const double p = v.dist->prob(static_cast<int32_t>(x));
            row[x] = coefficient_c(p, mode);
            row_comp[x] = coefficient_c(complement_prob(*v.dist, static_cast<int32_t>(x)), mode);
        }
        terms.c.push_back(std::move(row));
        terms.c_comp.push_back(std::move(row_comp));
    }
    return terms;
}

CombineResult combine_impl(const TokenDistribution& base, std::span<const TermView> views,
                           CombineMode mode, CombineScale scale, double t) {
    CombineTerms terms = make_terms(base.vocab(), views, mode, scale, t);
    const auto n_tok = static_cast<size_t>(base.size());

    std::vector<double> weights(n_tok);
    for (size_t x = 0; x < n_tok; ++x) {
        const auto id = static_cast<int32_t>(x);
        double main = base.log_prob(id);
        for (size_t i = 0; i < views.size(); ++i) {
            main += views[i].sign * views[i].strength * terms.c[i][x] *
                    views[i].dist->log_prob(id);
        }
        double w = main / terms.m1;
        if (terms.complement_active) {
            double comp = 0.0;
            for (size_t i = 0; i < views.size(); ++i) {
                comp += views[i].sign * views[i].complement_strength * terms.c_comp[i][x] *
                        std::log(complement_prob(*views[i].dist, id));
            }
            w += t * comp / terms.m2;
        }
        weights[x] = w;
    }
    return CombineResult{softmax_normalize(LogWeights(base.vocab(), std::move(weights))),
                         std::move(terms)};
}

}  // namespace

CombineTerms combine_terms(const PaletteConfig& config,
                           std::span<const TokenDistribution> dists) {
    config.validate();
    if (dists.size() != config.attributes.size()) {
        raise(Errc::invalid_argument, "expected " + std::to_string(config.attributes.size()) +
                                          " distributions, got " + std::to_string(dists.size()));
    }
    std::vector<TermView> views;
    views.reserve(dists.size());
    for (size_t i = 0; i < dists.size(); ++i) {
        const auto& attr = config.attributes[i];
        views.push_back({&dists[i], attr.strength, attr.complement_strength,
                         attr.sign == AttributeSign::main ? 1.0 : -1.0});
    }
    return make_terms(config.base->vocab(), views, config.mode, config.scale, config.t);
}

CombineResult combine_distributions(const TokenDistribution& base,
                                    std::span<const AttributeTerm> terms, CombineMode mode,
                                    CombineScale scale, double t) {
    std::vector<TermView> views;
    views.reserve(terms.size());
    for (const auto& term : terms) {
        if (!(term.strength >= 0.0) || !(term.complement_strength >= 0.0)) {
            raise(Errc::invalid_argument, "attribute strengths must be >= 0");
        }
        views.push_back({&term.dist, term.strength, term.complement_strength, term.sign});
    }
    return combine_impl(base, views, mode, scale, t);
}

CombineResult palette_combine(const PaletteConfig& config, const Context& ctx) {
    config.validate();
    const TokenDistribution base = config.base->next_distribution(ctx);
    std::vector<TokenDistribution> dists;
    dists.reserve(config.attributes.size());
    for (const auto& attr : config.attributes) {
        dists.push_back(attr.model->next_distribution(ctx));
    }
    std::vector<TermView> views;
    views.reserve(dists.size());
    for (size_t i = 0; i < dists.size(); ++i) {
        const auto& attr = config.attributes[i];
        views.push_back({&dists[i], attr.strength, attr.complement_strength,
                         attr.sign == AttributeSign::main ? 1.0 : -1.0});
    }
    return combine_impl(base, views, config.mode, config.scale, config.t);
}

}  // namespace palette
