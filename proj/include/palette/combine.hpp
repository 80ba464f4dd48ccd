#pragma once

#include <span>
#include <string>
#include <vector>

#include "palette/providers.hpp"

namespace palette {

enum class CombineMode {
    exact,    ///< c(p) = 1 + 1/p (p pre-clamped away from 0)
    sigmoid,  ///< c(p) = 2 + e^{-p}, the bounded surrogate of 1 + 1/sigmoid(p)
};

enum class CombineScale {
    normalized,  ///< divide the main term by M1 = 1 + (2+1/e)*sum(s_i)
    canonical,   ///< M1 = 1; the form the monotonicity/enhancement analysis uses
};

enum class AttributeSign { main, anti };

std::string_view to_string(CombineMode m);
std::string_view to_string(CombineScale s);

/// Per-token dynamic coefficient applied to an attribute's log-probability.
/// In exact mode the caller must have clamped p away from zero.
double coefficient_c(double p, CombineMode mode);

/// (2 + 1/e), the supremum of the sigmoid-mode coefficient; both M1 and M2
/// are built from it.
double coefficient_bound();

/// One attribute entering a combination.
struct AttributeSpec {
    std::string id;
    ModelPtr model;
    double strength = 1.0;             ///< s >= 0, proportion in the final mix
    double complement_strength = 1.0;  ///< s' >= 0, weight of the complement term
    AttributeSign sign = AttributeSign::main;
    std::vector<int32_t> attribute_tokens;  ///< tokens that express the attribute

    AttributeSpec() = default;
    AttributeSpec(std::string id_, ModelPtr model_, double s,
                  AttributeSign sg = AttributeSign::main)
        : id(std::move(id_)),
          model(std::move(model_)),
          strength(s),
          complement_strength(s),
          sign(sg) {}
};

/// Full combination setup: base model, attributes, complement coefficient t
/// and the mode/scale knobs.
struct PaletteConfig {
    ModelPtr base;
    std::vector<AttributeSpec> attributes;
    double t = 0.0;
    CombineMode mode = CombineMode::sigmoid;
    CombineScale scale = CombineScale::normalized;

    /// Checks strengths, t and that every model shares the base's
    /// vocabulary object. Throws Errc::vocab_mismatch / invalid_argument.
    void validate() const;
};

/// Materialized per-combination record: the normalizers, sign factors and
/// per-attribute per-token coefficient arrays that produced one output
/// distribution.
struct CombineTerms {
    double m1 = 1.0;  ///< effective main-term normalizer (1 in canonical scale)
    double m2 = 0.0;  ///< complement-term normalizer, (2+1/e)*sum(s')
    double t = 0.0;
    bool complement_active = false;  ///< t > 0 and sum(s') > 0
    std::vector<double> sign;        ///< +1 main / -1 anti, per attribute
    std::vector<std::vector<double>> c;       ///< c(p_i(x)), [attribute][token]
    std::vector<std::vector<double>> c_comp;  ///< c(1 - p_i(x)), [attribute][token]
};

/// Distribution-level view of an attribute, for callers that already hold
/// next-token distributions rather than models.
struct AttributeTerm {
    TokenDistribution dist;
    double strength = 1.0;
    double complement_strength = 1.0;
    double sign = 1.0;  ///< +1 main, -1 anti

    AttributeTerm(TokenDistribution d, double s, double s_comp, double sg)
        : dist(std::move(d)), strength(s), complement_strength(s_comp), sign(sg) {}
    AttributeTerm(TokenDistribution d, double s) : AttributeTerm(std::move(d), s, s, 1.0) {}
};

struct CombineResult {
    TokenDistribution dist;
    CombineTerms terms;
};

/// Computes the coefficient record for one combination step. `dists` must
/// be aligned with `config.attributes` and share the base vocabulary.
CombineTerms combine_terms(const PaletteConfig& config,
                           std::span<const TokenDistribution> dists);

/// Core combination on raw distributions:
///
///   w(x) = [sum_i sign_i * s_i * c_i(x) * log p_i(x) + log p_base(x)] / M1
///        + t * [sum_i sign_i * s'_i * c'_i(x) * log(1 - p_i(x))] / M2
///
/// followed by softmax. The complement block is omitted entirely when t = 0
/// or sum(s') = 0. In canonical scale M1 is 1 and the main term is left
/// unscaled.
CombineResult combine_distributions(const TokenDistribution& base,
                                    std::span<const AttributeTerm> terms, CombineMode mode,
                                    CombineScale scale, double t);

/// Queries the base and every attribute model at `ctx`, then combines.
CombineResult palette_combine(const PaletteConfig& config, const Context& ctx);

}  // namespace palette
