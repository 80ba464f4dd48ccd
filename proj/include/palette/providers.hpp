#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "palette/distribution.hpp"

namespace palette {

/// Conditioning token sequence (possibly empty). Token ids index the
/// model's vocabulary.
struct Context {
    std::vector<int32_t> tokens;

    Context() = default;
    explicit Context(std::vector<int32_t> toks) : tokens(std::move(toks)) {}
    static Context parse(const Vocabulary& vocab, std::string_view text) {
        return Context(vocab.tokenize(text));
    }

    bool empty() const { return tokens.empty(); }
    size_t size() const { return tokens.size(); }
};

/// Uniform "context -> next-token distribution" interface. Implementations
/// must be deterministic for identical inputs and immutable after
/// construction, so instances may be shared across threads.
class AttributeModel {
public:
    virtual ~AttributeModel() = default;
    virtual const VocabPtr& vocab() const = 0;
    virtual TokenDistribution next_distribution(const Context& ctx) const = 0;

protected:
    /// Rejects context tokens outside this model's vocabulary.
    void check_context(const Context& ctx) const;
};

using ModelPtr = std::shared_ptr<const AttributeModel>;

/// Deterministic test backend: stored distributions keyed by the last
/// `context_len` tokens of the query context, with a default for misses.
class TabularModel final : public AttributeModel {
public:
    using Table = std::map<std::vector<int32_t>, TokenDistribution>;

    TabularModel(VocabPtr vocab, size_t context_len, Table table, TokenDistribution default_dist);

    const VocabPtr& vocab() const override { return vocab_; }
    TokenDistribution next_distribution(const Context& ctx) const override;

private:
    VocabPtr vocab_;
    size_t context_len_;
    Table table_;
    TokenDistribution default_;
};

/// Count-based n-gram model with add-k smoothing applied at query time.
/// Histories are the up-to-(order-1) most recent tokens; shorter histories
/// occur at sequence starts and are stored as their own keys.
class NGramModel final : public AttributeModel {
public:
    using Counts = std::map<std::vector<int32_t>, std::vector<int64_t>>;

    NGramModel(VocabPtr vocab, int order, double add_k, Counts counts);

    const VocabPtr& vocab() const override { return vocab_; }
    TokenDistribution next_distribution(const Context& ctx) const override;

    int order() const { return order_; }
    double add_k() const { return add_k_; }
    const Counts& counts() const { return counts_; }

    /// Versioned plain-text serialization (order, add_k, vocabulary,
    /// per-history counts), stable across runs.
    void save(std::ostream& out) const;

    /// Parses a model written by save(). When `expected_vocab` is given the
    /// stored token list must match it and the returned model shares that
    /// vocabulary object; otherwise a fresh Vocabulary is built.
    static std::shared_ptr<NGramModel> load(std::istream& in, VocabPtr expected_vocab = nullptr);

private:
    VocabPtr vocab_;
    int order_;
    double add_k_;
    Counts counts_;
};

/// Trains an n-gram model by counting transitions in `sequences`. Every
/// sequence restarts the history window. add_k = 0 is allowed only when the
/// corpus is nonempty (Errc::degenerate_model otherwise).
std::shared_ptr<NGramModel> train_ngram(VocabPtr vocab,
                                        const std::vector<std::vector<int32_t>>& sequences,
                                        int order, double add_k);

/// Prompt-prefixed view of `base`: the view answers next_distribution(c) as
/// base.next_distribution(prompt ++ c). Views compose; prefixes concatenate.
ModelPtr attribute_view(ModelPtr base, std::vector<int32_t> prompt);

}  // namespace palette
