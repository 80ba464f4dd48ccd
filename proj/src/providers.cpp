#include "palette/providers.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace palette {

void AttributeModel::check_context(const Context& ctx) const {
    const int32_t n = vocab()->size();
    for (int32_t id : ctx.tokens) {
        if (id < 0 || id >= n) {
            raise(Errc::unknown_token, "context token id " + std::to_string(id) + " out of range");
        }
    }
}

// ---------------------------------------------------------------------------
// TabularModel

TabularModel::TabularModel(VocabPtr vocab, size_t context_len, Table table,
                           TokenDistribution default_dist)
    : vocab_(std::move(vocab)),
      context_len_(context_len),
      table_(std::move(table)),
      default_(std::move(default_dist)) {
    if (!same_vocab(vocab_, default_.vocab())) {
        raise(Errc::vocab_mismatch, "default distribution uses a different vocabulary object");
    }
    for (const auto& [key, dist] : table_) {
        if (key.size() > context_len_) {
            raise(Errc::invalid_argument, "table key longer than the declared context length");
        }
        if (!same_vocab(vocab_, dist.vocab())) {
            raise(Errc::vocab_mismatch, "table entry uses a different vocabulary object");
        }
    }
}

TokenDistribution TabularModel::next_distribution(const Context& ctx) const {
    check_context(ctx);
    const size_t take = std::min(context_len_, ctx.tokens.size());
    std::vector<int32_t> key(ctx.tokens.end() - static_cast<ptrdiff_t>(take), ctx.tokens.end());
    auto it = table_.find(key);
    return it != table_.end() ? it->second : default_;
}

// ---------------------------------------------------------------------------
// NGramModel

NGramModel::NGramModel(VocabPtr vocab, int order, double add_k, Counts counts)
    : vocab_(std::move(vocab)), order_(order), add_k_(add_k), counts_(std::move(counts)) {
    if (order_ < 1) {
        raise(Errc::invalid_argument, "n-gram order must be >= 1, got " + std::to_string(order_));
    }
    if (!(add_k_ >= 0.0) || !std::isfinite(add_k_)) {
        raise(Errc::invalid_argument, "add_k must be a finite nonnegative real");
    }
    const int32_t n = vocab_->size();
    for (const auto& [hist, row] : counts_) {
        if (hist.size() > static_cast<size_t>(order_ - 1)) {
            raise(Errc::invalid_argument, "history longer than order-1");
        }
        if (row.size() != static_cast<size_t>(n)) {
            raise(Errc::invalid_argument, "count row length != vocabulary size");
        }
        for (int64_t c : row) {
            if (c < 0) raise(Errc::invalid_argument, "negative count");
        }
    }
}

TokenDistribution NGramModel::next_distribution(const Context& ctx) const {
    check_context(ctx);
    const size_t hist_len = std::min(static_cast<size_t>(order_ - 1), ctx.tokens.size());
    std::vector<int32_t> hist(ctx.tokens.end() - static_cast<ptrdiff_t>(hist_len),
                              ctx.tokens.end());

    const auto n = static_cast<size_t>(vocab_->size());
    const std::vector<int64_t>* row = nullptr;
    if (auto it = counts_.find(hist); it != counts_.end()) row = &it->second;

    int64_t total = 0;
    if (row) {
        for (int64_t c : *row) total += c;
    }
    if (total == 0 && add_k_ == 0.0) {
        raise(Errc::degenerate_model,
              "no counts for history and add_k = 0 gives an empty distribution");
    }

    const double denom = static_cast<double>(total) + add_k_ * static_cast<double>(n);
    std::vector<double> probs(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double c = row ? static_cast<double>((*row)[i]) : 0.0;
        probs[i] = (c + add_k_) / denom;
    }
    return TokenDistribution(vocab_, std::move(probs));
}

namespace {
constexpr std::string_view kNgramMagic = "palette-ngram";
constexpr int kNgramVersion = 1;
}  // namespace

void NGramModel::save(std::ostream& out) const {
    out << kNgramMagic << " v" << kNgramVersion << "\n";
    out << "order " << order_ << "\n";
    out.precision(17);
    out << "add_k " << add_k_ << "\n";
    out << "vocab " << vocab_->size() << "\n";
    for (const auto& tok : vocab_->tokens()) out << tok << "\n";
    out << "histories " << counts_.size() << "\n";
    for (const auto& [hist, row] : counts_) {
        out << "history " << hist.size();
        for (int32_t id : hist) out << " " << vocab_->token(id);
        out << "\n";
        for (size_t i = 0; i < row.size(); ++i) {
            if (row[i] != 0) {
                out << "c " << vocab_->token(static_cast<int32_t>(i)) << " " << row[i] << "\n";
            }
        }
        out << "end\n";
    }
}

std::shared_ptr<NGramModel> NGramModel::load(std::istream& in, VocabPtr expected_vocab) {
    auto fail = [](const std::string& what) -> void {
        raise(Errc::schema_mismatch, "n-gram file: " + what);
    };
    std::string magic, version;
    if (!(in >> magic >> version) || magic != kNgramMagic || version != "v1") {
        fail("bad header");
    }
    std::string key;
    int order = 0;
    double add_k = 0.0;
    int32_t vocab_size = 0;
    if (!(in >> key >> order) || key != "order") fail("missing order");
    if (!(in >> key >> add_k) || key != "add_k") fail("missing add_k");
    if (!(in >> key >> vocab_size) || key != "vocab") fail("missing vocab size");
    std::vector<std::string> tokens(static_cast<size_t>(vocab_size));
    for (auto& tok : tokens) {
        if (!(in >> tok)) fail("truncated vocabulary");
    }

    VocabPtr vocab;
    if (expected_vocab) {
        if (expected_vocab->tokens() != tokens) {
            raise(Errc::vocab_mismatch, "n-gram file vocabulary differs from the declared one");
        }
        vocab = std::move(expected_vocab);
    } else {
        vocab = Vocabulary::from_tokens(std::move(tokens));
    }

    size_t n_hist = 0;
    if (!(in >> key >> n_hist) || key != "histories") fail("missing history count");
    NGramModel::Counts counts;
    for (size_t h = 0; h < n_hist; ++h) {
        size_t hist_len = 0;
        if (!(in >> key >> hist_len) || key != "history") fail("missing history entry");
        std::vector<int32_t> hist;
        hist.reserve(hist_len);
        for (size_t i = 0; i < hist_len; ++i) {
            std::string tok;
            if (!(in >> tok)) fail("truncated history");
            hist.push_back(vocab->index_of(tok));
        }
        std::vector<int64_t> row(static_cast<size_t>(vocab->size()), 0);
        std::string tag;
        while (true) {
            if (!(in >> tag)) fail("truncated count block");
            if (tag == "end") break;
            if (tag != "c") fail("unexpected record '" + tag + "'");
            std::string tok;
            int64_t count = 0;
            if (!(in >> tok >> count)) fail("truncated count row");
            row[static_cast<size_t>(vocab->index_of(tok))] = count;
        }
        counts.emplace(std::move(hist), std::move(row));
    }
    return std::make_shared<NGramModel>(vocab, order, add_k, std::move(counts));
}

std::shared_ptr<NGramModel> train_ngram(VocabPtr vocab,
                                        const std::vector<std::vector<int32_t>>& sequences,
                                        int order, double add_k) {
    if (order < 1) {
        raise(Errc::invalid_argument, "n-gram order must be >= 1, got " + std::to_string(order));
    }
    const int32_t n = vocab->size();
    NGramModel::Counts counts;
    size_t total_tokens = 0;
    for (const auto& seq : sequences) {
        for (size_t t = 0; t < seq.size(); ++t) {
            if (seq[t] < 0 || seq[t] >= n) {
                raise(Errc::unknown_token,
                      "corpus token id " + std::to_string(seq[t]) + " out of range");
            }
            const size_t hist_len = std::min(static_cast<size_t>(order - 1), t);
            std::vector<int32_t> hist(seq.begin() + static_cast<ptrdiff_t>(t - hist_len),
                                      seq.begin() + static_cast<ptrdiff_t>(t));
            auto [it, inserted] =
                counts.try_emplace(std::move(hist), std::vector<int64_t>(static_cast<size_t>(n), 0));
            (void)inserted;
            ++it->second[static_cast<size_t>(seq[t])];
            ++total_tokens;
        }
    }
    if (total_tokens == 0 && add_k == 0.0) {
        raise(Errc::degenerate_model, "empty corpus with add_k = 0");
    }
    return std::make_shared<NGramModel>(std::move(vocab), order, add_k, std::move(counts));
}

// ---------------------------------------------------------------------------
// attribute_view

namespace {

class PromptedView final : public AttributeModel {
public:
    PromptedView(ModelPtr base, std::vector<int32_t> prompt)
        : base_(std::move(base)), prompt_(std::move(prompt)) {
        const int32_t n = base_->vocab()->size();
        for (int32_t id : prompt_) {
            if (id < 0 || id >= n) {
                raise(Errc::unknown_token,
                      "prompt token id " + std::to_string(id) + " out of range");
            }
        }
    }

    const VocabPtr& vocab() const override { return base_->vocab(); }

    TokenDistribution next_distribution(const Context& ctx) const override {
        Context full;
        full.tokens.reserve(prompt_.size() + ctx.tokens.size());
        full.tokens.insert(full.tokens.end(), prompt_.begin(), prompt_.end());
        full.tokens.insert(full.tokens.end(), ctx.tokens.begin(), ctx.tokens.end());
        return base_->next_distribution(full);
    }

private:
    ModelPtr base_;
    std::vector<int32_t> prompt_;
};

}  // namespace

ModelPtr attribute_view(ModelPtr base, std::vector<int32_t> prompt) {
    if (!base) raise(Errc::invalid_argument, "attribute_view requires a base model");
    if (prompt.empty()) return base;
    return std::make_shared<PromptedView>(std::move(base), std::move(prompt));
}

}  // namespace palette
