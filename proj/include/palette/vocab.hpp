#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "palette/error.hpp"

namespace palette {

class Vocabulary;
using VocabPtr = std::shared_ptr<const Vocabulary>;

/// Ordered list of distinct token strings. Every model participating in a
/// combination must hold the same Vocabulary object; token ids are indices
/// into this list. The reserved token "<eot>", if present, marks
/// end-of-text for generation.
class Vocabulary {
public:
    static constexpr std::string_view kEndOfText = "<eot>";

    /// Tokens must be distinct and at least two. Throws Errc::invalid_argument.
    static VocabPtr from_tokens(std::vector<std::string> tokens);

    /// Loads a vocabulary file: one UTF-8 token per line, blank lines ignored.
    static VocabPtr load(const std::filesystem::path& path);

    int32_t size() const { return static_cast<int32_t>(tokens_.size()); }
    const std::string& token(int32_t id) const { return tokens_.at(static_cast<size_t>(id)); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    std::optional<int32_t> find(std::string_view tok) const;

    /// Like find() but throws Errc::unknown_token.
    int32_t index_of(std::string_view tok) const;

    std::optional<int32_t> end_of_text() const { return eot_; }

    /// Whitespace-splits `text` and maps every piece to its token id.
    /// Unknown pieces are rejected, not bucketed.
    std::vector<int32_t> tokenize(std::string_view text) const;

    /// Maps a list of token strings to ids.
    std::vector<int32_t> encode(const std::vector<std::string>& toks) const;

    std::string decode(const std::vector<int32_t>& ids, std::string_view sep = " ") const;

private:
    explicit Vocabulary(std::vector<std::string> tokens);

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int32_t> index_;
    std::optional<int32_t> eot_;
};

/// True when both handles refer to the same Vocabulary object.
inline bool same_vocab(const VocabPtr& a, const VocabPtr& b) { return a.get() == b.get(); }

}  // namespace palette
