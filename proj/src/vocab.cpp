#include "palette/vocab.hpp"

#include <fstream>
#include <sstream>

namespace palette {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.size() < 2) {
        raise(Errc::invalid_argument, "vocabulary needs at least 2 tokens, got " +
                                          std::to_string(tokens_.size()));
    }
    index_.reserve(tokens_.size());
    for (size_t i = 0; i < tokens_.size(); ++i) {
        if (tokens_[i].empty()) {
            raise(Errc::invalid_argument, "vocabulary token " + std::to_string(i) + " is empty");
        }
        if (tokens_[i].find_first_of(" \t\r\n") != std::string::npos) {
            raise(Errc::invalid_argument,
                  "vocabulary token '" + tokens_[i] + "' contains whitespace");
        }
        auto [it, inserted] = index_.emplace(tokens_[i], static_cast<int32_t>(i));
        (void)it;
        if (!inserted) {
            raise(Errc::invalid_argument, "duplicate vocabulary token '" + tokens_[i] + "'");
        }
        if (tokens_[i] == kEndOfText) {
            eot_ = static_cast<int32_t>(i);
        }
    }
}

VocabPtr Vocabulary::from_tokens(std::vector<std::string> tokens) {
    return VocabPtr(new Vocabulary(std::move(tokens)));
}

VocabPtr Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io, "cannot open vocabulary file " + path.string());
    }
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) tokens.push_back(line);
    }
    return from_tokens(std::move(tokens));
}

std::optional<int32_t> Vocabulary::find(std::string_view tok) const {
    auto it = index_.find(std::string(tok));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int32_t Vocabulary::index_of(std::string_view tok) const {
    auto id = find(tok);
    if (!id) {
        raise(Errc::unknown_token, "'" + std::string(tok) + "' is not in the vocabulary");
    }
    return *id;
}

std::vector<int32_t> Vocabulary::tokenize(std::string_view text) const {
    std::vector<int32_t> out;
    std::istringstream ss{std::string(text)};
    std::string piece;
    while (ss >> piece) {
        out.push_back(index_of(piece));
    }
    return out;
}

std::vector<int32_t> Vocabulary::encode(const std::vector<std::string>& toks) const {
    std::vector<int32_t> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(index_of(t));
    return out;
}

std::string Vocabulary::decode(const std::vector<int32_t>& ids, std::string_view sep) const {
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out += sep;
        out += token(ids[i]);
    }
    return out;
}

}  // namespace palette
