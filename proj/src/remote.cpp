#include "palette/remote.hpp"

#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "palette/log.hpp"

namespace palette {

RemoteLogitClient::RemoteLogitClient(VocabPtr vocab, std::string endpoint,
                                     std::chrono::milliseconds timeout)
    : vocab_(std::move(vocab)), endpoint_(std::move(endpoint)), timeout_(timeout) {
    if (!vocab_) raise(Errc::invalid_argument, "remote client requires a vocabulary");
    if (endpoint_.empty()) raise(Errc::invalid_argument, "remote client requires an endpoint");
}

TokenDistribution RemoteLogitClient::next_distribution(const Context& ctx) const {
    check_context(ctx);

    nlohmann::json body;
    auto& arr = body["context"] = nlohmann::json::array();
    for (int32_t id : ctx.tokens) arr.push_back(vocab_->token(id));

    httplib::Client client(endpoint_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    logging::debug("POST " + endpoint_ + "/logits (" + std::to_string(ctx.tokens.size()) +
                   " context tokens)");
    auto res = client.Post("/logits", body.dump(), "application/json");
    if (!res) {
        raise(Errc::transport, "request to " + endpoint_ + "/logits failed: " +
                                   httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        raise(Errc::transport,
              endpoint_ + "/logits returned HTTP " + std::to_string(res->status));
    }

    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) {
        // JSON cannot carry non-finite numbers; servers leak them either as
        // bare NaN/Infinity literals (breaking the parse) or as null.
        if (res->body.find("NaN") != std::string::npos ||
            res->body.find("Infinity") != std::string::npos) {
            raise(Errc::invalid_response, "response contains non-finite log-probabilities");
        }
        raise(Errc::schema_mismatch, "response is not valid JSON");
    }
    if (!reply.is_object() || !reply.contains("logprobs") || !reply["logprobs"].is_array()) {
        raise(Errc::schema_mismatch, "response is not an object with a `logprobs` array");
    }
    const auto& lp = reply["logprobs"];
    if (static_cast<int32_t>(lp.size()) != vocab_->size()) {
        raise(Errc::schema_mismatch, "expected " + std::to_string(vocab_->size()) +
                                         " logprobs, got " + std::to_string(lp.size()));
    }
    std::vector<double> weights(lp.size());
    for (size_t i = 0; i < lp.size(); ++i) {
        if (lp[i].is_null()) {
            raise(Errc::invalid_response, "logprob " + std::to_string(i) + " is not finite");
        }
        if (!lp[i].is_number()) {
            raise(Errc::schema_mismatch, "logprob " + std::to_string(i) + " is not a number");
        }
        weights[i] = lp[i].get<double>();
        if (!std::isfinite(weights[i])) {
            raise(Errc::invalid_response, "logprob " + std::to_string(i) + " is not finite");
        }
    }
    return softmax_normalize(LogWeights(vocab_, std::move(weights)));
}

}  // namespace palette
