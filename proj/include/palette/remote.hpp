#pragma once

#include <chrono>
#include <string>

#include "palette/providers.hpp"

namespace palette {

/// Client for a remote logits endpoint. Protocol: POST <endpoint>/logits
/// with body {"context": ["tok", ...]} answered by {"logprobs": [f, ...]}
/// carrying exactly vocab-size finite entries in declared vocabulary order.
/// The response may be unnormalized; the client softmax-normalizes it.
///
/// Error mapping: connection/timeout/non-200 -> Errc::transport, malformed
/// payload or wrong length -> Errc::schema_mismatch, non-finite entries ->
/// Errc::invalid_response.
class RemoteLogitClient final : public AttributeModel {
public:
    RemoteLogitClient(VocabPtr vocab, std::string endpoint,
                      std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

    const VocabPtr& vocab() const override { return vocab_; }

    /// Each call uses its own connection, so concurrent calls are safe.
    TokenDistribution next_distribution(const Context& ctx) const override;

    const std::string& endpoint() const { return endpoint_; }

private:
    VocabPtr vocab_;
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
};

}  // namespace palette
