#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace palette {

/// Failure categories surfaced by the library. CLI exit codes map onto
/// these (config/validation -> 1, verification -> 2, transport -> 3).
enum class Errc {
    invalid_weight,
    invalid_probability,
    unknown_token,
    vocab_mismatch,
    degenerate_model,
    degenerate_product,
    degenerate_instance,
    empty_sequence,
    empty_terms,
    empty_report,
    invalid_scenario,
    invalid_argument,
    schema_mismatch,
    invalid_response,
    transport,
    config,
    io,
};

std::string_view errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) {
    throw Error(code, msg);
}

inline std::string_view errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_weight:      return "invalid weight";
        case Errc::invalid_probability: return "invalid probability";
        case Errc::unknown_token:       return "unknown token";
        case Errc::vocab_mismatch:      return "vocabulary mismatch";
        case Errc::degenerate_model:    return "degenerate model";
        case Errc::degenerate_product:  return "degenerate product";
        case Errc::degenerate_instance: return "degenerate instance";
        case Errc::empty_sequence:      return "empty sequence";
        case Errc::empty_terms:         return "empty term list";
        case Errc::empty_report:        return "empty report";
        case Errc::invalid_scenario:    return "invalid scenario";
        case Errc::invalid_argument:    return "invalid argument";
        case Errc::schema_mismatch:     return "schema mismatch";
        case Errc::invalid_response:    return "invalid response";
        case Errc::transport:           return "transport error";
        case Errc::config:              return "config error";
        case Errc::io:                  return "io error";
    }
    return "error";
}

}  // namespace palette
