#pragma once

#include <stdexcept>
#include <string>

namespace prlat {

// Error taxonomy shared by all modules. The CLI maps each code to a
// distinct process exit code (see tools/prlat.cpp and README).
enum class ErrorCode {
    Io = 1,
    Parse,
    SchemaMismatch,
    Corrupt,
    Auth,
    NotFound,
    RateLimited,
    Transport,
    Degenerate,
    TooFewRows,
    FeatureMismatch,
    Domain,
    MissingContext,
    NonFinite,
    Leakage,
    Usage,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::Io: return "Io";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::Corrupt: return "Corrupt";
        case ErrorCode::Auth: return "Auth";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::RateLimited: return "RateLimited";
        case ErrorCode::Transport: return "Transport";
        case ErrorCode::Degenerate: return "Degenerate";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::FeatureMismatch: return "FeatureMismatch";
        case ErrorCode::Domain: return "Domain";
        case ErrorCode::MissingContext: return "MissingContext";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::Leakage: return "Leakage";
        case ErrorCode::Usage: return "Usage";
    }
    return "Unknown";
}

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

}  // namespace prlat
