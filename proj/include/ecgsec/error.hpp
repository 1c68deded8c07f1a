#pragma once

#include <stdexcept>
#include <string>

namespace ecgsec {

// Failure codes shared across the library. The code name is embedded in
// every what() string so callers see the canonical name in diagnostics.
enum class errc {
    io_error,
    wrong_length,
    parse_error,
    non_finite,
    open_set_subject,
    insufficient_training,
    empty_training,
    empty_test,
    dimension_mismatch,
    no_convergence,
    no_features,
    bad_magic,
    version_mismatch,
    truncated,
    length_mismatch,
    bad_padding,
};

constexpr const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::io_error: return "IO_ERROR";
        case errc::wrong_length: return "WRONG_LENGTH";
        case errc::parse_error: return "PARSE_ERROR";
        case errc::non_finite: return "NON_FINITE";
        case errc::open_set_subject: return "OPEN_SET_SUBJECT";
        case errc::insufficient_training: return "INSUFFICIENT_TRAINING";
        case errc::empty_training: return "EMPTY_TRAINING";
        case errc::empty_test: return "EMPTY_TEST";
        case errc::dimension_mismatch: return "DIMENSION_MISMATCH";
        case errc::no_convergence: return "NO_CONVERGENCE";
        case errc::no_features: return "NO_FEATURES";
        case errc::bad_magic: return "BAD_MAGIC";
        case errc::version_mismatch: return "VERSION_MISMATCH";
        case errc::truncated: return "TRUNCATED";
        case errc::length_mismatch: return "LENGTH_MISMATCH";
        case errc::bad_padding: return "BAD_PADDING";
    }
    return "UNKNOWN";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

    errc code() const noexcept { return code_; }
    const char* name() const noexcept { return errc_name(code_); }

private:
    errc code_;
};

// Raised on the encrypted-container path (wrong key, tampered or malformed
// container). The CLI maps these to a distinct exit status.
class crypto_error : public error {
public:
    using error::error;
};

}  // namespace ecgsec
