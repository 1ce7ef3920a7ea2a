#pragma once

#include <stdexcept>
#include <string>

namespace ed {

/// Failure categories. The CLI maps `numerical` and `degenerate` to exit
/// code 3 and everything else to exit code 2.
enum class ErrorKind {
    domain,      // argument outside the operation's domain
    dimension,   // length / shape mismatch
    degenerate,  // estimator undefined on a degenerate ensemble
    numerical,   // factorization or non-finite arithmetic failure
    parse,       // malformed input file
    validation,  // bad configuration or CLI arguments
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::domain: return "domain error";
        case ErrorKind::dimension: return "dimension error";
        case ErrorKind::degenerate: return "degenerate ensemble";
        case ErrorKind::numerical: return "numerical error";
        case ErrorKind::parse: return "parse error";
        case ErrorKind::validation: return "validation error";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace ed
