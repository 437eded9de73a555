#pragma once

#include <stdexcept>
#include <string>

namespace gfad {

/// Error categories surfaced to the CLI as distinct exit codes.
enum class ErrorKind { config, io, numeric, mismatch, placement, domain };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(ErrorKind::numeric, w) {}
};
struct MismatchError : Error {
    explicit MismatchError(const std::string& w) : Error(ErrorKind::mismatch, w) {}
};
struct PlacementError : Error {
    explicit PlacementError(const std::string& w) : Error(ErrorKind::placement, w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::mismatch: return "mismatch";
    case ErrorKind::placement: return "placement";
    case ErrorKind::domain: return "domain";
    }
    return "unknown";
}

} // namespace gfad
