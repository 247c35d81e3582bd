#pragma once

#include <stdexcept>
#include <string>

namespace lockbom {

// Stable machine-readable error identifiers. The CLI prints these as
// `error_code=<name>` lines on stderr; tests match on them.
enum class ErrorCode {
    malformed_lockfile,
    unsupported_lock_version,
    not_a_directory,
    permission_denied,
    path_not_found,
    io_error,
    empty_name,
    malformed_sbom,
    missing_version,
    malformed_advisory,
    unparsable_version,
    count_inversion,
    tool_not_installed,
    timeout,
    unsupported_requirement_line,
    invalid_argument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const { return code_; }
    const char* code_name() const { return to_string(code_); }

private:
    ErrorCode code_;
};

} // namespace lockbom
