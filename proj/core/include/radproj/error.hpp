#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radproj {

enum class ErrorCode {
    invalid_input,     // malformed or out-of-range arguments
    support_overlap,   // a centre lies in or touches the support it is projected from
    grid_too_small,    // a lattice or histogram does not cover what it must
    constraint,        // exponent constraints on (d, s, t, p)
    io,                // file access and parse failures
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace radproj
