#pragma once

#include <stdexcept>
#include <string>

namespace trajmatch {

/// Raised for malformed input data or configuration (CLI exit code 2).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace trajmatch
