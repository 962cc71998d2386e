#pragma once

#include <stdexcept>
#include <string>

namespace qreflect {

// Rejected input or a violated precondition on user-supplied data.
// Maps to exit code 1 in the CLI.
class UserError : public std::runtime_error {
public:
    explicit UserError(const std::string& what) : std::runtime_error(what) {}
};

// A cross-check that theory guarantees has failed. Indicates a bug (or a
// corrupted group) and maps to exit code 2 in the CLI.
class ConsistencyError : public std::runtime_error {
public:
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qreflect
