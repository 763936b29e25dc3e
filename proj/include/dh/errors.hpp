#pragma once

#include <stdexcept>
#include <string>

namespace dh {

// Bad arguments, violated preconditions, malformed scenario input.
// The CLI maps this to exit code 2.
struct UsageError : std::invalid_argument {
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical contract was broken at runtime: probabilities negative beyond
// tolerance, non-Hermitian expectation input, distribution not normalized.
// The CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant failed; indicates a bug, not bad input.
// The CLI maps this to exit code 4.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace dh
