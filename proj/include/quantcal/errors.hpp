#pragma once

#include <stdexcept>
#include <string>

namespace quantcal {

// Violated precondition on library input (bad level, length mismatch,
// malformed parameter). The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file. Message carries row/column context.
class ParseError : public InputError {
public:
    using InputError::InputError;
};

// Bad command-line usage. The CLI maps this to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace quantcal
