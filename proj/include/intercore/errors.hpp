#ifndef INTERCORE_ERRORS_HPP
#define INTERCORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace intercore {

// Malformed or cross-inconsistent inputs (schemas, references, preconditions).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A network violated its own semantics during exploration (queue overflow,
// variable out of range, invariant-violating initial state).
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exploration exceeded a configured budget (states, extrapolation cap).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// API misuse, e.g. querying a clock that was not flagged at build time.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace intercore

#endif  // INTERCORE_ERRORS_HPP
