#pragma once

// Error taxonomy shared by the toolkit. The CLI maps these onto exit codes:
// validation failures -> 2, verification failures -> 3, incomplete data -> 4.

#include <stdexcept>
#include <string>

namespace pathcert {

// Bad arguments, malformed configs/files, violated preconditions.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A dataset is well-formed but missing settings an estimator needs.
struct IncompleteDataError : std::runtime_error {
    explicit IncompleteDataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A compiled optical setting failed its simulator-backed verification.
struct VerificationError : std::runtime_error {
    explicit VerificationError(const std::string& msg) : std::runtime_error(msg) {}
};

// An optical network routes two amplitudes onto the same mode incoherently.
struct LayoutError : std::runtime_error {
    explicit LayoutError(const std::string& msg) : std::runtime_error(msg) {}
};

}
