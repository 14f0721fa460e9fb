#pragma once

#include <stdexcept>
#include <string>

namespace minsum {

// Raised when an iteration or solver leaves the representable range:
// non-finite iterates, non-positive belief denominators, eigensolver
// stagnation, generator retry exhaustion.  The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, int step = -1)
        : std::runtime_error(what), step_(step) {}

    // Step index at which the failure was detected, -1 if not step-related.
    int step() const { return step_; }

private:
    int step_;
};

}  // namespace minsum
