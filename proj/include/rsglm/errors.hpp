#pragma once

#include <stdexcept>
#include <string>

namespace rsglm {

// Bad inputs: malformed files, impossible configurations, contract violations.
// The CLI maps these to exit code 1.
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failures: rank deficiency, singular systems, unidentifiable
// parameters. The CLI maps these to exit code 2.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rsglm
