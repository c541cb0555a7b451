#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// x < 0 with a fractional exponent, derivative of a fractional polynomial, ...
struct domain_error : error {
    using error::error;
};

struct precision_error : error {
    using error::error;
};

struct convergence_error : error {
    using error::error;
};

struct infeasible_error : error {
    using error::error;
};

struct parse_error : error {
    using error::error;
};

} // namespace qsl
