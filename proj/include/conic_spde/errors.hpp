#pragma once

#include <stdexcept>
#include <string>

namespace conic {

/// Invalid input: bad parameters, malformed configuration, out-of-range values.
/// The CLI maps this to exit status 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A query point is outside the domain or on its boundary.
class DomainMembershipError : public ValidationError {
public:
    explicit DomainMembershipError(const std::string& what) : ValidationError(what) {}
};

/// Divergence, non-convergence or another numerical breakdown (CLI exit 3).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

void require(bool condition, const std::string& message);

}  // namespace conic
