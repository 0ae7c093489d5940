#pragma once

#include <stdexcept>
#include <string>

namespace goalspot {

// Raised on out-of-range arguments and infeasible parameters.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (e.g. an analysis built
// against a different knowledge base).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace goalspot
