#pragma once

#include <stdexcept>
#include <string>

namespace ffrank {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotAPrimePower : Error {
    using Error::Error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct Infeasible : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    using Error::Error;
};

struct DivisibilityError : Error {
    using Error::Error;
};

struct RejectionBudgetExhausted : Error {
    using Error::Error;
};

struct IntegralityError : Error {
    using Error::Error;
};

struct SizeLimit : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace ffrank
