#pragma once

#include <stdexcept>
#include <string>

namespace attic {

// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid distribution parameters or violated call contracts (exit code 2).
struct ContractError : Error {
    using Error::Error;
};

// A model broke the fixed-observation or addressing contract (exit code 2).
struct ModelError : ContractError {
    using ContractError::ContractError;
};

// Non-finite values, singular systems, degenerate weight sets (exit code 3).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace attic
