#pragma once

#include <stdexcept>
#include <string>

namespace coresched {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model parameters. `field()` names the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// The caller asked for something outside an operation's domain.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A strategy or run configuration cannot be executed as given.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A strategy emitted a row whose fractions exceed the eta cap.
class BudgetViolation : public Error {
public:
    using Error::Error;
};

/// Oracle instance larger than the configured search limits.
class OracleLimitError : public UsageError {
public:
    using UsageError::UsageError;
};

} // namespace coresched
