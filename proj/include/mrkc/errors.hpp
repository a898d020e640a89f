#pragma once

#include <stdexcept>
#include <string>

namespace mrkc {

/// Bad arguments: non-finite input, zero stage count, mismatched dimensions.
class InvalidInputError : public std::invalid_argument {
public:
    explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Coefficient construction overflowed (extreme stage count / damping).
class NumericOverflowError : public std::runtime_error {
public:
    explicit NumericOverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// A stage of an integrator produced a non-finite value.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, int stage, double time)
        : std::runtime_error(what), stage_(stage), time_(time) {}
    int stage() const noexcept { return stage_; }
    double time() const noexcept { return time_; }

private:
    int stage_;
    double time_;
};

/// Spectral-radius estimation could not produce a finite estimate.
class EstimationFailedError : public std::runtime_error {
public:
    explicit EstimationFailedError(const std::string& what) : std::runtime_error(what) {}
};

/// A scan was requested outside the region its theorem covers; the message
/// names the violated inequality.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mrkc
