#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dephase {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A declarative configuration failed validation. Carries one entry per
/// offending field so callers can report every problem at once.
struct ConfigError : Error {
    std::vector<std::string> issues;

    explicit ConfigError(std::vector<std::string> problems)
        : Error(join(problems)), issues(std::move(problems)) {}

    explicit ConfigError(const std::string& single)
        : Error(single), issues{single} {}

  private:
    static std::string join(const std::vector<std::string>& problems) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) {
            msg += "\n  - ";
            msg += p;
        }
        return msg;
    }
};

/// A precondition of an operation was violated (e.g. mixed state passed
/// where a pure one is required).
struct PreconditionError : Error {
    using Error::Error;
};

/// Requested full-space dimension exceeds the configured oracle cap.
struct SizeCapError : Error {
    long long dim;
    long long cap;

    SizeCapError(long long requested, long long limit)
        : Error("full product space dimension D = " + std::to_string(requested) +
                " exceeds the size cap " + std::to_string(limit)),
          dim(requested), cap(limit) {}
};

/// beta*hbar*Omega <= 0: the thermal state is not normalizable.
struct InvalidTemperatureError : PreconditionError {
    using PreconditionError::PreconditionError;
};

/// Phase-state index m outside 0..r_trunc.
struct InvalidPhaseIndexError : PreconditionError {
    using PreconditionError::PreconditionError;
};

}  // namespace dephase
