#pragma once

#include <stdexcept>
#include <string>

namespace wfbound {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (trace files, histogram configs). Carries a line
/// number when one is known.
class parse_error : public error {
public:
    explicit parse_error(const std::string& what, long line = -1)
        : error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

/// A domain invariant does not hold (decreasing times, empty sequence,
/// label with too few instances for stratification, ...).
class validation_error : public error {
public:
    using error::error;
};

/// Bad or inconsistent configuration (defense parameters, metric/schema
/// pairing, CLI options).
class config_error : public error {
public:
    using error::error;
};

/// Filesystem-level failure.
class io_error : public error {
public:
    using error::error;
};

}  // namespace wfbound
