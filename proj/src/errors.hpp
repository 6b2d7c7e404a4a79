#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace askl {

// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument or configuration: bad shapes, out-of-range values,
// violated preconditions.
class argument_error : public error {
public:
    explicit argument_error(const std::string& what) : error(what) {}
};

// Malformed input text (dataset files, config JSON, model artifacts).
class parse_error : public error {
public:
    explicit parse_error(const std::string& what) : error(what) {}
};

// Filesystem failures: missing files, unreadable or unwritable paths.
class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(what) {}
};

// Numerical failure inside an algorithm. Carries the residual that
// triggered it when one is available.
class numeric_error : public error {
public:
    explicit numeric_error(const std::string& what, double residual = 0.0)
        : error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Training produced a non-finite parameter. Carries the 1-based iteration
// at which the check fired.
class diverged_error : public numeric_error {
public:
    diverged_error(const std::string& what, std::int64_t iteration)
        : numeric_error(what), iteration_(iteration) {}
    std::int64_t iteration() const { return iteration_; }

private:
    std::int64_t iteration_;
};

}  // namespace askl
