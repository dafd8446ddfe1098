#pragma once

#include <stdexcept>
#include <string>

namespace winop {

// Base for every error the library raises. Callers that only need a
// diagnostic can catch this; the subclasses let tests and the sweep tell
// failure kinds apart.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Zero variance, constant input and similar inputs a statistic cannot handle.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    AlignmentError(const std::string& field, const std::string& detail)
        : Error("series misaligned on '" + field + "': " + detail), field_(field) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class GapError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& detail)
        : Error(source + ":" + std::to_string(line) + ": " + detail), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what + " (residual KKT violation " + std::to_string(residual) + ")"),
          residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace winop
