#pragma once

#include <stdexcept>
#include <string>

namespace isosing {

// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorKind {
    input,      // malformed configuration, bad arguments, precondition violations
    numerical,  // ellipticity loss, domain exit, coefficient blow-up
    tolerance,  // a declared tolerance was not met
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

}  // namespace isosing
