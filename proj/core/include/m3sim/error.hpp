#pragma once

#include <stdexcept>
#include <string>

namespace m3sim {

enum class ErrorKind {
    Validation,  // bad input: malformed file, violated invariant, bad config
    Runtime,     // valid input that fails during execution (I/O, coverage gaps)
};

/// Every error raised by the library carries the module that raised it, so the
/// CLI can report "<module>: <message>" and map the kind onto an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string module, const std::string& message)
        : Error(ErrorKind::Validation, std::move(module), message) {}
};

class RuntimeError : public Error {
public:
    RuntimeError(std::string module, const std::string& message)
        : Error(ErrorKind::Runtime, std::move(module), message) {}
};

}  // namespace m3sim
