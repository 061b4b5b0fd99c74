#pragma once

#include <stdexcept>
#include <string>

namespace mgtdetect {

// Base of every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// A feature that has no value for a degenerate document (e.g. zero words).
class UndefinedFeature : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public TrainingError {
public:
    DivergenceError(const std::string& what, int epoch)
        : TrainingError(what + " at epoch " + std::to_string(epoch)), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

// Raised while assembling an input vector when a store lacks a document.
class AssemblyError : public Error {
public:
    using Error::Error;
};

}  // namespace mgtdetect
