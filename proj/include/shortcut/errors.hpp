#pragma once

#include <stdexcept>
#include <string>

namespace shortcut {

// Base class for every error raised by the library. `code()` is a stable,
// machine-readable token used by the CLI's one-line error output.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("CONFIG", message) {}
};

class InfeasibleOrderError : public Error {
public:
    InfeasibleOrderError(std::string order_id, const std::string& message)
        : Error("INFEASIBLE_ORDER", "order " + order_id + ": " + message),
          order_id_(std::move(order_id)) {}

    const std::string& order_id() const noexcept { return order_id_; }

private:
    std::string order_id_;
};

class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& message) : Error("GENERATION", message) {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& message) : Error("DEGENERATE_TRAINING", message) {}
};

class ModelError : public Error {
public:
    ModelError(std::string code, const std::string& message) : Error(std::move(code), message) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("SHAPE", message) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& message)
        : Error("PARSE", path + ":" + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class VersionError : public Error {
public:
    explicit VersionError(const std::string& message) : Error("VERSION", message) {}
};

} // namespace shortcut
