#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hcmab {

enum class ErrorKind {
    Domain,
    Shape,
    BiasViolation,
    InvalidAction,
    TooLarge,
    Io,
    Parse,
    Config,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(ErrorKind::Shape, what) {}
};

class BiasViolation : public Error {
public:
    BiasViolation(std::size_t arm, const std::string& what)
        : Error(ErrorKind::BiasViolation, what), arm_(arm) {}
    std::size_t arm() const noexcept { return arm_; }

private:
    std::size_t arm_;
};

class InvalidAction : public Error {
public:
    explicit InvalidAction(const std::string& what) : Error(ErrorKind::InvalidAction, what) {}
};

class TooLarge : public Error {
public:
    explicit TooLarge(const std::string& what) : Error(ErrorKind::TooLarge, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

}  // namespace hcmab
