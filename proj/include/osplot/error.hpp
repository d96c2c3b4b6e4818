#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace osplot {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte position of the problem.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public ParseError {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : ParseError("unknown identifier '" + name + "'", offset), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(const std::string& name)
        : Error("unbound variable '" + name + "'"), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Evaluation left the domain of a function, or produced NaN/Inf.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input geometry too degenerate for the requested construction.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A parameter or interval lies outside what the data supports.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Root bracketing failed: the function does not change sign on the segment.
class BracketError : public Error {
public:
    using Error::Error;
};

class VerticalTangent : public Error {
public:
    using Error::Error;
};

} // namespace osplot
