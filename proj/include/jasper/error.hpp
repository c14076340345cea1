#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jasper {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A key without one of the recognised namespace prefixes.
class NamespaceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A malformed line in a config or list file. `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ListFormatError : public ParseError {
public:
    using ParseError::ParseError;
};

class RequestError : public Error {
public:
    using Error::Error;
};

/// A custom token used without the argument it requires.
class TokenUsageError : public Error {
public:
    using Error::Error;
};

} // namespace jasper
