#pragma once

#include <stdexcept>
#include <string>

namespace pcalc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class DialectMismatch : public Error {
public:
    using Error::Error;
};

/// A closed term was required.
class OpenTerm : public Error {
public:
    using Error::Error;
};

/// An exact algorithm was given an LTS whose exploration was cut off.
class TruncatedInput : public Error {
public:
    using Error::Error;
};

class SaturationOnTruncated : public TruncatedInput {
public:
    using TruncatedInput::TruncatedInput;
};

class UnknownState : public Error {
public:
    using Error::Error;
};

/// The request violates an operation's contract (e.g. evidence for an
/// equivalent pair, an empty test family, a zero budget).
class InvalidRequest : public Error {
public:
    using Error::Error;
};

}  // namespace pcalc
