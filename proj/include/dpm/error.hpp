#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Vocabulary or trace construction violated a model invariant.
class ModelError : public Error
{
public:
    using Error::Error;
};

/// Malformed formula text. `position` is a 0-based byte offset into the input.
class SyntaxError : public Error
{
public:
    SyntaxError( const std::string& message, std::size_t position )
        : Error( message + " at offset " + std::to_string( position ) ), _position{ position } {}

    [[nodiscard]] std::size_t position() const { return _position; }

private:
    std::size_t _position;
};

/// Well-formed formula that does not type-check against the vocabulary.
class TypeError : public Error
{
public:
    using Error::Error;
};

/// Operation applied to an argument outside its contract
/// (e.g. evaluating a formula that still contains activity variables).
class UsageError : public Error
{
public:
    using Error::Error;
};

/// Problem reading or decoding a model or log file.
/// Line and column are 1-based; 0 means unknown.
class IoError : public Error
{
public:
    explicit IoError( const std::string& message, std::size_t line = 0, std::size_t column = 0 )
        : Error( line == 0 ? message
                           : message + " (line " + std::to_string( line ) +
                                 ( column ? ", column " + std::to_string( column ) : std::string{} ) + ")" ),
          _line{ line }, _column{ column } {}

    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }

private:
    std::size_t _line;
    std::size_t _column;
};

} // namespace dpm
