#pragma once

#include <stdexcept>
#include <string>

namespace cabinfare {

// Error taxonomy maps onto CLI exit codes: DataError -> 2, EstimationError -> 3.
// Malformed input files (syntax, schema) are data errors too, so ParseError
// derives from DataError.

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public DataError {
public:
    ParseError(const std::string& file, long line, const std::string& msg)
        : DataError(file + ":" + std::to_string(line) + ": " + msg),
          line_(line) {}
    explicit ParseError(const std::string& msg) : DataError(msg), line_(-1) {}
    long line() const { return line_; }

private:
    long line_;
};

class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cabinfare
