#pragma once

#include <stdexcept>
#include <string>

namespace ledit {

// Error taxonomy used across the library. The CLI maps DataError and its
// children to exit code 3, std::invalid_argument to 2, everything else to 4.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public DataError {
public:
    explicit IoError(const std::string& msg) : DataError(msg) {}
};

class ParseError : public DataError {
public:
    ParseError(const std::string& msg, int line)
        : DataError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

// No noun or adjective available to mask in a caption.
class NoEditableTokenError : public DataError {
public:
    using DataError::DataError;
};

// Candidate pool too small (or empty) for the requested augmentation.
class AugmentationUnavailableError : public DataError {
public:
    using DataError::DataError;
};

// Failure inside a pluggable adapter (caption refiner, masked LM), wrapped.
class AdapterError : public DataError {
public:
    using DataError::DataError;
};

} // namespace ledit
