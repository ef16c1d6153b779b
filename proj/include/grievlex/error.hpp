#pragma once

#include <stdexcept>
#include <string>

namespace grievlex {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file contents. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg, std::string path = {}, long line = 0)
        : Error(format(msg, path, line)), path_(std::move(path)), line_(line) {}

    const std::string& path() const { return path_; }
    long line() const { return line_; }

private:
    static std::string format(const std::string& msg, const std::string& path, long line) {
        std::string out;
        if (!path.empty()) {
            out += path;
            out += ": ";
        }
        if (line > 0) {
            out += "line ";
            out += std::to_string(line);
            out += ": ";
        }
        out += msg;
        return out;
    }

    std::string path_;
    long line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// Inputs with no variance where a variance-based statistic is requested.
class DegenerateError : public NumericError {
public:
    using NumericError::NumericError;
};

class UndefinedAlphaError : public NumericError {
public:
    using NumericError::NumericError;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class BuildError : public Error {
public:
    using Error::Error;
};

} // namespace grievlex
