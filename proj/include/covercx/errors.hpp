#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covercx {

// Base for every error raised by the library. Callers that batch work
// (scan, report) catch this type and record the message per item.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorruptImage : public Error {
public:
    using Error::Error;
};

class InvalidDimensions : public Error {
public:
    using Error::Error;
};

class ImageTooSmall : public Error {
public:
    using Error::Error;
};

class InvalidPatchSize : public Error {
public:
    using Error::Error;
};

class DegenerateClustering : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnknownClass : public Error {
public:
    using Error::Error;
};

class DuplicateImage : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class UnknownSupergenre : public Error {
public:
    using Error::Error;
};

class EmptyCorpus : public Error {
public:
    using Error::Error;
};

class MissingMetrics : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace covercx
