#pragma once

#include <stdexcept>
#include <string>

namespace ladrag {

// Base of all ladrag failures. The CLI maps subclasses to exit codes:
// usage 2, config 3, data 4, transport 5.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input bytes (JSON that does not parse, ids that do not scan).
class ParseError : public Error {
public:
    using Error::Error;
};

// Recognized format, unknown schema_version.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A graph (or index) breaks a structural invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed GraphQuery; message names the offending predicate.
class QueryError : public Error {
public:
    using Error::Error;
};

class UnknownNodeError : public Error {
public:
    using Error::Error;
};

class EmptyGraphError : public Error {
public:
    using Error::Error;
};

class EmptyIndexError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class AuthError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

// Replay mode saw a request with no recorded response; names the fingerprint.
class ReplayMissError : public Error {
public:
    ReplayMissError(const std::string& fingerprint, const std::string& message)
        : Error(message), fingerprint_(fingerprint) {}

    const std::string& fingerprint() const { return fingerprint_; }

private:
    std::string fingerprint_;
};

// Model output could not be parsed as the prompted JSON schema, even after
// one repair retry. Carries the raw model output for diagnosis.
class PageParseError : public Error {
public:
    PageParseError(const std::string& message, std::string raw_output)
        : Error(message), raw_output_(std::move(raw_output)) {}

    const std::string& raw_output() const { return raw_output_; }

private:
    std::string raw_output_;
};

}  // namespace ladrag
