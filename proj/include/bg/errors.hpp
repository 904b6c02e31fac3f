#pragma once

#include <stdexcept>
#include <string>

namespace bg {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller violated a precondition (bad config, empty input, invalid handle).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// A query argument lies outside the valid domain (position, occurrence index).
class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& msg) : Error(msg) {}
};

/// rank/select was asked about a symbol that carries no rank metadata.
class UntrackedSymbol : public Error {
public:
    explicit UntrackedSymbol(const std::string& msg) : Error(msg) {}
};

/// Construction exhausted its retry budget without producing a graph that
/// reproduces the input.
class BuildError : public Error {
public:
    explicit BuildError(const std::string& msg) : Error(msg) {}
};

/// Serialized input that is not a graph file at all.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// Graph file written by an incompatible format version.
class VersionError : public Error {
public:
    explicit VersionError(const std::string& msg) : Error(msg) {}
};

/// Graph file whose trailer checksum does not match its contents.
class ChecksumError : public Error {
public:
    explicit ChecksumError(const std::string& msg) : Error(msg) {}
};

/// Graph file that ends before its body does.
class TruncatedError : public Error {
public:
    explicit TruncatedError(const std::string& msg) : Error(msg) {}
};

/// I/O failure while reading or writing a file.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace bg
