#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace kpcov {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fewer distinct locations than an operation needs.
class InsufficientPoints : public Error {
public:
    InsufficientPoints(std::size_t have, std::size_t need)
        : Error("insufficient points: " + std::to_string(have) + " distinct location(s), need at least " +
                std::to_string(need)),
          have_(have),
          need_(need) {}

    std::size_t have() const noexcept { return have_; }
    std::size_t need() const noexcept { return need_; }

private:
    std::size_t have_;
    std::size_t need_;
};

class ImageMismatch : public Error {
public:
    using Error::Error;
};

class DatasetMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateCounts : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Malformed file content. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string message, std::string source = {})
        : Error(format(line, message, source)), line_(line), message_(std::move(message)), source_(std::move(source)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }
    const std::string& source() const noexcept { return source_; }

    /// Same error attributed to a file path.
    ParseError with_source(std::string source) const { return ParseError(line_, message_, std::move(source)); }

private:
    static std::string format(std::size_t line, const std::string& message, const std::string& source) {
        std::string out = source;
        if (line != 0) out += (out.empty() ? "line " : ":") + std::to_string(line);
        if (!out.empty()) out += ": ";
        return out + message;
    }

    std::size_t line_;
    std::string message_;
    std::string source_;
};

/// Input holds no bytes other than whitespace. Distinct from a valid file with zero points.
class EmptyFile : public ParseError {
public:
    explicit EmptyFile(std::string source = {}) : ParseError(0, "empty file", std::move(source)) {}
};

class ManifestError : public Error {
public:
    using Error::Error;
};

class KbError : public Error {
public:
    using Error::Error;
};

class NoCandidates : public Error {
public:
    using Error::Error;
};

}  // namespace kpcov
