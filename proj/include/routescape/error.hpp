#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace routescape {

/// Bad input: malformed files, out-of-range parameters, inconsistent
/// scenarios. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while computing a result from valid inputs (exit code 1).
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TopologyError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Syntax error in a line-oriented input file. line() is 1-based.
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A source-destination pair ended up with no admissible route.
class InfeasiblePairError : public ValidationError {
public:
    InfeasiblePairError(std::size_t src, std::size_t dst, const std::string& what)
        : ValidationError(what), src_(src), dst_(dst) {}

    std::size_t src() const noexcept { return src_; }
    std::size_t dst() const noexcept { return dst_; }

private:
    std::size_t src_;
    std::size_t dst_;
};

/// Brute-force enumeration refused because the space exceeds the cap.
class SpaceTooLargeError : public ValidationError {
public:
    SpaceTooLargeError(std::string size_text, const std::string& what)
        : ValidationError(what), size_text_(std::move(size_text)) {}

    const std::string& size_text() const noexcept { return size_text_; }

private:
    std::string size_text_;
};

/// The simulation ran but produced nothing to measure.
class DegenerateResultError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

/// A statistic is undefined for the given data (zero variance, too few samples).
class UndefinedStatisticError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

}  // namespace routescape
