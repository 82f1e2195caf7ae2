#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psa {

enum class ErrorKind {
    DegenerateSegment,
    TooFewVertices,
    ZeroAreaContour,
    NonFinite,
    InvalidBox,
    NonPositiveScale,
    BadPointCount,
    DegenerateBox,
    MissingCanonicalPoses,
    InvalidConfig,
    JointCountMismatch,
    NoVisibleJoints,
    BadThresholds,
    LengthMismatch,
    TooFewValidPoints,
    NoValidPoints,
    TooFewVisibleJoints,
    TooFewPoses,
    FileNotFound,
    MalformedDocument,
    NoApplicableRecords,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library-wide exception. Every failure raised by psa carries a kind so
/// callers (and tests) can branch on the cause without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace psa
