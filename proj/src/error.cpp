#include "psa/error.hpp"

namespace psa {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DegenerateSegment: return "DegenerateSegment";
        case ErrorKind::TooFewVertices: return "TooFewVertices";
        case ErrorKind::ZeroAreaContour: return "ZeroAreaContour";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::InvalidBox: return "InvalidBox";
        case ErrorKind::NonPositiveScale: return "NonPositiveScale";
        case ErrorKind::BadPointCount: return "BadPointCount";
        case ErrorKind::DegenerateBox: return "DegenerateBox";
        case ErrorKind::MissingCanonicalPoses: return "MissingCanonicalPoses";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::JointCountMismatch: return "JointCountMismatch";
        case ErrorKind::NoVisibleJoints: return "NoVisibleJoints";
        case ErrorKind::BadThresholds: return "BadThresholds";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::TooFewValidPoints: return "TooFewValidPoints";
        case ErrorKind::NoValidPoints: return "NoValidPoints";
        case ErrorKind::TooFewVisibleJoints: return "TooFewVisibleJoints";
        case ErrorKind::TooFewPoses: return "TooFewPoses";
        case ErrorKind::FileNotFound: return "FileNotFound";
        case ErrorKind::MalformedDocument: return "MalformedDocument";
        case ErrorKind::NoApplicableRecords: return "NoApplicableRecords";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace psa
