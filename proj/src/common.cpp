#include "insitu/common.hpp"

#include <charconv>
#include <cmath>

namespace insitu {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownParameter: return "UnknownParameter";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::NoHandle: return "NoHandle";
        case ErrorCode::NonLengthParameter: return "NonLengthParameter";
        case ErrorCode::UnknownDesign: return "UnknownDesign";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::DuplicateParameter: return "DuplicateParameter";
        case ErrorCode::UnknownReference: return "UnknownReference";
        case ErrorCode::InvalidDefault: return "InvalidDefault";
        case ErrorCode::UnboundGeneratorSlot: return "UnboundGeneratorSlot";
        case ErrorCode::OutOfRangeT: return "OutOfRangeT";
        case ErrorCode::InvalidConfiguration: return "InvalidConfiguration";
        case ErrorCode::DegenerateProfile: return "DegenerateProfile";
        case ErrorCode::EmptyMesh: return "EmptyMesh";
        case ErrorCode::DegenerateStroke: return "DegenerateStroke";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::UnknownTag: return "UnknownTag";
        case ErrorCode::InvalidProfile: return "InvalidProfile";
        case ErrorCode::EmptyProfileList: return "EmptyProfileList";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptyScan: return "EmptyScan";
        case ErrorCode::NonTriangulated: return "NonTriangulated";
        case ErrorCode::NoSupportPlane: return "NoSupportPlane";
        case ErrorCode::LightInsideMesh: return "LightInsideMesh";
        case ErrorCode::EmptyScene: return "EmptyScene";
        case ErrorCode::UnknownClauseForDesignKind: return "UnknownClauseForDesignKind";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

std::string format_number(double value) {
    if (value == 0.0) return "0";  // folds -0
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return std::to_string(value);
    return std::string(buf, end);
}

SourceError::SourceError(ErrorCode code, int line, int column, const std::string& message)
    : Error(code, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace insitu
