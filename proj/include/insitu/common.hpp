#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace insitu {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline const Vec3 kUp{0.0, 1.0, 0.0};

/// Minimum radius of any lathe profile point, in meters.
inline constexpr double kMinProfileRadius = 0.002;

enum class ErrorCode {
    // design-core
    UnknownParameter,
    KindMismatch,
    NoHandle,
    NonLengthParameter,
    UnknownDesign,
    // design-dsl
    SyntaxError,
    DuplicateParameter,
    UnknownReference,
    InvalidDefault,
    UnboundGeneratorSlot,
    // geometry-kernel
    OutOfRangeT,
    InvalidConfiguration,
    DegenerateProfile,
    EmptyMesh,
    // sketch-fit
    DegenerateStroke,
    InsufficientPoints,
    // ergonomics
    UnknownTag,
    InvalidProfile,
    EmptyProfileList,
    // environment
    ParseError,
    EmptyScan,
    NonTriangulated,
    // estimators
    NoSupportPlane,
    LightInsideMesh,
    EmptyScene,
    UnknownClauseForDesignKind,
    // plumbing
    IoError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double value);

/// Every failure the library reports is an Error carrying a stable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// An Error tied to a position in a source document (1-based).
class SourceError : public Error {
public:
    SourceError(ErrorCode code, int line, int column, const std::string& message);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class SyntaxError : public SourceError {
public:
    SyntaxError(int line, int column, const std::string& message)
        : SourceError(ErrorCode::SyntaxError, line, column, message) {}
};

}  // namespace insitu
