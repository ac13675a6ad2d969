#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "insitu/bezier.hpp"
#include "insitu/common.hpp"

namespace insitu {

// ---------------------------------------------------------------------------
// Parameter kinds
// ---------------------------------------------------------------------------

/// Physical unit of a numeric parameter. Lengths are always stored in meters.
enum class Unit { none, meters, degrees, count };

std::string_view to_string(Unit unit);

struct ContinuousKind {
    double min = 0.0;
    double max = 1.0;
    Unit unit = Unit::none;
    bool operator==(const ContinuousKind&) const = default;
};

struct DiscreteKind {
    std::vector<double> levels;  // strictly increasing
    Unit unit = Unit::none;
    bool operator==(const DiscreteKind&) const = default;
};

struct OptionKind {
    std::vector<std::string> labels;
    bool operator==(const OptionKind&) const = default;
};

struct BooleanKind {
    bool operator==(const BooleanKind&) const = default;
};

struct TextKind {
    int max_len = 0;
    bool operator==(const TextKind&) const = default;
};

enum class CurvePlane { lathe_profile, silhouette };

std::string_view to_string(CurvePlane plane);

struct CurveKind {
    int segment_budget = 1;
    CurvePlane plane = CurvePlane::lathe_profile;
    bool operator==(const CurveKind&) const = default;
};

using ParameterKind =
    std::variant<ContinuousKind, DiscreteKind, OptionKind, BooleanKind, TextKind, CurveKind>;

/// Continuous and discrete parameters hold doubles, booleans hold bool,
/// option and text parameters hold strings, curves hold a BezierPath.
using Value = std::variant<double, bool, std::string, BezierPath>;

std::string_view kind_name(const ParameterKind& kind);
bool is_numeric(const ParameterKind& kind);
bool is_length(const ParameterKind& kind);
bool value_matches_kind(const ParameterKind& kind, const Value& value);

// ---------------------------------------------------------------------------
// Constraints, handles, ergonomics, generator binding
// ---------------------------------------------------------------------------

struct Configuration;

/// scale * ref + offset, or just offset when ref is empty.
struct LinearForm {
    std::optional<std::string> ref;
    double scale = 1.0;
    double offset = 0.0;

    static LinearForm constant(double v) { return LinearForm{std::nullopt, 1.0, v}; }
    static LinearForm of(std::string name, double scale = 1.0, double offset = 0.0) {
        return LinearForm{std::move(name), scale, offset};
    }

    double eval(const Configuration& config) const;
    std::string to_text() const;
    bool operator==(const LinearForm&) const = default;
};

/// Bound on one numeric parameter: lo <= target <= hi. The constraint is
/// absolute when neither side references a parameter, relative otherwise.
struct Constraint {
    std::string target;
    LinearForm lo;
    LinearForm hi;

    bool is_relative() const { return lo.ref.has_value() || hi.ref.has_value(); }
    std::string to_text() const;
    bool operator==(const Constraint&) const = default;
};

/// Direct-manipulation handle. The anchor is a per-coordinate linear form
/// of the configuration in the design-local frame.
struct HandleDef {
    std::array<LinearForm, 3> anchor;
    Vec3 axis = Vec3::UnitX();
    double scale = 1.0;  // parameter units per meter

    bool operator==(const HandleDef& other) const {
        return anchor == other.anchor && axis == other.axis && scale == other.scale;
    }
};

enum class ErgonomicTag {
    seat_height,
    seat_depth,
    seat_width_per_person,
    table_height,
    armrest_height_above_seat,
};

std::string_view to_string(ErgonomicTag tag);
std::optional<ErgonomicTag> parse_ergonomic_tag(std::string_view text);

/// Ergonomic annotation on a parameter. When offset_param is set, the
/// recommended range is shifted by that parameter's current value (e.g. an
/// absolute armrest height recommended relative to the seat).
struct ErgonomicBinding {
    ErgonomicTag tag = ErgonomicTag::seat_height;
    std::optional<std::string> offset_param;
    bool operator==(const ErgonomicBinding&) const = default;
};

struct ParameterDef {
    std::string name;
    ParameterKind kind;
    Value default_value;
    std::string group = "basic";
    std::optional<ErgonomicBinding> ergonomic;
    std::optional<HandleDef> handle;

    bool operator==(const ParameterDef&) const = default;
};

enum class GeneratorKind { lathe, panel_bench, panel_table, panel_shelf, panel_bookholder };

std::string_view to_string(GeneratorKind kind);
std::optional<GeneratorKind> parse_generator_kind(std::string_view text);

struct ParamRef {
    std::string name;
    bool operator==(const ParamRef&) const = default;
};

using SlotValue = std::variant<ParamRef, double, bool, std::string>;

enum class SlotType { number, boolean, curve, text };

struct SlotSpec {
    std::string name;
    SlotType type;
    bool required;
};

/// Slots understood by a generator, in canonical order.
const std::vector<SlotSpec>& generator_slots(GeneratorKind kind);

struct GeneratorBinding {
    GeneratorKind generator = GeneratorKind::lathe;
    std::map<std::string, SlotValue> bindings;

    bool operator==(const GeneratorBinding&) const = default;
};

// ---------------------------------------------------------------------------
// Design and configuration
// ---------------------------------------------------------------------------

struct Design {
    std::string id;
    std::string title;
    std::vector<ParameterDef> parameters;  // declaration order
    std::vector<Constraint> constraints;   // sorted by target (stable)
    GeneratorBinding generator;

    const ParameterDef* find(std::string_view name) const;
    const ParameterDef& at(std::string_view name) const;  // throws UnknownParameter
    std::vector<const Constraint*> constraints_on(std::string_view target) const;
    std::vector<const Constraint*> constraints_referencing(std::string_view ref) const;

    bool operator==(const Design&) const = default;
};

struct Pose {
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;  // radians about world up, normalized to [0, 2pi)

    bool operator==(const Pose& other) const {
        return position == other.position && yaw == other.yaw;
    }
};

/// Rigid motion of a pose: rotation about world up, then translation.
Vec3 pose_point(const Pose& pose, const Vec3& local);
Vec3 pose_vector(const Pose& pose, const Vec3& local);
Vec3 unpose_point(const Pose& pose, const Vec3& world);

struct Configuration {
    std::string design_id;
    std::map<std::string, Value> values;
    Pose pose;

    const Value& value(std::string_view name) const;
    double number(std::string_view name) const;
    bool boolean(std::string_view name) const;
    const std::string& text(std::string_view name) const;
    const BezierPath& curve(std::string_view name) const;

    bool operator==(const Configuration&) const = default;
};

Configuration default_configuration(const Design& design);

/// Resolves a generator slot against a configuration. Returns nullopt when
/// the slot is unbound.
std::optional<double> slot_number(const Design& design, const Configuration& config,
                                  std::string_view slot);
std::optional<bool> slot_boolean(const Design& design, const Configuration& config,
                                 std::string_view slot);
const BezierPath* slot_curve(const Design& design, const Configuration& config,
                             std::string_view slot);

/// Stable sort of constraints by target, the canonical in-memory order.
void sort_constraints(std::vector<Constraint>& constraints);

}  // namespace insitu
