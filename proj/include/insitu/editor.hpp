#pragma once

#include <optional>
#include <string>
#include <vector>

#include "insitu/design.hpp"

namespace insitu {

enum class EditMode { preview, commit };

enum class ViolationKind {
    kind_bound,     // outside a continuous range or not a discrete level
    constraint,     // an absolute or relative Constraint
    option_label,   // label not among the option labels
    text_length,    // text longer than max_len
    curve_shape,    // curve breaks continuity, budget, or radius rules
    non_finite,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    std::string parameter;
    ViolationKind kind = ViolationKind::kind_bound;
    std::string message;
    std::optional<Constraint> constraint;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct ValidityReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

/// Comparison slack for bound checks, in parameter units.
inline constexpr double kBoundEpsilon = 1e-12;

/// Checks every parameter value against its kind and every constraint.
/// Throws UnknownDesign when the configuration belongs to another design.
ValidityReport validate(const Design& design, const Configuration& config);

/// Violations that involve parameter `name` alone: its kind bounds and the
/// constraints targeting it, evaluated at the current configuration.
std::vector<Violation> violations_for(const Design& design, const Configuration& config,
                                      std::string_view name);

/// Nearest level, the lower one on exact ties.
double snap_to_level(const std::vector<double>& levels, double value);

enum class EditStatus { committed, preview, snapped_back };

/// A dependent parameter that was clamped to keep a relative constraint
/// satisfied after the parameter it references changed.
struct DependentAdjustment {
    std::string parameter;
    double from = 0.0;
    double to = 0.0;
};

struct EditResult {
    EditStatus status = EditStatus::committed;
    Configuration config;
    std::vector<Violation> violations;
    std::vector<DependentAdjustment> adjusted;

    bool snapped_back() const { return status == EditStatus::snapped_back; }
    /// True for preview results that would not survive a commit.
    bool invalid() const { return !violations.empty(); }
};

/// Preview returns the raw value, flagged through `violations`. Commit
/// either accepts (snapping discrete values and clamping dependents) or
/// snaps back to `config` unchanged.
EditResult set_parameter(const Design& design, const Configuration& config,
                         std::string_view name, const Value& value, EditMode mode);

/// World-space anchor and axis of a parameter's handle under the
/// configuration's pose. Throws NoHandle.
Vec3 handle_anchor(const Design& design, const Configuration& config, std::string_view name);
Vec3 handle_axis(const Design& design, const Configuration& config, std::string_view name);

/// Projects the drag displacement onto the handle axis and routes the
/// resulting value through set_parameter.
EditResult apply_handle_drag(const Design& design, const Configuration& config,
                             std::string_view name, const Vec3& drag_point, EditMode mode);

double measure_distance(const Vec3& p, const Vec3& q);

/// Commits a measured length (meters) to a length parameter.
EditResult bind_measurement(const Design& design, const Configuration& config,
                            std::string_view name, double length);

double normalize_yaw(double yaw);

Configuration set_pose(const Configuration& config, const Vec3& position, double yaw);

/// Assigns raw values without validation or snapping. Used for batch
/// assignment where the caller validates the final result.
Configuration assign_values(const Design& design, const Configuration& config,
                            const std::vector<std::pair<std::string, Value>>& assignments);

}  // namespace insitu
