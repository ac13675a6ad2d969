#pragma once

#include <optional>
#include <string>
#include <vector>

#include "insitu/design.hpp"
#include "insitu/environment.hpp"
#include "insitu/mesh.hpp"
#include "insitu/stability.hpp"

namespace insitu {

enum class ClauseKind { max_height, max_extent, align, fits_inside_cavity, stable };

std::string_view to_string(ClauseKind kind);
std::optional<ClauseKind> parse_clause_kind(std::string_view text);

/// A length measured between two points of the environment.
struct Reference {
    Vec3 from = Vec3::Zero();
    Vec3 to = Vec3::Zero();

    double length() const { return (to - from).norm(); }
    bool operator==(const Reference&) const = default;
};

/// One machine-checkable requirement. Only the fields of its kind are read.
struct Clause {
    ClauseKind kind = ClauseKind::stable;
    std::string label;

    // max_height, max_extent: limit, or the length of `reference`.
    std::optional<double> limit;
    std::optional<Reference> reference;
    int axis = 0;  // max_extent: 0 = x, 1 = y, 2 = z in the design-local frame

    // align: |param - target| <= tol; the target may be a reference length.
    std::string param;
    std::optional<double> target;
    double tol = 0.0;

    // fits_inside_cavity: upright cylinder.
    double radius = 0.0;
    double height = 0.0;

    // stable: released tilted by this many degrees; unset uses the caller's options.
    std::optional<double> release_tilt_deg;

    bool operator==(const Clause&) const = default;
};

struct RequirementSpec {
    std::vector<Clause> clauses;
    bool operator==(const RequirementSpec&) const = default;
};

/// Throws InvalidArgument for non-positive limits, negative tolerances or
/// clauses missing their operands.
void validate_spec(const RequirementSpec& spec);

struct ClauseResult {
    ClauseKind kind = ClauseKind::stable;
    std::string label;
    bool pass = false;
    double measured = 0.0;
    double limit = 0.0;   // bound the measurement was compared with
    double excess = 0.0;  // how far past the bound the measurement lies, 0 on pass
    std::string detail;
};

struct RequirementResult {
    std::vector<ClauseResult> clauses;
    bool all_pass() const;
};

/// Checks every clause against a configuration and its posed mesh.
/// `stable` uses the plane below the mesh in `scene`, or the ground plane
/// y = 0 without a scene. Throws UnknownClauseForDesignKind when a design
/// has no cavity to fit into.
RequirementResult check_requirements(const Design& design, const Configuration& config,
                                     const TriangleMesh& mesh, const EnvironmentScene* scene,
                                     const RequirementSpec& spec,
                                     const StabilityOptions& stability = {});

}  // namespace insitu
