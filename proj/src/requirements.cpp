#include "insitu/requirements.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "insitu/editor.hpp"
#include "insitu/generators.hpp"

namespace insitu {

std::string_view to_string(ClauseKind kind) {
    switch (kind) {
        case ClauseKind::max_height: return "max_height";
        case ClauseKind::max_extent: return "max_extent";
        case ClauseKind::align: return "align";
        case ClauseKind::fits_inside_cavity: return "fits_inside_cavity";
        case ClauseKind::stable: return "stable";
    }
    return "stable";
}

std::optional<ClauseKind> parse_clause_kind(std::string_view text) {
    for (auto k : {ClauseKind::max_height, ClauseKind::max_extent, ClauseKind::align,
                   ClauseKind::fits_inside_cavity, ClauseKind::stable}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

bool RequirementResult::all_pass() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.pass; });
}

namespace {

[[noreturn]] void bad_clause(const Clause& c, const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(c.kind)) + ": " + msg);
}

double bound_of(const Clause& c) {
    if (c.reference) return c.reference->length();
    return *c.limit;
}

/// Radius of a radial cavity at height y, interpolated between samples.
double radius_at(const std::vector<Vec2>& samples, double y) {
    if (y <= samples.front().x()) return samples.front().y();
    if (y >= samples.back().x()) return samples.back().y();
    auto it = std::lower_bound(samples.begin(), samples.end(), y,
                               [](const Vec2& s, double v) { return s.x() < v; });
    const Vec2& b = *it;
    const Vec2& a = *(it - 1);
    if (b.x() == a.x()) return std::min(a.y(), b.y());
    const double f = (y - a.x()) / (b.x() - a.x());
    return a.y() + f * (b.y() - a.y());
}

ClauseResult upper_bound(const Clause& c, double measured, double limit, std::string detail) {
    ClauseResult r;
    r.kind = c.kind;
    r.label = c.label;
    r.measured = measured;
    r.limit = limit;
    r.pass = measured <= limit + kBoundEpsilon;
    r.excess = r.pass ? 0.0 : measured - limit;
    r.detail = std::move(detail);
    return r;
}

ClauseResult check_cavity(const Clause& c, const Design& design, const Configuration& config) {
    const GeneratedModel model = generate_model(design, config);
    if (model.cavities.empty()) {
        throw Error(ErrorCode::UnknownClauseForDesignKind,
                    "design '" + design.id + "' (" + std::string(to_string(design.generator.generator)) +
                        ") has no cavity");
    }
    ClauseResult r;
    r.kind = c.kind;
    r.label = c.label;
    r.limit = c.radius;
    r.measured = -std::numeric_limits<double>::infinity();
    for (const auto& cav : model.cavities) {
        if (cav.radial) {
            // Narrowest inner radius over the height the cylinder occupies.
            const double y1 = cav.floor + c.height;
            double narrowest = std::min(radius_at(cav.inner_radius, cav.floor), radius_at(cav.inner_radius, y1));
            for (const auto& s : cav.inner_radius) {
                if (s.x() >= cav.floor && s.x() <= y1) narrowest = std::min(narrowest, s.y());
            }
            const bool tall_enough = cav.top - cav.floor >= c.height;
            const double fit = tall_enough ? narrowest : -std::numeric_limits<double>::infinity();
            if (fit > r.measured) {
                r.measured = fit;
                r.detail = cav.name + ": narrowest inner radius " + format_number(narrowest) +
                           " m, inner height " + format_number(cav.top - cav.floor) + " m";
            }
        } else {
            const Vec3 size = cav.box_max - cav.box_min;
            const double half_side = 0.5 * std::min(size.x(), size.z());
            const double fit = size.y() >= c.height ? half_side : -std::numeric_limits<double>::infinity();
            if (fit > r.measured) {
                r.measured = fit;
                r.detail = cav.name + ": interior " + format_number(size.x()) + " x " + format_number(size.y()) +
                           " x " + format_number(size.z()) + " m";
            }
        }
    }
    r.pass = r.measured >= c.radius - kBoundEpsilon;
    r.excess = r.pass ? 0.0 : (std::isfinite(r.measured) ? c.radius - r.measured : c.height);
    if (!std::isfinite(r.measured)) r.measured = 0.0;
    return r;
}

}  // namespace

void validate_spec(const RequirementSpec& spec) {
    for (const auto& c : spec.clauses) {
        switch (c.kind) {
            case ClauseKind::max_height:
            case ClauseKind::max_extent:
                if (!c.limit && !c.reference) bad_clause(c, "needs a limit or a reference");
                if (!(bound_of(c) > 0.0)) bad_clause(c, "limit must be positive");
                if (c.axis < 0 || c.axis > 2) bad_clause(c, "axis must be x, y or z");
                break;
            case ClauseKind::align:
                if (c.param.empty()) bad_clause(c, "needs a parameter");
                if (!c.target && !c.reference) bad_clause(c, "needs a target or a reference");
                if (!(c.tol >= 0.0)) bad_clause(c, "tolerance must not be negative");
                break;
            case ClauseKind::fits_inside_cavity:
                if (!(c.radius > 0.0) || !(c.height > 0.0)) bad_clause(c, "radius and height must be positive");
                break;
            case ClauseKind::stable:
                if (c.release_tilt_deg && !(*c.release_tilt_deg >= 0.0 && *c.release_tilt_deg < 45.0)) {
                    bad_clause(c, "release tilt must be in [0, 45) degrees");
                }
                break;
        }
    }
}

RequirementResult check_requirements(const Design& design, const Configuration& config,
                                     const TriangleMesh& mesh, const EnvironmentScene* scene,
                                     const RequirementSpec& spec, const StabilityOptions& stability) {
    validate_spec(spec);
    RequirementResult out;
    for (const auto& c : spec.clauses) {
        switch (c.kind) {
            case ClauseKind::max_height: {
                const auto [lo, hi] = bounding_box(mesh);
                out.clauses.push_back(upper_bound(c, hi.y() - lo.y(), bound_of(c), "posed height"));
                break;
            }
            case ClauseKind::max_extent: {
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (const auto& v : mesh.vertices) {
                    const double x = unpose_point(config.pose, v)[c.axis];
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
                if (mesh.vertices.empty()) throw Error(ErrorCode::EmptyMesh, "no vertices to measure");
                const char* axes[] = {"x", "y", "z"};
                out.clauses.push_back(
                    upper_bound(c, hi - lo, bound_of(c), std::string("extent along local ") + axes[c.axis]));
                break;
            }
            case ClauseKind::align: {
                const double value = config.number(c.param);
                const double target = c.target ? *c.target : c.reference->length();
                ClauseResult r;
                r.kind = c.kind;
                r.label = c.label;
                r.measured = value;
                r.limit = target;
                const double off = std::abs(value - target);
                r.pass = off <= c.tol + kBoundEpsilon;
                r.excess = r.pass ? 0.0 : off - c.tol;
                r.detail = c.param + " is " + format_number(off) + " m from " + format_number(target) +
                           " (tolerance " + format_number(c.tol) + ")";
                out.clauses.push_back(std::move(r));
                break;
            }
            case ClauseKind::fits_inside_cavity:
                out.clauses.push_back(check_cavity(c, design, config));
                break;
            case ClauseKind::stable: {
                const SupportPlane plane = scene ? support_plane_for(*scene, mesh) : horizontal_plane(0.0);
                ClauseResult r;
                r.kind = c.kind;
                r.label = c.label;
                StabilityOptions options = stability;
                if (c.release_tilt_deg) options.release_tilt_deg = *c.release_tilt_deg;
                r.measured = quasi_static_stability(mesh, plane, options);
                r.limit = 0.0;
                r.pass = r.measured > 0.0;
                r.excess = r.pass ? 0.0 : -r.measured;
                r.detail = "quasi-static margin";
                out.clauses.push_back(std::move(r));
                break;
            }
        }
    }
    return out;
}

}  // namespace insitu
