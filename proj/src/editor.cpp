#include "insitu/editor.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace insitu {

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::kind_bound: return "kind_bound";
        case ViolationKind::constraint: return "constraint";
        case ViolationKind::option_label: return "option_label";
        case ViolationKind::text_length: return "text_length";
        case ViolationKind::curve_shape: return "curve_shape";
        case ViolationKind::non_finite: return "non_finite";
    }
    return "kind_bound";
}

namespace {

Violation make_violation(std::string parameter, ViolationKind kind, std::string message) {
    Violation v;
    v.parameter = std::move(parameter);
    v.kind = kind;
    v.message = std::move(message);
    return v;
}

bool is_level(const std::vector<double>& levels, double value) {
    return std::find(levels.begin(), levels.end(), value) != levels.end();
}

std::optional<Violation> curve_violation(const ParameterDef& def, const CurveKind& kind,
                                         const BezierPath& path) {
    auto fail = [&](std::string msg) {
        return make_violation(def.name, ViolationKind::curve_shape, std::move(msg));
    };
    if (path.empty()) return fail("curve has no segments");
    if (static_cast<int>(path.size()) > kind.segment_budget) {
        return fail("curve uses " + std::to_string(path.size()) + " segments, budget is " +
                    std::to_string(kind.segment_budget));
    }
    for (const auto& seg : path.segments) {
        for (const auto& p : seg.p) {
            if (!p.allFinite()) return fail("curve has non-finite control points");
        }
    }
    if (max_continuity_gap(path) > 1e-9) return fail("curve segments are not connected");
    if (kind.plane == CurvePlane::lathe_profile) {
        if (min_control_x(path) < kMinProfileRadius - kBoundEpsilon) {
            return fail("profile radius below " + format_number(kMinProfileRadius) + " m");
        }
        if (!(path.back().y() > path.front().y())) {
            return fail("profile must rise from its first to its last point");
        }
    }
    return std::nullopt;
}

std::optional<Violation> kind_violation(const ParameterDef& def, const Value& value) {
    if (const auto* c = std::get_if<ContinuousKind>(&def.kind)) {
        const double v = std::get<double>(value);
        if (!std::isfinite(v)) {
            return make_violation(def.name, ViolationKind::non_finite, def.name + " is not finite");
        }
        if (v < c->min - kBoundEpsilon || v > c->max + kBoundEpsilon) {
            auto viol = make_violation(def.name, ViolationKind::kind_bound,
                                       def.name + " = " + format_number(v) + " outside [" +
                                           format_number(c->min) + ", " + format_number(c->max) +
                                           "]");
            viol.value = v;
            viol.lo = c->min;
            viol.hi = c->max;
            return viol;
        }
        return std::nullopt;
    }
    if (const auto* d = std::get_if<DiscreteKind>(&def.kind)) {
        const double v = std::get<double>(value);
        if (!is_level(d->levels, v)) {
            auto viol = make_violation(def.name, ViolationKind::kind_bound,
                                       def.name + " = " + format_number(v) + " is not a level");
            viol.value = v;
            viol.lo = d->levels.front();
            viol.hi = d->levels.back();
            return viol;
        }
        return std::nullopt;
    }
    if (const auto* o = std::get_if<OptionKind>(&def.kind)) {
        const auto& label = std::get<std::string>(value);
        if (std::find(o->labels.begin(), o->labels.end(), label) == o->labels.end()) {
            return make_violation(def.name, ViolationKind::option_label,
                                  def.name + " has no option '" + label + "'");
        }
        return std::nullopt;
    }
    if (const auto* t = std::get_if<TextKind>(&def.kind)) {
        const auto& text = std::get<std::string>(value);
        if (static_cast<int>(text.size()) > t->max_len) {
            auto viol = make_violation(def.name, ViolationKind::text_length,
                                       def.name + " exceeds " + std::to_string(t->max_len) +
                                           " characters");
            viol.value = static_cast<double>(text.size());
            viol.hi = t->max_len;
            return viol;
        }
        return std::nullopt;
    }
    if (const auto* k = std::get_if<CurveKind>(&def.kind)) {
        return curve_violation(def, *k, std::get<BezierPath>(value));
    }
    return std::nullopt;
}

std::optional<Violation> constraint_violation(const Constraint& c, const Configuration& config) {
    const double v = config.number(c.target);
    const double lo = c.lo.eval(config);
    const double hi = c.hi.eval(config);
    if (v < lo - kBoundEpsilon || v > hi + kBoundEpsilon) {
        auto viol = make_violation(c.target, ViolationKind::constraint,
                                   "violates " + c.to_text() + " (value " + format_number(v) +
                                       ", bound [" + format_number(lo) + ", " + format_number(hi) +
                                       "])");
        viol.constraint = c;
        viol.value = v;
        viol.lo = lo;
        viol.hi = hi;
        return viol;
    }
    return std::nullopt;
}

EditResult snapped_back(const Configuration& prior, std::vector<Violation> violations) {
    EditResult r;
    r.status = EditStatus::snapped_back;
    r.config = prior;
    r.violations = std::move(violations);
    return r;
}

// Feasible interval of a numeric parameter: its kind range intersected
// with every constraint targeting it.
std::pair<double, double> feasible_interval(const Design& design, const Configuration& config,
                                            const ParameterDef& def) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    if (const auto* c = std::get_if<ContinuousKind>(&def.kind)) {
        lo = c->min;
        hi = c->max;
    } else if (const auto* d = std::get_if<DiscreteKind>(&def.kind)) {
        lo = d->levels.front();
        hi = d->levels.back();
    }
    for (const auto* c : design.constraints_on(def.name)) {
        lo = std::max(lo, c->lo.eval(config));
        hi = std::min(hi, c->hi.eval(config));
    }
    return {lo, hi};
}

// Moves `value` into [lo, hi]: nearest bound for continuous parameters,
// nearest admissible level for discrete ones.
std::optional<double> clamp_into(const ParameterDef& def, double value, double lo, double hi) {
    if (lo > hi + kBoundEpsilon) return std::nullopt;
    if (const auto* d = std::get_if<DiscreteKind>(&def.kind)) {
        std::vector<double> admissible;
        for (double level : d->levels) {
            if (level >= lo - kBoundEpsilon && level <= hi + kBoundEpsilon) {
                admissible.push_back(level);
            }
        }
        if (admissible.empty()) return std::nullopt;
        return snap_to_level(admissible, value);
    }
    if (value < lo) return lo;
    if (value > hi) return hi;
    return value;
}

}  // namespace

double snap_to_level(const std::vector<double>& levels, double value) {
    double best = levels.front();
    double best_dist = std::abs(value - best);
    for (double level : levels) {
        const double dist = std::abs(value - level);
        if (dist < best_dist) {
            best = level;
            best_dist = dist;
        }
    }
    return best;
}

std::vector<Violation> violations_for(const Design& design, const Configuration& config,
                                      std::string_view name) {
    std::vector<Violation> out;
    const auto& def = design.at(name);
    const auto& value = config.value(name);
    if (!value_matches_kind(def.kind, value)) {
        out.push_back(make_violation(def.name, ViolationKind::kind_bound,
                                     def.name + " holds a value of the wrong kind"));
        return out;
    }
    if (auto v = kind_violation(def, value)) out.push_back(std::move(*v));
    if (is_numeric(def.kind)) {
        for (const auto* c : design.constraints_on(name)) {
            if (auto v = constraint_violation(*c, config)) out.push_back(std::move(*v));
        }
    }
    return out;
}

ValidityReport validate(const Design& design, const Configuration& config) {
    if (config.design_id != design.id) {
        throw Error(ErrorCode::UnknownDesign, "configuration belongs to design '" +
                                                  config.design_id + "', not '" + design.id + "'");
    }
    ValidityReport report;
    for (const auto& def : design.parameters) {
        if (!config.values.contains(def.name)) {
            report.violations.push_back(make_violation(def.name, ViolationKind::kind_bound,
                                                       def.name + " has no value"));
            continue;
        }
        auto vs = violations_for(design, config, def.name);
        std::move(vs.begin(), vs.end(), std::back_inserter(report.violations));
    }
    return report;
}

EditResult set_parameter(const Design& design, const Configuration& config,
                         std::string_view name, const Value& value, EditMode mode) {
    const auto& def = design.at(name);
    if (!value_matches_kind(def.kind, value)) {
        throw Error(ErrorCode::KindMismatch, "value does not match the " +
                                                 std::string(kind_name(def.kind)) +
                                                 " parameter '" + def.name + "'");
    }

    Configuration candidate = config;
    if (mode == EditMode::preview) {
        candidate.values[def.name] = value;
        EditResult r;
        r.status = EditStatus::preview;
        r.config = std::move(candidate);
        r.violations = validate(design, r.config).violations;
        return r;
    }

    Value committed = value;
    if (const auto* d = std::get_if<DiscreteKind>(&def.kind)) {
        const double raw = std::get<double>(value);
        if (std::isfinite(raw)) committed = snap_to_level(d->levels, raw);
    }
    candidate.values[def.name] = committed;

    if (auto own = violations_for(design, candidate, def.name); !own.empty()) {
        return snapped_back(config, std::move(own));
    }

    // Clamp dependents whose relative bounds moved, transitively.
    std::vector<DependentAdjustment> adjusted;
    if (is_numeric(def.kind)) {
        std::deque<std::string> queue{def.name};
        const std::size_t budget = 4 * design.parameters.size() + 4;
        std::size_t steps = 0;
        while (!queue.empty()) {
            if (++steps > budget) {
                return snapped_back(config, validate(design, candidate).violations);
            }
            const std::string changed = queue.front();
            queue.pop_front();
            for (const auto* c : design.constraints_referencing(changed)) {
                const auto& dep = design.at(c->target);
                const auto [lo, hi] = feasible_interval(design, candidate, dep);
                const double current = candidate.number(dep.name);
                if (current >= lo - kBoundEpsilon && current <= hi + kBoundEpsilon) continue;
                auto moved = (dep.name == def.name) ? std::nullopt
                                                    : clamp_into(dep, current, lo, hi);
                if (!moved) {
                    auto why = constraint_violation(*c, candidate);
                    std::vector<Violation> vs;
                    if (why) vs.push_back(std::move(*why));
                    else vs = validate(design, candidate).violations;
                    return snapped_back(config, std::move(vs));
                }
                adjusted.push_back({dep.name, current, *moved});
                candidate.values[dep.name] = *moved;
                queue.push_back(dep.name);
            }
        }
    }

    auto final_report = validate(design, candidate);
    if (!final_report.valid()) return snapped_back(config, std::move(final_report.violations));

    EditResult r;
    r.status = EditStatus::committed;
    r.config = std::move(candidate);
    r.adjusted = std::move(adjusted);
    return r;
}

namespace {

const HandleDef& handle_of(const Design& design, std::string_view name) {
    const auto& def = design.at(name);
    if (!def.handle) {
        throw Error(ErrorCode::NoHandle, "parameter '" + def.name + "' has no handle");
    }
    return *def.handle;
}

}  // namespace

Vec3 handle_anchor(const Design& design, const Configuration& config, std::string_view name) {
    const auto& h = handle_of(design, name);
    const Vec3 local{h.anchor[0].eval(config), h.anchor[1].eval(config), h.anchor[2].eval(config)};
    return pose_point(config.pose, local);
}

Vec3 handle_axis(const Design& design, const Configuration& config, std::string_view name) {
    return pose_vector(config.pose, handle_of(design, name).axis);
}

EditResult apply_handle_drag(const Design& design, const Configuration& config,
                             std::string_view name, const Vec3& drag_point, EditMode mode) {
    const auto& h = handle_of(design, name);
    const auto& def = design.at(name);
    if (!is_numeric(def.kind)) {
        throw Error(ErrorCode::KindMismatch, "handle parameter '" + def.name + "' is not numeric");
    }
    const Vec3 anchor = handle_anchor(design, config, name);
    const Vec3 axis = handle_axis(design, config, name);
    const double delta = (drag_point - anchor).dot(axis) * h.scale;
    return set_parameter(design, config, name, config.number(name) + delta, mode);
}

double measure_distance(const Vec3& p, const Vec3& q) { return (p - q).norm(); }

EditResult bind_measurement(const Design& design, const Configuration& config,
                            std::string_view name, double length) {
    const auto& def = design.at(name);
    if (!is_length(def.kind)) {
        throw Error(ErrorCode::NonLengthParameter,
                    "parameter '" + def.name + "' does not take a length");
    }
    // Lengths are stored in meters, so the measured value commits as is.
    return set_parameter(design, config, name, length, EditMode::commit);
}

double normalize_yaw(double yaw) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double y = std::fmod(yaw, two_pi);
    if (y < 0.0) y += two_pi;
    if (y >= two_pi) y = 0.0;
    return y;
}

Configuration set_pose(const Configuration& config, const Vec3& position, double yaw) {
    Configuration out = config;
    out.pose.position = position;
    out.pose.yaw = normalize_yaw(yaw);
    return out;
}

Configuration assign_values(const Design& design, const Configuration& config,
                            const std::vector<std::pair<std::string, Value>>& assignments) {
    Configuration out = config;
    for (const auto& [name, value] : assignments) {
        const auto& def = design.at(name);
        if (!value_matches_kind(def.kind, value)) {
            throw Error(ErrorCode::KindMismatch,
                        "value does not match the parameter '" + def.name + "'");
        }
        out.values[def.name] = value;
    }
    return out;
}

}  // namespace insitu
