#include "insitu/design.hpp"

#include <algorithm>

namespace insitu {

std::string_view to_string(Unit unit) {
    switch (unit) {
        case Unit::none: return "none";
        case Unit::meters: return "m";
        case Unit::degrees: return "deg";
        case Unit::count: return "count";
    }
    return "none";
}

std::string_view to_string(CurvePlane plane) {
    return plane == CurvePlane::lathe_profile ? "lathe-profile" : "silhouette";
}

std::string_view kind_name(const ParameterKind& kind) {
    struct Visitor {
        std::string_view operator()(const ContinuousKind&) const { return "continuous"; }
        std::string_view operator()(const DiscreteKind&) const { return "discrete"; }
        std::string_view operator()(const OptionKind&) const { return "option"; }
        std::string_view operator()(const BooleanKind&) const { return "boolean"; }
        std::string_view operator()(const TextKind&) const { return "text"; }
        std::string_view operator()(const CurveKind&) const { return "curve"; }
    };
    return std::visit(Visitor{}, kind);
}

bool is_numeric(const ParameterKind& kind) {
    return std::holds_alternative<ContinuousKind>(kind) ||
           std::holds_alternative<DiscreteKind>(kind);
}

bool is_length(const ParameterKind& kind) {
    if (const auto* c = std::get_if<ContinuousKind>(&kind)) return c->unit == Unit::meters;
    if (const auto* d = std::get_if<DiscreteKind>(&kind)) return d->unit == Unit::meters;
    return false;
}

bool value_matches_kind(const ParameterKind& kind, const Value& value) {
    if (is_numeric(kind)) return std::holds_alternative<double>(value);
    if (std::holds_alternative<BooleanKind>(kind)) return std::holds_alternative<bool>(value);
    if (std::holds_alternative<OptionKind>(kind) || std::holds_alternative<TextKind>(kind)) {
        return std::holds_alternative<std::string>(value);
    }
    return std::holds_alternative<BezierPath>(value);
}

double LinearForm::eval(const Configuration& config) const {
    if (!ref) return offset;
    return scale * config.number(*ref) + offset;
}

std::string LinearForm::to_text() const {
    if (!ref) return format_number(offset);
    std::string out;
    if (scale != 1.0) out = format_number(scale) + " * ";
    out += *ref;
    if (offset > 0.0) {
        out += " + " + format_number(offset);
    } else if (offset < 0.0) {
        out += " - " + format_number(-offset);
    }
    return out;
}

std::string Constraint::to_text() const {
    return target + " in [" + lo.to_text() + ", " + hi.to_text() + "]";
}

std::string_view to_string(ErgonomicTag tag) {
    switch (tag) {
        case ErgonomicTag::seat_height: return "seat_height";
        case ErgonomicTag::seat_depth: return "seat_depth";
        case ErgonomicTag::seat_width_per_person: return "seat_width_per_person";
        case ErgonomicTag::table_height: return "table_height";
        case ErgonomicTag::armrest_height_above_seat: return "armrest_height_above_seat";
    }
    return "seat_height";
}

std::optional<ErgonomicTag> parse_ergonomic_tag(std::string_view text) {
    for (auto tag : {ErgonomicTag::seat_height, ErgonomicTag::seat_depth,
                     ErgonomicTag::seat_width_per_person, ErgonomicTag::table_height,
                     ErgonomicTag::armrest_height_above_seat}) {
        if (to_string(tag) == text) return tag;
    }
    return std::nullopt;
}

std::string_view to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::lathe: return "lathe";
        case GeneratorKind::panel_bench: return "panel_bench";
        case GeneratorKind::panel_table: return "panel_table";
        case GeneratorKind::panel_shelf: return "panel_shelf";
        case GeneratorKind::panel_bookholder: return "panel_bookholder";
    }
    return "lathe";
}

std::optional<GeneratorKind> parse_generator_kind(std::string_view text) {
    for (auto kind : {GeneratorKind::lathe, GeneratorKind::panel_bench, GeneratorKind::panel_table,
                      GeneratorKind::panel_shelf, GeneratorKind::panel_bookholder}) {
        if (to_string(kind) == text) return kind;
    }
    return std::nullopt;
}

const std::vector<SlotSpec>& generator_slots(GeneratorKind kind) {
    using enum SlotType;
    static const std::vector<SlotSpec> lathe{
        {"profile", curve, true},       {"height", number, true},
        {"diameter", number, false},    {"base_diameter", number, false},
        {"twist", number, false},       {"steps", number, false},
        {"closed_bottom", boolean, false}, {"wall", number, false},
    };
    static const std::vector<SlotSpec> bench{
        {"width", number, true},           {"depth", number, true},
        {"seat_height", number, true},     {"seat_thickness", number, false},
        {"leg_size", number, false},       {"backrest", boolean, false},
        {"backrest_height", number, false}, {"armrests", boolean, false},
        {"armrest_height", number, false}, {"armrest_depth", number, false},
        {"leg_style", text, false},
    };
    static const std::vector<SlotSpec> table{
        {"width", number, true},          {"depth", number, true},
        {"height", number, true},         {"top_thickness", number, false},
        {"leg_size", number, false},      {"lower_shelf", boolean, false},
        {"shelf_height", number, false},
    };
    static const std::vector<SlotSpec> shelf{
        {"width", number, true},         {"height", number, true},
        {"depth", number, true},         {"boards", number, false},
        {"columns", number, false},      {"board_thickness", number, false},
        {"back_panel", boolean, false},
    };
    static const std::vector<SlotSpec> bookholder{
        {"width", number, true},
        {"height", number, true},
        {"depth", number, true},
        {"thickness", number, false},
    };
    switch (kind) {
        case GeneratorKind::lathe: return lathe;
        case GeneratorKind::panel_bench: return bench;
        case GeneratorKind::panel_table: return table;
        case GeneratorKind::panel_shelf: return shelf;
        case GeneratorKind::panel_bookholder: return bookholder;
    }
    return lathe;
}

const ParameterDef* Design::find(std::string_view name) const {
    for (const auto& p : parameters) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

const ParameterDef& Design::at(std::string_view name) const {
    if (const auto* p = find(name)) return *p;
    throw Error(ErrorCode::UnknownParameter,
                "design '" + id + "' has no parameter '" + std::string(name) + "'");
}

std::vector<const Constraint*> Design::constraints_on(std::string_view target) const {
    std::vector<const Constraint*> out;
    for (const auto& c : constraints) {
        if (c.target == target) out.push_back(&c);
    }
    return out;
}

std::vector<const Constraint*> Design::constraints_referencing(std::string_view ref) const {
    std::vector<const Constraint*> out;
    for (const auto& c : constraints) {
        if ((c.lo.ref && *c.lo.ref == ref) || (c.hi.ref && *c.hi.ref == ref)) out.push_back(&c);
    }
    return out;
}

Vec3 pose_vector(const Pose& pose, const Vec3& local) {
    return Eigen::AngleAxisd(pose.yaw, Vec3::UnitY()) * local;
}

Vec3 pose_point(const Pose& pose, const Vec3& local) {
    return pose_vector(pose, local) + pose.position;
}

Vec3 unpose_point(const Pose& pose, const Vec3& world) {
    return Eigen::AngleAxisd(-pose.yaw, Vec3::UnitY()) * (world - pose.position);
}

const Value& Configuration::value(std::string_view name) const {
    auto it = values.find(std::string(name));
    if (it == values.end()) {
        throw Error(ErrorCode::UnknownParameter,
                    "configuration has no value for '" + std::string(name) + "'");
    }
    return it->second;
}

double Configuration::number(std::string_view name) const {
    const auto& v = value(name);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw Error(ErrorCode::KindMismatch, "parameter '" + std::string(name) + "' is not numeric");
}

bool Configuration::boolean(std::string_view name) const {
    const auto& v = value(name);
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw Error(ErrorCode::KindMismatch, "parameter '" + std::string(name) + "' is not boolean");
}

const std::string& Configuration::text(std::string_view name) const {
    const auto& v = value(name);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw Error(ErrorCode::KindMismatch, "parameter '" + std::string(name) + "' is not text");
}

const BezierPath& Configuration::curve(std::string_view name) const {
    const auto& v = value(name);
    if (const auto* c = std::get_if<BezierPath>(&v)) return *c;
    throw Error(ErrorCode::KindMismatch, "parameter '" + std::string(name) + "' is not a curve");
}

Configuration default_configuration(const Design& design) {
    Configuration config;
    config.design_id = design.id;
    for (const auto& p : design.parameters) config.values.emplace(p.name, p.default_value);
    return config;
}

namespace {

const SlotValue* find_slot(const Design& design, std::string_view slot) {
    auto it = design.generator.bindings.find(std::string(slot));
    return it == design.generator.bindings.end() ? nullptr : &it->second;
}

}  // namespace

std::optional<double> slot_number(const Design& design, const Configuration& config,
                                  std::string_view slot) {
    const auto* v = find_slot(design, slot);
    if (!v) return std::nullopt;
    if (const auto* ref = std::get_if<ParamRef>(v)) return config.number(ref->name);
    if (const auto* d = std::get_if<double>(v)) return *d;
    throw Error(ErrorCode::KindMismatch, "slot '" + std::string(slot) + "' is not numeric");
}

std::optional<bool> slot_boolean(const Design& design, const Configuration& config,
                                 std::string_view slot) {
    const auto* v = find_slot(design, slot);
    if (!v) return std::nullopt;
    if (const auto* ref = std::get_if<ParamRef>(v)) return config.boolean(ref->name);
    if (const auto* b = std::get_if<bool>(v)) return *b;
    throw Error(ErrorCode::KindMismatch, "slot '" + std::string(slot) + "' is not boolean");
}

const BezierPath* slot_curve(const Design& design, const Configuration& config,
                             std::string_view slot) {
    const auto* v = find_slot(design, slot);
    if (!v) return nullptr;
    if (const auto* ref = std::get_if<ParamRef>(v)) return &config.curve(ref->name);
    throw Error(ErrorCode::KindMismatch, "slot '" + std::string(slot) + "' is not a curve");
}

void sort_constraints(std::vector<Constraint>& constraints) {
    std::stable_sort(constraints.begin(), constraints.end(),
                     [](const Constraint& a, const Constraint& b) { return a.target < b.target; });
}

}  // namespace insitu
