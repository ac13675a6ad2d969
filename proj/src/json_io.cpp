#include "insitu/json_io.hpp"

#include <array>
#include <cmath>
#include <set>

namespace insitu {

namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

const Json& field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) malformed(std::string("missing field '") + name + "'");
    return j.at(name);
}

double number_of(const Json& j, const char* what) {
    if (!j.is_number()) malformed(std::string(what) + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) malformed(std::string(what) + " must be finite");
    return v;
}

std::string string_of(const Json& j, const char* what) {
    if (!j.is_string()) malformed(std::string(what) + " must be a string");
    return j.get<std::string>();
}

Vec2 vec2_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) malformed("expected a [x, y] pair");
    return {number_of(j[0], "coordinate"), number_of(j[1], "coordinate")};
}

}  // namespace

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) malformed("expected an [x, y, z] triple");
    return {number_of(j[0], "coordinate"), number_of(j[1], "coordinate"), number_of(j[2], "coordinate")};
}

Json path_to_json(const BezierPath& path) {
    Json segs = Json::array();
    for (const auto& s : path.segments) {
        Json seg = Json::array();
        for (const auto& p : s.p) seg.push_back(Json::array({p.x(), p.y()}));
        segs.push_back(std::move(seg));
    }
    return Json{{"segments", std::move(segs)}};
}

BezierPath path_from_json(const Json& j) {
    const Json& segs = j.is_array() ? j : field(j, "segments");
    if (!segs.is_array()) malformed("segments must be an array");
    BezierPath path;
    for (const auto& seg : segs) {
        if (!seg.is_array() || seg.size() != 4) malformed("a segment has four control points");
        CubicBezier b;
        for (int k = 0; k < 4; ++k) b.p[k] = vec2_from_json(seg[k]);
        path.segments.push_back(b);
    }
    return path;
}

Json value_to_json(const Value& value) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BezierPath>) {
                return path_to_json(v);
            } else {
                return Json(v);
            }
        },
        value);
}

Value value_from_json(const ParameterDef& def, const Json& j) {
    const auto mismatch = [&](const char* expected) -> Value {
        throw Error(ErrorCode::KindMismatch,
                    "parameter '" + def.name + "' expects " + expected + ", got " + j.type_name());
    };
    return std::visit(
        [&](const auto& kind) -> Value {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, ContinuousKind> || std::is_same_v<K, DiscreteKind>) {
                if (!j.is_number()) return mismatch("a number");
                return j.get<double>();
            } else if constexpr (std::is_same_v<K, BooleanKind>) {
                if (!j.is_boolean()) return mismatch("a boolean");
                return j.get<bool>();
            } else if constexpr (std::is_same_v<K, OptionKind> || std::is_same_v<K, TextKind>) {
                if (!j.is_string()) return mismatch("a string");
                return j.get<std::string>();
            } else {
                if (!j.is_object() && !j.is_array()) return mismatch("a curve");
                return path_from_json(j);
            }
        },
        def.kind);
}

Json kind_to_json(const ParameterKind& kind) {
    return std::visit(
        [](const auto& k) -> Json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ContinuousKind>) {
                return {{"type", "continuous"}, {"min", k.min}, {"max", k.max}, {"unit", to_string(k.unit)}};
            } else if constexpr (std::is_same_v<K, DiscreteKind>) {
                return {{"type", "discrete"}, {"levels", k.levels}, {"unit", to_string(k.unit)}};
            } else if constexpr (std::is_same_v<K, OptionKind>) {
                return {{"type", "option"}, {"labels", k.labels}};
            } else if constexpr (std::is_same_v<K, BooleanKind>) {
                return {{"type", "boolean"}};
            } else if constexpr (std::is_same_v<K, TextKind>) {
                return {{"type", "text"}, {"max_len", k.max_len}};
            } else {
                return {{"type", "curve"}, {"segment_budget", k.segment_budget}, {"plane", to_string(k.plane)}};
            }
        },
        kind);
}

Json parameter_to_json(const ParameterDef& def) {
    Json j{{"name", def.name},
           {"kind", kind_to_json(def.kind)},
           {"default", value_to_json(def.default_value)},
           {"group", def.group}};
    if (def.ergonomic) {
        j["ergonomic"] = {{"tag", to_string(def.ergonomic->tag)}};
        if (def.ergonomic->offset_param) j["ergonomic"]["offset_param"] = *def.ergonomic->offset_param;
    }
    if (def.handle) {
        Json anchor = Json::array();
        for (const auto& f : def.handle->anchor) anchor.push_back(f.to_text());
        j["handle"] = {{"anchor", anchor}, {"axis", vec_to_json(def.handle->axis)}, {"scale", def.handle->scale}};
    }
    return j;
}

Json design_summary_json(const Design& design) {
    Json params = Json::array();
    std::vector<std::string> groups;
    std::set<std::string> tags;
    for (const auto& p : design.parameters) {
        params.push_back(parameter_to_json(p));
        if (std::find(groups.begin(), groups.end(), p.group) == groups.end()) groups.push_back(p.group);
        if (p.ergonomic) tags.insert(std::string(to_string(p.ergonomic->tag)));
    }
    Json constraints = Json::array();
    for (const auto& c : design.constraints) {
        constraints.push_back({{"target", c.target}, {"text", c.to_text()}, {"relative", c.is_relative()}});
    }
    return {{"id", design.id},
            {"name", design.title},
            {"generator", to_string(design.generator.generator)},
            {"parameters", std::move(params)},
            {"groups", groups},
            {"constraints", std::move(constraints)},
            {"ergonomic_tags", tags}};
}

Json pose_to_json(const Pose& pose) {
    return {{"position", vec_to_json(pose.position)}, {"yaw", pose.yaw}};
}

Json config_to_json(const Configuration& config) {
    Json values = Json::object();
    for (const auto& [name, v] : config.values) values[name] = value_to_json(v);
    return {{"design_id", config.design_id}, {"values", std::move(values)}, {"pose", pose_to_json(config.pose)}};
}

Configuration config_from_json(const Design& design, const Json& j) {
    Configuration config = default_configuration(design);
    if (j.contains("design_id") && string_of(j["design_id"], "design_id") != design.id) {
        throw Error(ErrorCode::UnknownDesign, "configuration belongs to another design");
    }
    if (j.contains("values")) {
        const Json& values = j["values"];
        if (!values.is_object()) malformed("values must be an object");
        for (const auto& [name, v] : values.items()) {
            config.values[name] = value_from_json(design.at(name), v);
        }
    }
    if (j.contains("pose")) {
        const Json& pose = j["pose"];
        config.pose.position = vec_from_json(field(pose, "position"));
        config.pose.yaw = number_of(field(pose, "yaw"), "yaw");
    }
    return config;
}

Json violation_to_json(const Violation& v) {
    Json j{{"parameter", v.parameter},
           {"kind", to_string(v.kind)},
           {"message", v.message},
           {"value", v.value},
           {"lo", v.lo},
           {"hi", v.hi}};
    if (v.constraint) j["constraint"] = v.constraint->to_text();
    return j;
}

Json validity_to_json(const ValidityReport& report) {
    Json list = Json::array();
    for (const auto& v : report.violations) list.push_back(violation_to_json(v));
    return {{"valid", report.valid()}, {"violations", std::move(list)}};
}

Json edit_result_to_json(const EditResult& result) {
    static constexpr const char* kStatus[] = {"committed", "preview", "snapped_back"};
    Json violations = Json::array();
    for (const auto& v : result.violations) violations.push_back(violation_to_json(v));
    Json adjusted = Json::array();
    for (const auto& a : result.adjusted) adjusted.push_back({{"parameter", a.parameter}, {"from", a.from}, {"to", a.to}});
    Json j{{"status", kStatus[static_cast<int>(result.status)]},
           {"snapped_back", result.snapped_back()},
           {"invalid", result.invalid()},
           {"config", config_to_json(result.config)},
           {"violations", std::move(violations)},
           {"adjusted", std::move(adjusted)}};
    if (result.snapped_back()) {
        for (const auto& v : result.violations) {
            if (v.constraint) {
                j["violated_constraint"] = v.constraint->to_text();
                break;
            }
        }
    }
    return j;
}

Json mesh_to_json(const TriangleMesh& mesh) {
    std::vector<double> verts;
    verts.reserve(mesh.vertices.size() * 3);
    for (const auto& v : mesh.vertices) verts.insert(verts.end(), {v.x(), v.y(), v.z()});
    std::vector<std::uint32_t> tris;
    tris.reserve(mesh.triangles.size() * 3);
    for (const auto& t : mesh.triangles) tris.insert(tris.end(), t.begin(), t.end());
    Json parts = Json::array();
    for (const auto& p : mesh.parts) parts.push_back({{"name", p.name}, {"first", p.first}, {"count", p.count}});
    return {{"vertices", verts}, {"triangles", tris}, {"parts", std::move(parts)}};
}

Stroke stroke_from_json(const Json& j) {
    Stroke s;
    const Json& pts = field(j, "points");
    if (!pts.is_array()) malformed("points must be an array");
    for (const auto& p : pts) s.points.push_back(vec_from_json(p));
    if (j.contains("timestamps")) {
        for (const auto& t : j["timestamps"]) s.timestamps.push_back(number_of(t, "timestamp"));
    }
    if (j.contains("view_dir")) s.view_dir = vec_from_json(j["view_dir"]);
    return s;
}

Json fit_to_json(const FitResult& fit) {
    Json j{{"path", path_to_json(fit.path)},
           {"max_deviation", fit.max_deviation},
           {"modified_by_constraints", fit.modified_by_constraints}};
    if (fit.frame) {
        j["frame"] = {{"origin", vec_to_json(fit.frame->origin)},
                      {"u", vec_to_json(fit.frame->u)},
                      {"v", vec_to_json(fit.frame->v)},
                      {"normal", vec_to_json(fit.frame->normal)}};
    }
    return j;
}

BodyProfile profile_from_json(const Json& j) {
    BodyProfile p;
    p.stature = number_of(field(j, "stature"), "stature");
    if (j.contains("build")) {
        const auto build = parse_build(string_of(j["build"], "build"));
        if (!build) malformed("unknown build '" + j["build"].get<std::string>() + "'");
        p.build = *build;
    }
    return p;
}

Json profile_to_json(const BodyProfile& profile) {
    return {{"stature", profile.stature}, {"build", to_string(profile.build)}};
}

Json range_to_json(const RecommendedRange& range) {
    return {{"lo", range.lo}, {"hi", range.hi}, {"compromise", range.compromise}};
}

Json plane_to_json(const SupportPlane& plane) {
    Json bounds = Json::array();
    for (const auto& b : plane.bounds) bounds.push_back(Json::array({b.x(), b.y()}));
    return {{"normal", vec_to_json(plane.normal)},
            {"offset", plane.offset},
            {"inlier_count", plane.inlier_count},
            {"bounds", std::move(bounds)}};
}

Json scene_summary_json(const EnvironmentScene& scene) {
    Json planes = Json::array();
    for (const auto& p : scene.planes) planes.push_back(plane_to_json(p));
    return {{"triangles", scene.mesh.triangles.size()},
            {"vertices", scene.mesh.vertices.size()},
            {"seed", scene.seed},
            {"planes", std::move(planes)}};
}

Json transform_to_json(const RigidTransform& t) {
    const auto& q = t.rotation;
    return {{"rotation", Json::array({q.w(), q.x(), q.y(), q.z()})}, {"translation", vec_to_json(t.translation)}};
}

Json stability_to_json(const StabilityReport& report) {
    Json contacts = Json::array();
    for (const auto& c : report.contact_points) contacts.push_back(vec_to_json(c));
    Json trace = Json::array();
    for (const auto& s : report.trace) trace.push_back({{"time", s.time}, {"pose", transform_to_json(s.pose)}});
    return {{"toppled", report.toppled},
            {"settled", report.settled},
            {"settle_time", report.settle_time},
            {"tilt_deg", report.tilt_deg},
            {"settled_pose", transform_to_json(report.settled_pose)},
            {"quasi_static_margin", report.quasi_static_margin},
            {"contact_points", std::move(contacts)},
            {"trace", std::move(trace)}};
}

Json lighting_to_json(const LightingReport& report, bool include_samples) {
    std::size_t occluded = 0;
    for (const auto& s : report.samples) occluded += s.occluded ? 1 : 0;
    Json j{{"shadow_coverage", report.shadow_coverage},
           {"mean_illuminance", report.mean_illuminance},
           {"sample_count", report.samples.size()},
           {"occluded_count", occluded},
           {"raster",
            {{"size", report.raster.size},
             {"origin", Json::array({report.raster.origin.x(), report.raster.origin.y()})},
             {"cell", report.raster.cell},
             {"pgm_base64", base64_encode(export_pgm(report.raster))}}}};
    if (report.floor_height) j["floor_height"] = *report.floor_height;
    if (include_samples) {
        Json samples = Json::array();
        for (const auto& s : report.samples) {
            samples.push_back({{"point", vec_to_json(s.point)},
                               {"illuminance", s.illuminance},
                               {"occluded", s.occluded}});
        }
        j["samples"] = std::move(samples);
    }
    return j;
}

namespace {

Reference reference_from_json(const Json& j) {
    return {vec_from_json(field(j, "from")), vec_from_json(field(j, "to"))};
}

Json reference_to_json(const Reference& r) { return {{"from", vec_to_json(r.from)}, {"to", vec_to_json(r.to)}}; }

}  // namespace

RequirementSpec requirement_spec_from_json(const Json& j) {
    RequirementSpec spec;
    const Json& clauses = field(j, "clauses");
    if (!clauses.is_array()) malformed("clauses must be an array");
    for (const auto& cj : clauses) {
        Clause c;
        const std::string type = string_of(field(cj, "type"), "type");
        const auto kind = parse_clause_kind(type);
        if (!kind) malformed("unknown clause type '" + type + "'");
        c.kind = *kind;
        if (cj.contains("label")) c.label = string_of(cj["label"], "label");
        switch (c.kind) {
            case ClauseKind::max_height:
            case ClauseKind::max_extent:
                if (cj.contains("limit")) c.limit = number_of(cj["limit"], "limit");
                if (cj.contains("reference")) c.reference = reference_from_json(cj["reference"]);
                if (c.kind == ClauseKind::max_extent) {
                    const std::string axis = string_of(field(cj, "axis"), "axis");
                    if (axis == "x") {
                        c.axis = 0;
                    } else if (axis == "y") {
                        c.axis = 1;
                    } else if (axis == "z") {
                        c.axis = 2;
                    } else {
                        malformed("axis must be x, y or z");
                    }
                }
                break;
            case ClauseKind::align:
                c.param = string_of(field(cj, "param"), "param");
                if (cj.contains("target")) c.target = number_of(cj["target"], "target");
                if (cj.contains("reference")) c.reference = reference_from_json(cj["reference"]);
                c.tol = number_of(field(cj, "tol"), "tol");
                break;
            case ClauseKind::fits_inside_cavity:
                c.radius = number_of(field(cj, "radius"), "radius");
                c.height = number_of(field(cj, "height"), "height");
                break;
            case ClauseKind::stable:
                if (cj.contains("release_tilt_deg")) {
                    c.release_tilt_deg = number_of(cj["release_tilt_deg"], "release_tilt_deg");
                }
                break;
        }
        spec.clauses.push_back(std::move(c));
    }
    validate_spec(spec);
    return spec;
}

Json requirement_spec_to_json(const RequirementSpec& spec) {
    Json clauses = Json::array();
    for (const auto& c : spec.clauses) {
        Json j{{"type", to_string(c.kind)}};
        if (!c.label.empty()) j["label"] = c.label;
        switch (c.kind) {
            case ClauseKind::max_height:
            case ClauseKind::max_extent:
                if (c.limit) j["limit"] = *c.limit;
                if (c.reference) j["reference"] = reference_to_json(*c.reference);
                if (c.kind == ClauseKind::max_extent) j["axis"] = std::string(1, "xyz"[c.axis]);
                break;
            case ClauseKind::align:
                j["param"] = c.param;
                if (c.target) j["target"] = *c.target;
                if (c.reference) j["reference"] = reference_to_json(*c.reference);
                j["tol"] = c.tol;
                break;
            case ClauseKind::fits_inside_cavity:
                j["radius"] = c.radius;
                j["height"] = c.height;
                break;
            case ClauseKind::stable:
                if (c.release_tilt_deg) j["release_tilt_deg"] = *c.release_tilt_deg;
                break;
        }
        clauses.push_back(std::move(j));
    }
    return {{"clauses", std::move(clauses)}};
}

Json requirement_result_to_json(const RequirementResult& result) {
    Json clauses = Json::array();
    for (const auto& c : result.clauses) {
        clauses.push_back({{"type", to_string(c.kind)},
                           {"label", c.label},
                           {"pass", c.pass},
                           {"measured", c.measured},
                           {"limit", c.limit},
                           {"excess", c.excess},
                           {"detail", c.detail}});
    }
    return {{"all_pass", result.all_pass()}, {"clauses", std::move(clauses)}};
}

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const auto n = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
        out += {kB64[(n >> 18) & 63], kB64[(n >> 12) & 63], kB64[(n >> 6) & 63], kB64[n & 63]};
    }
    if (i + 1 == bytes.size()) {
        const auto n = static_cast<unsigned char>(bytes[i]) << 16;
        out += {kB64[(n >> 18) & 63], kB64[(n >> 12) & 63], '=', '='};
    } else if (i + 2 == bytes.size()) {
        const auto n = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += {kB64[(n >> 18) & 63], kB64[(n >> 12) & 63], kB64[(n >> 6) & 63], '='};
    }
    return out;
}

std::string base64_decode(std::string_view text) {
    std::array<int, 256> table;
    table.fill(-1);
    for (int k = 0; k < 64; ++k) table[static_cast<unsigned char>(kB64[k])] = k;
    std::string out;
    int bits = 0, acc = 0;
    for (char ch : text) {
        if (ch == '=') break;
        const int v = table[static_cast<unsigned char>(ch)];
        if (v < 0) malformed("invalid base64");
        acc = (acc << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

}  // namespace insitu
