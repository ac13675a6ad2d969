#include "insitu/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "insitu/editor.hpp"

namespace insitu {

std::vector<Vec2> lathe_radii(const LatheSpec& spec) {
    if (spec.profile.empty()) throw Error(ErrorCode::DegenerateProfile, "profile has no segments");
    if (min_control_x(spec.profile) < kMinProfileRadius - kBoundEpsilon) {
        throw Error(ErrorCode::DegenerateProfile, "profile comes closer than " +
                                                      format_number(kMinProfileRadius) +
                                                      " m to the axis");
    }
    if (!(spec.height > 0.0)) throw Error(ErrorCode::DegenerateProfile, "height must be positive");

    std::vector<Vec2> pts;
    for (const auto& p : sample_path(spec.profile, std::max(1, spec.samples_per_segment))) {
        if (pts.empty() || (p - pts.back()).norm() > 1e-9) pts.push_back(p);
    }
    const double y0 = pts.front().y();
    const double y1 = pts.back().y();
    if (!(y1 - y0 > 1e-9)) {
        throw Error(ErrorCode::DegenerateProfile, "profile must rise from start to end");
    }
    for (auto& p : pts) p.y() = (p.y() - y0) / (y1 - y0) * spec.height;

    if (spec.diameter) {
        // Affine radial scaling about r_min, so no radius drops below it.
        double r_max = 0.0;
        for (const auto& p : pts) r_max = std::max(r_max, p.x());
        const double target = 0.5 * *spec.diameter;
        for (auto& p : pts) {
            p.x() = (r_max - kMinProfileRadius > 1e-12)
                        ? kMinProfileRadius + (p.x() - kMinProfileRadius) *
                                                  (target - kMinProfileRadius) /
                                                  (r_max - kMinProfileRadius)
                        : target;
        }
    }
    if (spec.base_diameter) {
        const double delta = 0.5 * *spec.base_diameter - pts.front().x();
        for (auto& p : pts) {
            const double v = std::clamp(p.y() / spec.height, 0.0, 1.0);
            p.x() += delta * (1.0 - v) * (1.0 - v);
        }
    }
    for (auto& p : pts) p.x() = std::max(p.x(), kMinProfileRadius);
    return pts;
}

namespace {

double signed_volume(const TriangleMesh& m) {
    double v = 0.0;
    for (const auto& t : m.triangles) {
        v += m.vertices[t[0]].dot(m.vertices[t[1]].cross(m.vertices[t[2]]));
    }
    return v / 6.0;
}

std::uint32_t idx(std::size_t ring, int j, int n, std::uint32_t base = 0) {
    return base + static_cast<std::uint32_t>(ring * static_cast<std::size_t>(n) +
                                             static_cast<std::size_t>(j % n));
}

}  // namespace

GeneratedModel lathe_model(const LatheSpec& spec) {
    const auto radii = lathe_radii(spec);
    const int n = std::max(3, spec.steps);
    const double twist = spec.twist_deg * std::numbers::pi / 180.0;
    const std::size_t rings = radii.size();

    TriangleMesh m;
    auto add_ring = [&](double shrink_wall) {
        for (const auto& p : radii) {
            const double r = shrink_wall > 0.0 ? std::max(p.x() - shrink_wall, 0.5 * p.x()) : p.x();
            const double offset = twist * std::clamp(p.y() / spec.height, 0.0, 1.0);
            for (int j = 0; j < n; ++j) {
                const double a = 2.0 * std::numbers::pi * j / n + offset;
                m.vertices.emplace_back(r * std::cos(a), p.y(), r * std::sin(a));
            }
        }
    };
    add_ring(0.0);
    for (std::size_t i = 0; i + 1 < rings; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto a = idx(i, j, n), b = idx(i + 1, j, n), c = idx(i + 1, j + 1, n),
                       d = idx(i, j + 1, n);
            m.triangles.push_back({a, b, c});
            m.triangles.push_back({a, c, d});
        }
    }
    if (spec.closed_bottom) {
        const auto bottom = static_cast<std::uint32_t>(m.vertices.size());
        m.vertices.emplace_back(0.0, radii.front().y(), 0.0);
        const auto top = static_cast<std::uint32_t>(m.vertices.size());
        m.vertices.emplace_back(0.0, radii.back().y(), 0.0);
        for (int j = 0; j < n; ++j) {
            m.triangles.push_back({bottom, idx(0, j, n), idx(0, j + 1, n)});
            m.triangles.push_back({top, idx(rings - 1, j + 1, n), idx(rings - 1, j, n)});
        }
    } else {
        const auto inner = static_cast<std::uint32_t>(m.vertices.size());
        add_ring(spec.wall);
        for (std::size_t i = 0; i + 1 < rings; ++i) {
            for (int j = 0; j < n; ++j) {
                const auto a = idx(i, j, n, inner), b = idx(i + 1, j, n, inner),
                           c = idx(i + 1, j + 1, n, inner), d = idx(i, j + 1, n, inner);
                m.triangles.push_back({a, c, b});
                m.triangles.push_back({a, d, c});
            }
        }
        const std::size_t last = rings - 1;
        for (int j = 0; j < n; ++j) {
            m.triangles.push_back({idx(0, j, n), idx(0, j + 1, n), idx(0, j + 1, n, inner)});
            m.triangles.push_back({idx(0, j, n), idx(0, j + 1, n, inner), idx(0, j, n, inner)});
            m.triangles.push_back({idx(last, j + 1, n), idx(last, j, n), idx(last, j, n, inner)});
            m.triangles.push_back(
                {idx(last, j + 1, n), idx(last, j, n, inner), idx(last, j + 1, n, inner)});
        }
    }
    // A profile drawn top to bottom winds inward; flip to keep normals outward.
    if (signed_volume(m) < 0.0) {
        for (auto& t : m.triangles) std::swap(t[1], t[2]);
    }
    m.parts.push_back({"body", 0, m.triangles.size()});

    GeneratedModel model;
    model.mesh = std::move(m);
    Cavity cav;
    cav.name = "interior";
    cav.radial = true;
    cav.floor = 0.0;
    cav.top = spec.height;
    const double inscribe = std::cos(std::numbers::pi / n);
    for (const auto& p : radii) {
        const double r = spec.closed_bottom ? p.x() : std::max(p.x() - spec.wall, 0.5 * p.x());
        cav.inner_radius.emplace_back(p.y(), r * inscribe);
    }
    std::sort(cav.inner_radius.begin(), cav.inner_radius.end(),
              [](const Vec2& a, const Vec2& b) { return a.x() < b.x(); });
    model.cavities.push_back(std::move(cav));
    return model;
}

namespace {

double number_or(const Design& d, const Configuration& c, std::string_view slot, double fallback) {
    return slot_number(d, c, slot).value_or(fallback);
}

bool boolean_or(const Design& d, const Configuration& c, std::string_view slot, bool fallback) {
    return slot_boolean(d, c, slot).value_or(fallback);
}

std::string text_or(const Design& d, const Configuration& c, std::string_view slot,
                    std::string fallback) {
    auto it = d.generator.bindings.find(std::string(slot));
    if (it == d.generator.bindings.end()) return fallback;
    if (const auto* ref = std::get_if<ParamRef>(&it->second)) return c.text(ref->name);
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    return fallback;
}

void add_box(GeneratedModel& model, const Vec3& lo, const Vec3& hi, std::string name) {
    model.mesh.append(make_box(lo, hi, std::move(name)));
}

void add_cavity(GeneratedModel& model, const Vec3& lo, const Vec3& hi, std::string name) {
    Cavity c;
    c.name = std::move(name);
    c.box_min = lo;
    c.box_max = hi;
    model.cavities.push_back(std::move(c));
}

GeneratedModel bench_model(const Design& d, const Configuration& c) {
    GeneratedModel m;
    const double w = number_or(d, c, "width", 1.2);
    const double depth = number_or(d, c, "depth", 0.45);
    const double sh = number_or(d, c, "seat_height", 0.45);
    const double st = number_or(d, c, "seat_thickness", 0.04);
    double ls = number_or(d, c, "leg_size", 0.06);
    if (text_or(d, c, "leg_style", "block") == "slim") ls *= 0.6;
    const double hw = 0.5 * w, hd = 0.5 * depth, leg_top = sh - st;

    add_box(m, {-hw, leg_top, -hd}, {hw, sh, hd}, "seat");
    int leg = 1;
    for (double sx : {-1.0, 1.0}) {
        for (double sz : {-1.0, 1.0}) {
            const double x0 = sx < 0 ? -hw : hw - ls;
            const double z0 = sz < 0 ? -hd : hd - ls;
            add_box(m, {x0, 0.0, z0}, {x0 + ls, leg_top, z0 + ls}, "leg_" + std::to_string(leg++));
        }
    }
    if (boolean_or(d, c, "backrest", false)) {
        const double bh = number_or(d, c, "backrest_height", 0.4);
        add_box(m, {-hw, sh, -hd}, {hw, sh + bh, -hd + 0.03}, "backrest");
    }
    if (boolean_or(d, c, "armrests", false)) {
        const double ah = number_or(d, c, "armrest_height", sh + 0.2);
        const double ad = std::min(number_or(d, c, "armrest_depth", depth), depth);
        constexpr double arm_w = 0.05, arm_t = 0.03, post = 0.04;
        for (double sx : {-1.0, 1.0}) {
            const std::string side = sx < 0 ? "left" : "right";
            const double x0 = sx < 0 ? -hw : hw - arm_w;
            add_box(m, {x0, ah - arm_t, -hd}, {x0 + arm_w, ah, -hd + ad}, "armrest_" + side);
            add_box(m, {x0, sh, -hd + ad - post}, {x0 + arm_w, ah - arm_t, -hd + ad},
                    "armrest_post_" + side);
        }
    }
    return m;
}

GeneratedModel table_model(const Design& d, const Configuration& c) {
    GeneratedModel m;
    const double w = number_or(d, c, "width", 1.2);
    const double depth = number_or(d, c, "depth", 0.8);
    const double h = number_or(d, c, "height", 0.75);
    const double tt = number_or(d, c, "top_thickness", 0.03);
    const double ls = number_or(d, c, "leg_size", 0.06);
    const double hw = 0.5 * w, hd = 0.5 * depth, leg_top = h - tt;

    add_box(m, {-hw, leg_top, -hd}, {hw, h, hd}, "top");
    int leg = 1;
    for (double sx : {-1.0, 1.0}) {
        for (double sz : {-1.0, 1.0}) {
            const double x0 = sx < 0 ? -hw : hw - ls;
            const double z0 = sz < 0 ? -hd : hd - ls;
            add_box(m, {x0, 0.0, z0}, {x0 + ls, leg_top, z0 + ls}, "leg_" + std::to_string(leg++));
        }
    }
    double floor = 0.0;
    if (boolean_or(d, c, "lower_shelf", false)) {
        const double sy = std::min(number_or(d, c, "shelf_height", 0.15), leg_top - 0.05);
        add_box(m, {-hw + ls, sy - 0.02, -hd + ls}, {hw - ls, sy, hd - ls}, "lower_shelf");
        floor = sy;
    }
    add_cavity(m, {-hw + ls, floor, -hd + ls}, {hw - ls, leg_top, hd - ls}, "under_top");
    return m;
}

GeneratedModel shelf_model(const Design& d, const Configuration& c) {
    GeneratedModel m;
    const double w = number_or(d, c, "width", 0.8);
    const double h = number_or(d, c, "height", 1.8);
    const double depth = number_or(d, c, "depth", 0.3);
    const int boards = static_cast<int>(std::lround(std::max(0.0, number_or(d, c, "boards", 0.0))));
    const int columns =
        static_cast<int>(std::lround(std::max(1.0, number_or(d, c, "columns", 1.0))));
    const double t = number_or(d, c, "board_thickness", 0.018);
    const bool back = boolean_or(d, c, "back_panel", false);
    const double hw = 0.5 * w, hd = 0.5 * depth;
    constexpr double back_t = 0.006;
    const double front_z = hd, rear_z = back ? -hd + back_t : -hd;

    add_box(m, {-hw, 0.0, -hd}, {-hw + t, h, hd}, "side_left");
    add_box(m, {hw - t, 0.0, -hd}, {hw, h, hd}, "side_right");
    add_box(m, {-hw + t, 0.0, -hd}, {hw - t, t, hd}, "bottom");
    add_box(m, {-hw + t, h - t, -hd}, {hw - t, h, hd}, "top");
    if (back) add_box(m, {-hw + t, t, -hd}, {hw - t, h - t, -hd + back_t}, "back_panel");

    const double row_h = (h - 2.0 * t - boards * t) / (boards + 1);
    const double col_w = (w - 2.0 * t - (columns - 1) * t) / columns;
    for (int i = 1; i <= boards; ++i) {
        const double y0 = t + i * row_h + (i - 1) * t;
        add_box(m, {-hw + t, y0, rear_z}, {hw - t, y0 + t, front_z}, "board_" + std::to_string(i));
    }
    for (int k = 1; k < columns; ++k) {
        const double x0 = -hw + t + k * col_w + (k - 1) * t;
        add_box(m, {x0, t, rear_z}, {x0 + t, h - t, front_z}, "divider_" + std::to_string(k));
    }
    for (int i = 0; i <= boards; ++i) {
        const double y0 = t + i * (row_h + t);
        for (int k = 0; k < columns; ++k) {
            const double x0 = -hw + t + k * (col_w + t);
            add_cavity(m, {x0, y0, rear_z}, {x0 + col_w, y0 + row_h, front_z},
                       "compartment_" + std::to_string(i) + "_" + std::to_string(k));
        }
    }
    return m;
}

GeneratedModel bookholder_model(const Design& d, const Configuration& c) {
    GeneratedModel m;
    const double w = number_or(d, c, "width", 0.3);
    const double h = number_or(d, c, "height", 0.2);
    const double depth = number_or(d, c, "depth", 0.18);
    const double t = number_or(d, c, "thickness", 0.012);
    const double hw = 0.5 * w, hd = 0.5 * depth;
    add_box(m, {-hw, 0.0, -hd}, {hw, t, hd}, "base");
    add_box(m, {-hw, t, -hd}, {-hw + t, h, hd}, "end_left");
    add_box(m, {hw - t, t, -hd}, {hw, h, hd}, "end_right");
    add_cavity(m, {-hw + t, t, -hd}, {hw - t, h, hd}, "between_ends");
    return m;
}

LatheSpec lathe_spec(const Design& d, const Configuration& c) {
    LatheSpec spec;
    const auto* profile = slot_curve(d, c, "profile");
    if (!profile) throw Error(ErrorCode::InvalidConfiguration, "lathe has no profile");
    spec.profile = *profile;
    spec.height = number_or(d, c, "height", 0.0);
    spec.diameter = slot_number(d, c, "diameter");
    spec.base_diameter = slot_number(d, c, "base_diameter");
    spec.twist_deg = number_or(d, c, "twist", 0.0);
    spec.steps = static_cast<int>(std::lround(number_or(d, c, "steps", kDefaultLatheSteps)));
    spec.closed_bottom = boolean_or(d, c, "closed_bottom", true);
    spec.wall = number_or(d, c, "wall", 0.002);
    return spec;
}

}  // namespace

GeneratedModel generate_model(const Design& design, const Configuration& config) {
    const auto report = validate(design, config);
    if (!report.valid()) {
        const auto& v = report.violations.front();
        const bool profile_only = std::all_of(
            report.violations.begin(), report.violations.end(),
            [](const Violation& x) { return x.kind == ViolationKind::curve_shape; });
        if (design.generator.generator == GeneratorKind::lathe && profile_only) {
            throw Error(ErrorCode::DegenerateProfile, v.message);
        }
        throw Error(ErrorCode::InvalidConfiguration, v.message);
    }
    switch (design.generator.generator) {
        case GeneratorKind::lathe: return lathe_model(lathe_spec(design, config));
        case GeneratorKind::panel_bench: return bench_model(design, config);
        case GeneratorKind::panel_table: return table_model(design, config);
        case GeneratorKind::panel_shelf: return shelf_model(design, config);
        case GeneratorKind::panel_bookholder: return bookholder_model(design, config);
    }
    throw Error(ErrorCode::InvalidConfiguration, "unknown generator");
}

TriangleMesh generate_mesh(const Design& design, const Configuration& config) {
    return transform_mesh(generate_model(design, config).mesh, config.pose);
}

}  // namespace insitu
