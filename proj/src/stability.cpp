#include "insitu/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "insitu/hull.hpp"

namespace insitu {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Body {
    std::vector<Vec3> points;  // collider vertices, world frame of the input mesh
    Vec3 com = Vec3::Zero();
    double mass = 0.0;
    Mat3 inertia = Mat3::Zero();  // about com
};

Body make_body(const TriangleMesh& mesh, double density) {
    if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "stability needs a non-empty mesh");
    Body body;
    const auto hull = convex_hull_3d(mesh.vertices);
    body.points = hull.vertices.empty() ? mesh.vertices : hull.vertices;
    body.com = diagnose(mesh).center_of_mass;

    MassProperties mp = mass_properties(mesh);
    if (!(mp.volume > 1e-12) && !hull.flat) mp = mass_properties(hull.mesh);
    if (!(mp.volume > 1e-12)) {
        throw Error(ErrorCode::EmptyMesh, "mesh encloses no volume for a collider");
    }
    body.mass = density * mp.volume;
    const Vec3 d = body.com - mp.center_of_mass;
    body.inertia = density * mp.inertia + body.mass * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
    return body;
}

Eigen::Quaterniond release_rotation(const StabilityOptions& options) {
    Vec3 axis = options.release_tilt_axis - kUp * options.release_tilt_axis.dot(kUp);
    if (options.release_tilt_deg == 0.0 || axis.norm() < 1e-12) return Eigen::Quaterniond::Identity();
    return Eigen::Quaterniond(Eigen::AngleAxisd(options.release_tilt_deg * kDegToRad, axis.normalized()));
}

/// Orthonormal in-plane basis; for an up normal it is (x, z).
std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
    Vec3 e1 = Vec3::UnitX() - n * n.x();
    if (e1.norm() < 1e-9) e1 = Vec3::UnitZ() - n * n.z();
    e1.normalize();
    return {e1, e1.cross(n)};
}

double tilt_of(const Eigen::Quaterniond& q) {
    return std::acos(std::clamp((q * kUp).dot(kUp), -1.0, 1.0)) / kDegToRad;
}

/// Rotation by `angle` about the line through `pivot` along unit `axis`.
Vec3 rotate_about(const Vec3& p, const Vec3& pivot, const Vec3& axis, double angle) {
    return pivot + Eigen::AngleAxisd(angle, axis) * (p - pivot);
}

QuasiStaticResult analyse(const Body& body, const SupportPlane& plane, const StabilityOptions& options) {
    const Vec3& n = plane.normal;
    const double ny = n.dot(kUp);
    const Eigen::Quaterniond q = release_rotation(options);
    const auto [e1, e2] = plane_basis(n);
    const auto height = [&](const Vec3& p) { return n.dot(p) - plane.offset; };

    std::vector<Vec3> pts;
    pts.reserve(body.points.size());
    for (const auto& p : body.points) pts.push_back(q * (p - body.com) + body.com);
    Vec3 com = body.com;
    Vec3 body_up = q * kUp;

    // Lower along gravity until the lowest point touches.
    const auto lower = [&] {
        double lowest = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) lowest = std::min(lowest, height(p));
        const Vec3 shift = -kUp * (lowest / ny);
        for (auto& p : pts) p += shift;
        com += shift;
    };
    lower();

    QuasiStaticResult out;
    double restoring = std::numeric_limits<double>::infinity();
    // Roll about the current point or edge contact until a face carries the
    // body or the roll would tip it further over.
    for (int stage = 0; stage < 64; ++stage) {
        out.contacts.clear();
        std::vector<Vec2> flat;
        for (const auto& p : pts) {
            if (height(p) <= options.contact_band) {
                out.contacts.push_back(p);
                flat.emplace_back(p.dot(e1), p.dot(e2));
            }
        }
        const Vec3 com_on_plane = com - kUp * (height(com) / ny);
        out.com = Vec2(com_on_plane.dot(e1), com_on_plane.dot(e2));
        out.support = convex_hull_2d(std::move(flat));
        const double inside = signed_distance_to_polygon(out.support, out.com);
        if (out.support.size() >= 3 && inside >= 0.0) {
            out.margin = std::min(restoring, inside - options.erosion);
            return out;
        }

        // Pivot on the point, the segment, or the polygon edge nearest the
        // COM, and find the in-plane direction from the pivot to the COM.
        Vec2 a = out.support.front();
        std::optional<Vec2> edge;
        if (out.support.size() == 2) edge = (out.support[1] - a).normalized();
        if (out.support.size() >= 3) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < out.support.size(); ++i) {
                const Vec2& p0 = out.support[i];
                const Vec2& p1 = out.support[(i + 1) % out.support.size()];
                const Vec2 along = (p1 - p0).normalized();
                const Vec2 rel = out.com - p0;
                if (along.x() * rel.y() - along.y() * rel.x() >= 0.0) continue;
                const double t = std::clamp(rel.dot(p1 - p0) / (p1 - p0).squaredNorm(), 0.0, 1.0);
                const double dist = (p0 + t * (p1 - p0) - out.com).norm();
                if (dist < best) {
                    best = dist;
                    a = p0;
                    edge = along;
                }
            }
        }
        const auto lift = [&](const Vec2& u) -> Vec3 { return e1 * u.x() + e2 * u.y() + n * plane.offset; };
        const Vec3 pivot = lift(a);
        Vec2 offset = out.com - a;
        if (edge) offset -= *edge * offset.dot(*edge);
        if (offset.norm() < 1e-12) {
            out.margin = std::min(restoring, inside - options.erosion);
            return out;
        }
        const Vec3 dir = (e1 * offset.x() + e2 * offset.y()).normalized();
        const Vec3 axis = n.cross(dir);
        const double distance = offset.norm();
        if (n.dot(axis.cross(body_up)) <= 1e-12) {
            out.margin = inside - options.erosion;
            return out;
        }
        out.pivoting = true;
        restoring = std::min(restoring, distance);

        // Smallest roll that brings another hull vertex down to the plane.
        double roll = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
            const Vec3 r = p - pivot;
            const double b = n.dot(r);
            if (b <= options.contact_band) continue;
            const double c = n.dot(axis.cross(r));
            roll = std::min(roll, std::atan2(c, b) + std::numbers::pi / 2);
        }
        if (!std::isfinite(roll)) break;
        for (auto& p : pts) p = rotate_about(p, pivot, axis, roll);
        com = rotate_about(com, pivot, axis, roll);
        body_up = Eigen::AngleAxisd(roll, axis) * body_up;
        lower();
    }
    out.margin = -options.erosion;
    return out;
}

struct Contact {
    Vec3 r;            // from center of mass
    double separation;
    Vec3 t1, t2;
    double kn, kt1, kt2;
    double bounce = 0.0;  // normal velocity to restore on penetrating contacts
    double ln = 0.0, lt1 = 0.0, lt2 = 0.0;
};

double effective_mass(double inv_mass, const Mat3& inv_inertia, const Vec3& r, const Vec3& dir) {
    const Vec3 rn = r.cross(dir);
    return 1.0 / (inv_mass + rn.dot(inv_inertia * rn));
}

}  // namespace

QuasiStaticResult quasi_static_analysis(const TriangleMesh& mesh, const SupportPlane& plane,
                                        const StabilityOptions& options) {
    return analyse(make_body(mesh, options.density), plane, options);
}

double quasi_static_stability(const TriangleMesh& mesh, const SupportPlane& plane,
                              const StabilityOptions& options) {
    return quasi_static_analysis(mesh, plane, options).margin;
}

StabilityReport estimate_stability(const TriangleMesh& mesh, const SupportPlane& plane,
                                   const StabilityOptions& options) {
    const Body body = make_body(mesh, options.density);
    StabilityReport report;
    report.quasi_static_margin = analyse(body, plane, options).margin;

    const Vec3& n = plane.normal;
    const auto [t1, t2] = plane_basis(n);
    const double inv_mass = 1.0 / body.mass;
    const Mat3 inv_inertia_body = body.inertia.inverse();
    const double dt = options.dt;

    std::vector<Vec3> local;
    local.reserve(body.points.size());
    for (const auto& p : body.points) local.push_back(p - body.com);

    Eigen::Quaterniond q = release_rotation(options);
    Vec3 x = body.com;
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& r : local) lowest = std::min(lowest, n.dot(q * r + x) - plane.offset);
    x += n * (options.drop_height - lowest);
    Vec3 v = Vec3::Zero();
    Vec3 w = Vec3::Zero();

    const auto pose_of = [&] {
        RigidTransform t;
        t.rotation = q;
        t.translation = x - q * body.com;
        return t;
    };

    const int max_steps = static_cast<int>(std::ceil(options.max_time / dt));
    const double speculative = 0.01;
    double quiet = 0.0;
    std::vector<Contact> contacts;
    report.trace.push_back({0.0, pose_of()});
    int step = 0;
    for (; step < max_steps; ++step) {
        v -= kUp * (options.gravity * dt);
        const Mat3 rot = q.toRotationMatrix();
        const Mat3 inv_inertia = rot * inv_inertia_body * rot.transpose();

        contacts.clear();
        bool touching = false;
        for (const auto& p : local) {
            const Vec3 r = rot * p;
            const double sep = n.dot(r + x) - plane.offset;
            if (sep > speculative) continue;
            if (sep <= options.contact_band) touching = true;
            Contact c;
            c.r = r;
            c.separation = sep;
            c.t1 = t1;
            c.t2 = t2;
            c.kn = effective_mass(inv_mass, inv_inertia, r, n);
            c.kt1 = effective_mass(inv_mass, inv_inertia, r, t1);
            c.kt2 = effective_mass(inv_mass, inv_inertia, r, t2);
            c.bounce = -options.restitution * std::min((v + w.cross(r)).dot(n), 0.0);
            contacts.push_back(c);
        }

        for (int it = 0; it < options.solver_iterations; ++it) {
            for (auto& c : contacts) {
                const auto apply = [&](const Vec3& dir, double impulse) {
                    v += dir * (impulse * inv_mass);
                    w += inv_inertia * c.r.cross(dir * impulse);
                };
                const double limit = options.friction * c.ln;
                for (auto [dir, k, acc] : {std::tuple{c.t1, c.kt1, &c.lt1}, std::tuple{c.t2, c.kt2, &c.lt2}}) {
                    const double vt = (v + w.cross(c.r)).dot(dir);
                    const double next = std::clamp(*acc - vt * k, -limit, limit);
                    apply(dir, next - *acc);
                    *acc = next;
                }
                const double vn = (v + w.cross(c.r)).dot(n);
                // Separated points may close the gap this step but not more.
                const double target = c.separation > 0.0 ? -c.separation / dt : c.bounce;
                const double next = std::max(c.ln + (target - vn) * c.kn, 0.0);
                apply(n, next - c.ln);
                c.ln = next;
            }
        }

        x += v * dt;
        const Eigen::Quaterniond spin(0.0, w.x(), w.y(), w.z());
        q.coeffs() += 0.5 * dt * (spin * q).coeffs();
        q.normalize();

        // Resolve residual penetration by translation only.
        double deepest = 0.0;
        for (const auto& p : local) deepest = std::min(deepest, n.dot(q * p + x) - plane.offset);
        x -= n * deepest;

        const double time = (step + 1) * dt;
        if ((step + 1) % options.trace_stride == 0) report.trace.push_back({time, pose_of()});

        if (touching && v.norm() < options.settle_linear && w.norm() < options.settle_angular) {
            quiet += dt;
        } else {
            quiet = 0.0;
        }
        if (quiet >= options.settle_time - 1e-12) {
            report.settled = true;
            report.settle_time = time;
            ++step;
            break;
        }
    }
    if (report.trace.back().time != step * dt) report.trace.push_back({step * dt, pose_of()});

    report.settled_pose = pose_of();
    report.tilt_deg = tilt_of(q);
    report.toppled = !report.settled || report.tilt_deg > options.topple_deg;
    for (const auto& p : local) {
        const Vec3 world = q * p + x;
        if (n.dot(world) - plane.offset <= options.contact_band) report.contact_points.push_back(world);
    }
    return report;
}

const SupportPlane& support_plane_for(const EnvironmentScene& scene, const TriangleMesh& mesh) {
    const auto [lo, hi] = bounding_box(mesh);
    const Vec3 probe(0.5 * (lo.x() + hi.x()), lo.y() + 1e-3, 0.5 * (lo.z() + hi.z()));
    const SupportPlane* plane = plane_below(scene, probe);
    if (!plane) throw Error(ErrorCode::NoSupportPlane, "no support plane below the design");
    return *plane;
}

StabilityReport estimate_stability(const TriangleMesh& mesh, const EnvironmentScene& scene,
                                   const StabilityOptions& options) {
    if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "stability needs a non-empty mesh");
    return estimate_stability(mesh, support_plane_for(scene, mesh), options);
}

SupportPlane horizontal_plane(double height) {
    SupportPlane plane;
    plane.normal = kUp;
    plane.offset = height;
    const double e = 1e3;
    plane.bounds = {Vec2(-e, -e), Vec2(e, -e), Vec2(e, e), Vec2(-e, e)};
    return plane;
}

}  // namespace insitu
