#include "insitu/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace insitu {

namespace {

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

}  // namespace

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> points) {
    std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3) return points;
    std::vector<Vec2> hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    return hull;
}

double signed_distance_to_polygon(const std::vector<Vec2>& polygon, const Vec2& p) {
    if (polygon.empty()) return -std::numeric_limits<double>::infinity();
    if (polygon.size() == 1) return -(polygon.front() - p).norm();
    double boundary = std::numeric_limits<double>::infinity();
    bool inside = polygon.size() >= 3;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % polygon.size()];
        boundary = std::min(boundary, segment_distance(a, b, p));
        if (cross2(a, b, p) < 0.0) inside = false;
    }
    return inside ? boundary : -boundary;
}

bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p, double tol) {
    return signed_distance_to_polygon(polygon, p) >= -tol;
}

namespace {

struct Face {
    std::uint32_t v[3];
    Vec3 normal;
    double offset;
    bool alive = true;
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

ConvexHull3 convex_hull_3d(const std::vector<Vec3>& input) {
    ConvexHull3 out;
    if (input.empty()) return out;
    Vec3 lo = input.front(), hi = lo;
    for (const auto& p : input) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double eps = std::max(1e-12, 1e-9 * (hi - lo).norm());

    // Initial simplex from extreme points.
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < input.size(); ++i) {
        if (input[i].x() < input[i0].x()) i0 = i;
    }
    auto farthest = [&](auto&& dist) {
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < input.size(); ++i) {
            const double d = dist(input[i]);
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        return std::pair{best, best_d};
    };
    const auto [i1, d1] = farthest([&](const Vec3& p) { return (p - input[i0]).norm(); });
    const Vec3 dir = (input[i1] - input[i0]).normalized();
    const auto [i2, d2] = farthest([&](const Vec3& p) {
        const Vec3 v = p - input[i0];
        return (v - v.dot(dir) * dir).norm();
    });
    if (d1 <= eps || d2 <= eps) {
        out.flat = true;
        out.vertices = input;
        return out;
    }
    const Vec3 n = (input[i1] - input[i0]).cross(input[i2] - input[i0]).normalized();
    const auto [i3, d3] = farthest([&](const Vec3& p) { return std::abs((p - input[i0]).dot(n)); });
    if (d3 <= eps) {
        out.flat = true;
        out.vertices = input;
        return out;
    }

    std::vector<Vec3> pts = input;
    std::vector<Face> faces;
    std::unordered_map<std::uint64_t, std::size_t> edges;
    auto add_face = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        Face f;
        f.v[0] = a;
        f.v[1] = b;
        f.v[2] = c;
        f.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]).normalized();
        f.offset = f.normal.dot(pts[a]);
        for (int e = 0; e < 3; ++e) edges[edge_key(f.v[e], f.v[(e + 1) % 3])] = faces.size();
        faces.push_back(f);
    };
    auto s = [](std::size_t i) { return static_cast<std::uint32_t>(i); };
    const Vec3 centroid = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
    const std::uint32_t simplex[4][3] = {{s(i0), s(i1), s(i2)},
                                         {s(i0), s(i3), s(i1)},
                                         {s(i1), s(i3), s(i2)},
                                         {s(i2), s(i3), s(i0)}};
    for (const auto& f : simplex) {
        const Vec3 fn = (pts[f[1]] - pts[f[0]]).cross(pts[f[2]] - pts[f[0]]);
        if (fn.dot(pts[f[0]] - centroid) < 0.0) {
            add_face(f[0], f[2], f[1]);
        } else {
            add_face(f[0], f[1], f[2]);
        }
    }

    std::vector<std::size_t> visible;
    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        if (pi == i0 || pi == i1 || pi == i2 || pi == i3) continue;
        const Vec3& p = pts[pi];
        visible.clear();
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            if (faces[fi].alive && faces[fi].normal.dot(p) - faces[fi].offset > eps) {
                visible.push_back(fi);
            }
        }
        if (visible.empty()) continue;
        for (auto fi : visible) faces[fi].alive = false;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> horizon;
        for (auto fi : visible) {
            const auto& f = faces[fi];
            for (int e = 0; e < 3; ++e) {
                const auto a = f.v[e], b = f.v[(e + 1) % 3];
                auto twin = edges.find(edge_key(b, a));
                if (twin != edges.end() && faces[twin->second].alive) horizon.emplace_back(a, b);
            }
        }
        for (auto fi : visible) {
            const auto& f = faces[fi];
            for (int e = 0; e < 3; ++e) {
                auto it = edges.find(edge_key(f.v[e], f.v[(e + 1) % 3]));
                if (it != edges.end() && it->second == fi) edges.erase(it);
            }
        }
        for (const auto& [a, b] : horizon) add_face(a, b, s(pi));
    }

    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (const auto& f : faces) {
        if (!f.alive) continue;
        Triangle t{};
        for (int k = 0; k < 3; ++k) {
            auto [it, inserted] = remap.try_emplace(f.v[k], static_cast<std::uint32_t>(out.vertices.size()));
            if (inserted) out.vertices.push_back(pts[f.v[k]]);
            t[k] = it->second;
        }
        out.mesh.triangles.push_back(t);
    }
    out.mesh.vertices = out.vertices;
    out.mesh.parts.push_back({"hull", 0, out.mesh.triangles.size()});

    // Points inside a face or along an edge stay in the mesh but are not
    // corners: the normals of their incident faces do not span 3D.
    std::vector<std::vector<Vec3>> incident(out.mesh.vertices.size());
    for (std::size_t t = 0; t < out.mesh.triangles.size(); ++t) {
        const Vec3 fn = triangle_normal(out.mesh, t);
        for (auto v : out.mesh.triangles[t]) {
            auto& ns = incident[v];
            if (std::none_of(ns.begin(), ns.end(), [&](const Vec3& m) { return m.dot(fn) > 1.0 - 1e-9; })) {
                ns.push_back(fn);
            }
        }
    }
    out.vertices.clear();
    for (std::size_t v = 0; v < incident.size(); ++v) {
        const auto& ns = incident[v];
        bool corner = false;
        for (std::size_t a = 0; a < ns.size() && !corner; ++a) {
            for (std::size_t b = a + 1; b < ns.size() && !corner; ++b) {
                for (std::size_t c = b + 1; c < ns.size() && !corner; ++c) {
                    corner = std::abs(ns[a].dot(ns[b].cross(ns[c]))) > 1e-9;
                }
            }
        }
        if (corner) out.vertices.push_back(out.mesh.vertices[v]);
    }
    return out;
}

}  // namespace insitu
