#include "insitu/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace insitu {

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& b, const Vec3& c) {
    int kz = 0;
    if (std::abs(dir.y()) > std::abs(dir[kz])) kz = 1;
    if (std::abs(dir.z()) > std::abs(dir[kz])) kz = 2;
    int kx = (kz + 1) % 3;
    int ky = (kx + 1) % 3;
    if (dir[kz] < 0.0) std::swap(kx, ky);
    if (dir[kz] == 0.0) return std::nullopt;

    const double sx = dir[kx] / dir[kz];
    const double sy = dir[ky] / dir[kz];
    const double sz = 1.0 / dir[kz];
    const Vec3 A = a - origin, B = b - origin, C = c - origin;
    const double ax = A[kx] - sx * A[kz], ay = A[ky] - sy * A[kz];
    const double bx = B[kx] - sx * B[kz], by = B[ky] - sy * B[kz];
    const double cx = C[kx] - sx * C[kz], cy = C[ky] - sy * C[kz];

    const double u = cx * by - cy * bx;
    const double v = ax * cy - ay * cx;
    const double w = bx * ay - by * ax;
    if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
    const double det = u + v + w;
    if (det == 0.0) return std::nullopt;
    const double t_scaled = u * sz * A[kz] + v * sz * B[kz] + w * sz * C[kz];
    return t_scaled / det;
}

std::optional<double> intersect_triangle_mt(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                            const Vec3& b, const Vec3& c) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 p = dir.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-300) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = origin - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = dir.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    return e2.dot(q) * inv;
}

Bvh::Bvh(const TriangleMesh& mesh) {
    tris_.reserve(mesh.triangles.size());
    std::vector<Vec3> centroids;
    centroids.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        tris_.push_back({mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]});
        centroids.push_back((tris_.back().a + tris_.back().b + tris_.back().c) / 3.0);
    }
    if (tris_.empty()) return;
    Vec3 lo = tris_[0].a, hi = lo;
    for (const auto& t : tris_) {
        for (const Vec3* p : {&t.a, &t.b, &t.c}) {
            lo = lo.cwiseMin(*p);
            hi = hi.cwiseMax(*p);
        }
    }
    // Boxes are padded so the slab test never rejects a triangle the exact
    // test would accept.
    pad_ = 1e-9 * ((hi - lo).norm() + 1.0);
    order_.resize(tris_.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * tris_.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(tris_.size()), centroids);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    Vec3 lo = tris_[order_[begin]].a, hi = lo;
    Vec3 clo = centroids[order_[begin]], chi = clo;
    for (std::uint32_t i = begin; i < end; ++i) {
        const auto& t = tris_[order_[i]];
        for (const Vec3* p : {&t.a, &t.b, &t.c}) {
            lo = lo.cwiseMin(*p);
            hi = hi.cwiseMax(*p);
        }
        clo = clo.cwiseMin(centroids[order_[i]]);
        chi = chi.cwiseMax(centroids[order_[i]]);
    }
    nodes_[index].lo = lo - Vec3::Constant(pad_);
    nodes_[index].hi = hi + Vec3::Constant(pad_);
    if (end - begin <= kLeafSize) {
        nodes_[index].left = begin;
        nodes_[index].count = end - begin;
        return index;
    }
    int axis = 0;
    const Vec3 extent = chi - clo;
    if (extent.y() > extent[axis]) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t x, std::uint32_t y) {
                         const double cx = centroids[x][axis], cy = centroids[y][axis];
                         return cx < cy || (cx == cy && x < y);
                     });
    const std::uint32_t left = build(begin, mid, centroids);
    const std::uint32_t right = build(mid, end, centroids);
    nodes_[index].left = left;
    nodes_[index].right = right;
    nodes_[index].count = 0;
    return index;
}

bool Bvh::box_hit(const Node& n, const Vec3& origin, const Vec3& dir, double max_t) const {
    double t0 = 0.0, t1 = max_t;
    for (int k = 0; k < 3; ++k) {
        if (dir[k] == 0.0) {
            if (origin[k] < n.lo[k] || origin[k] > n.hi[k]) return false;
            continue;
        }
        const double inv = 1.0 / dir[k];
        double ta = (n.lo[k] - origin[k]) * inv;
        double tb = (n.hi[k] - origin[k]) * inv;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

template <bool AnyHit>
std::optional<Hit> Bvh::traverse(const Vec3& origin, const Vec3& dir, double max_t) const {
    if (nodes_.empty()) return std::nullopt;
    std::optional<Hit> best;
    double limit = max_t;
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& n = nodes_[stack[--top]];
        if (!box_hit(n, origin, dir, limit)) continue;
        if (n.count > 0) {
            for (std::uint32_t i = n.left; i < n.left + n.count; ++i) {
                const auto id = order_[i];
                const auto& t = tris_[id];
                const auto hit = intersect_triangle(origin, dir, t.a, t.b, t.c);
                if (!hit || !(*hit > kRayEpsilon) || !(*hit < max_t)) continue;
                if (AnyHit) return Hit{*hit, id};
                if (!best || *hit < best->t || (*hit == best->t && id < best->triangle)) {
                    best = Hit{*hit, id};
                    limit = *hit;
                }
            }
            continue;
        }
        stack[top++] = n.right;
        stack[top++] = n.left;
    }
    return best;
}

std::optional<Hit> Bvh::raycast(const Vec3& origin, const Vec3& dir, double max_t) const {
    return traverse<false>(origin, dir, max_t);
}

bool Bvh::occluded(const Vec3& origin, const Vec3& dir, double max_t) const {
    return traverse<true>(origin, dir, max_t).has_value();
}

std::optional<Hit> Bvh::brute_force(const Vec3& origin, const Vec3& dir, double max_t) const {
    std::optional<Hit> best;
    for (std::uint32_t id = 0; id < tris_.size(); ++id) {
        const auto& t = tris_[id];
        const auto hit = intersect_triangle(origin, dir, t.a, t.b, t.c);
        if (!hit || !(*hit > kRayEpsilon) || !(*hit < max_t)) continue;
        if (!best || *hit < best->t || (*hit == best->t && id < best->triangle)) best = Hit{*hit, id};
    }
    return best;
}

}  // namespace insitu
