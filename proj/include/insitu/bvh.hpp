#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "insitu/mesh.hpp"

namespace insitu {

/// Hits closer than this are ignored, so rays may start on a surface.
inline constexpr double kRayEpsilon = 1e-6;

struct Hit {
    double t = 0.0;
    std::uint32_t triangle = 0;

    bool operator==(const Hit&) const = default;
};

/// Watertight ray/triangle test (shear-and-scale into ray space). Returns
/// the ray parameter of the hit, from either side of the triangle.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& b, const Vec3& c);

/// Classic Moller-Trumbore test, used as an independent reference.
std::optional<double> intersect_triangle_mt(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                            const Vec3& b, const Vec3& c);

/// Bounding-volume hierarchy over a triangle mesh: median split on the
/// longest centroid axis, at most four triangles per leaf.
class Bvh {
public:
    static constexpr std::size_t kLeafSize = 4;

    Bvh() = default;
    explicit Bvh(const TriangleMesh& mesh);

    /// Nearest hit with t in (kRayEpsilon, max_t); exact ties go to the
    /// lower triangle id.
    std::optional<Hit> raycast(const Vec3& origin, const Vec3& dir, double max_t) const;

    /// True when anything is hit with t in (kRayEpsilon, max_t).
    bool occluded(const Vec3& origin, const Vec3& dir, double max_t) const;

    /// Same contract as raycast, testing every triangle.
    std::optional<Hit> brute_force(const Vec3& origin, const Vec3& dir, double max_t) const;

    std::size_t triangle_count() const { return tris_.size(); }
    std::size_t node_count() const { return nodes_.size(); }
    bool empty() const { return tris_.empty(); }

    /// Triangle ids held by every leaf, in node order. Each id appears once.
    std::vector<std::uint32_t> leaf_triangles() const { return order_; }

private:
    struct Node {
        Vec3 lo;
        Vec3 hi;
        std::uint32_t left = 0;   // left child, or first entry of order_ for leaves
        std::uint32_t right = 0;
        std::uint32_t count = 0;  // > 0 for leaves
    };
    struct Tri {
        Vec3 a, b, c;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);
    bool box_hit(const Node& n, const Vec3& origin, const Vec3& dir, double max_t) const;
    template <bool AnyHit>
    std::optional<Hit> traverse(const Vec3& origin, const Vec3& dir, double max_t) const;

    std::vector<Tri> tris_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    double pad_ = 0.0;
};

}  // namespace insitu
