#pragma once

#include <vector>

#include "insitu/common.hpp"
#include "insitu/mesh.hpp"

namespace insitu {

/// Counter-clockwise convex hull without collinear points (monotone chain).
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> points);

/// Signed distance from p to the boundary of a counter-clockwise convex
/// polygon: positive inside, negative outside. Degenerate polygons (a
/// point or a segment) have no inside.
double signed_distance_to_polygon(const std::vector<Vec2>& polygon, const Vec2& p);

bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p, double tol = 0.0);

struct ConvexHull3 {
    std::vector<Vec3> vertices;  // corners only; the mesh may also use points on faces or edges
    TriangleMesh mesh;           // outward-wound hull; empty when flat
    bool flat = false;           // all points within tolerance of a plane
};

/// Incremental 3D hull. Points closer than a scale-relative tolerance to
/// the current hull are skipped.
ConvexHull3 convex_hull_3d(const std::vector<Vec3>& points);

}  // namespace insitu
