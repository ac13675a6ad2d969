#pragma once

#include <array>
#include <vector>

#include "insitu/common.hpp"

namespace insitu {

/// Cubic Bezier segment in a 2D profile plane. Coordinates are meters;
/// for lathe profiles x is the radius and y the height.
struct CubicBezier {
    std::array<Vec2, 4> p{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};

    bool operator==(const CubicBezier& other) const;
};

/// Bernstein evaluation. Throws OutOfRangeT when t is outside [0, 1].
Vec2 eval_bezier(const CubicBezier& b, double t);

/// First derivative with respect to t.
Vec2 bezier_derivative(const CubicBezier& b, double t);
Vec2 bezier_second_derivative(const CubicBezier& b, double t);

struct BezierPath {
    std::vector<CubicBezier> segments;

    bool empty() const { return segments.empty(); }
    std::size_t size() const { return segments.size(); }
    Vec2 front() const { return segments.front().p[0]; }
    Vec2 back() const { return segments.back().p[3]; }

    bool operator==(const BezierPath& other) const = default;
};

/// Evaluates the path at a global parameter s in [0, segments].
Vec2 eval_path(const BezierPath& path, double s);

/// Samples every segment at `per_segment` + 1 uniform parameters, sharing
/// segment end points.
std::vector<Vec2> sample_path(const BezierPath& path, int per_segment);

/// Largest C0 gap between consecutive segments.
double max_continuity_gap(const BezierPath& path);

/// Smallest x over all control points. Since a Bezier curve lies in the
/// convex hull of its control points, this bounds the curve's radius.
double min_control_x(const BezierPath& path);

}  // namespace insitu
