#pragma once

#include <optional>
#include <vector>

#include "insitu/bezier.hpp"
#include "insitu/editor.hpp"

namespace insitu {

inline constexpr int kStrokeSamples = 64;

struct Stroke {
    std::vector<Vec3> points;       // meters
    std::vector<double> timestamps; // seconds, optional
    Vec3 view_dir = -Vec3::UnitZ(); // camera forward at capture
};

/// In-plane basis of a projected stroke: u is horizontal, v follows world
/// up, normal is the view direction.
struct StrokeFrame {
    Vec3 origin = Vec3::Zero();
    Vec3 u = Vec3::UnitX();
    Vec3 v = Vec3::UnitY();
    Vec3 normal = -Vec3::UnitZ();

    Vec2 to_plane(const Vec3& p) const { return {(p - origin).dot(u), (p - origin).dot(v)}; }
    Vec3 to_world(const Vec2& q) const { return origin + q.x() * u + q.y() * v; }
};

struct ProjectedStroke {
    std::vector<Vec2> points;
    StrokeFrame frame;
};

/// Frame for a view direction through `origin`. Looking straight down
/// falls back to world -Z as the in-plane vertical.
StrokeFrame make_stroke_frame(const Vec3& origin, const Vec3& view_dir);

/// Orthogonal projection onto the frame's plane, no smoothing.
std::vector<Vec2> project_points(const std::vector<Vec3>& points, const StrokeFrame& frame);

/// Arc-length resampling to `count` points, keeping both end points.
std::vector<Vec2> resample_polyline(const std::vector<Vec2>& points, int count);

/// Drops consecutive duplicates, smooths with a 3-tap moving average,
/// projects onto the plane through the centroid normal to view_dir and
/// resamples to `samples` points. Throws DegenerateStroke.
ProjectedStroke project_stroke(const Stroke& stroke, int samples = kStrokeSamples);

struct FitResult {
    BezierPath path;
    double max_deviation = 0.0;
    bool modified_by_constraints = false;
    std::optional<StrokeFrame> frame;  // set when fitted from a stroke
};

/// Piecewise cubic least-squares fit with Newton-Raphson
/// reparameterization, splitting at the worst point until the deviation is
/// within `tol` or `budget` segments are used. Throws InsufficientPoints.
FitResult fit_bezier_path(const std::vector<Vec2>& points, int budget, double tol);

/// project_stroke followed by fit_bezier_path. A non-positive tol means 1%
/// of the projected stroke's bounding-box diagonal.
FitResult fit_stroke(const Stroke& stroke, int budget, double tol = 0.0);

/// Deviation between a path and the points it was fitted to: the larger of
/// the worst point-to-curve distance (nearest of 256 samples per segment,
/// refined by Newton steps) and the worst distance of those samples to the
/// input polyline.
double path_deviation(const BezierPath& path, const std::vector<Vec2>& points);

/// Distance from q to the polyline through `points`.
double distance_to_polyline(const std::vector<Vec2>& points, const Vec2& q);

struct CurveApplication {
    EditResult edit;
    BezierPath applied;  // path after normalization and clamping
    bool modified_by_constraints = false;
};

/// Normalizes a fitted path into the parameter's profile frame and commits
/// it. For lathe profiles the path is oriented bottom to top, measured from
/// the design's axis (the pose position, when the fit carries a stroke
/// frame), scaled uniformly so it spans the current height, and clamped to
/// r_min. Throws KindMismatch for non-curve parameters.
CurveApplication apply_curve(const Design& design, const Configuration& config,
                             std::string_view name, const FitResult& fit);

}  // namespace insitu
