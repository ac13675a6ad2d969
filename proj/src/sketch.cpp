#include "insitu/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace insitu {

StrokeFrame make_stroke_frame(const Vec3& origin, const Vec3& view_dir) {
    StrokeFrame f;
    f.origin = origin;
    f.normal = view_dir.normalized();
    Vec3 v = kUp - kUp.dot(f.normal) * f.normal;
    if (v.norm() < 1e-6) {
        const Vec3 fallback = -Vec3::UnitZ();
        v = fallback - fallback.dot(f.normal) * f.normal;
    }
    f.v = v.normalized();
    f.u = f.normal.cross(f.v).normalized();
    return f;
}

std::vector<Vec2> project_points(const std::vector<Vec3>& points, const StrokeFrame& frame) {
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(frame.to_plane(p));
    return out;
}

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& points, int count) {
    std::vector<double> cumulative{0.0};
    for (std::size_t i = 1; i < points.size(); ++i) {
        cumulative.push_back(cumulative.back() + (points[i] - points[i - 1]).norm());
    }
    const double total = cumulative.back();
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(count));
    std::size_t seg = 0;
    for (int k = 0; k < count; ++k) {
        if (k == count - 1) {
            out.push_back(points.back());
            break;
        }
        const double s = total * k / (count - 1);
        while (seg + 2 < points.size() && cumulative[seg + 1] < s) ++seg;
        const double len = cumulative[seg + 1] - cumulative[seg];
        const double t = len > 0.0 ? std::clamp((s - cumulative[seg]) / len, 0.0, 1.0) : 0.0;
        out.push_back(k == 0 ? points.front() : Vec2(points[seg] + t * (points[seg + 1] - points[seg])));
    }
    return out;
}

ProjectedStroke project_stroke(const Stroke& stroke, int samples) {
    std::vector<Vec3> pts;
    for (const auto& p : stroke.points) {
        if (!p.allFinite()) throw Error(ErrorCode::DegenerateStroke, "stroke has non-finite points");
        if (pts.empty() || (p - pts.back()).norm() > 1e-12) pts.push_back(p);
    }
    if (pts.size() < 2) throw Error(ErrorCode::DegenerateStroke, "stroke has fewer than 2 distinct points");
    Vec3 lo = pts.front(), hi = lo;
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    if ((hi - lo).norm() < 1e-3) {
        throw Error(ErrorCode::DegenerateStroke, "stroke points coincide within 1 mm");
    }
    if (!(stroke.view_dir.norm() > 0.0) || !stroke.view_dir.allFinite()) {
        throw Error(ErrorCode::DegenerateStroke, "view direction must be non-zero");
    }

    std::vector<Vec3> smooth = pts;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        smooth[i] = (pts[i - 1] + pts[i] + pts[i + 1]) / 3.0;
    }
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : smooth) centroid += p;
    centroid /= static_cast<double>(smooth.size());

    ProjectedStroke out;
    out.frame = make_stroke_frame(centroid, stroke.view_dir);
    auto flat = project_points(smooth, out.frame);
    std::vector<Vec2> distinct;
    for (const auto& q : flat) {
        if (distinct.empty() || (q - distinct.back()).norm() > 1e-12) distinct.push_back(q);
    }
    if (distinct.size() < 2) {
        throw Error(ErrorCode::DegenerateStroke, "stroke collapses to a point along the view");
    }
    out.points = resample_polyline(distinct, samples);
    return out;
}

double distance_to_polyline(const std::vector<Vec2>& points, const Vec2& q) {
    if (points.size() == 1) return (points.front() - q).norm();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const Vec2 ab = points[i + 1] - points[i];
        const double len2 = ab.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((q - points[i]).dot(ab) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (points[i] + t * ab - q).norm());
    }
    return best;
}

double path_deviation(const BezierPath& path, const std::vector<Vec2>& points) {
    constexpr int kDense = 256;
    const auto samples = sample_path(path, kDense);
    double worst = 0.0;
    for (const auto& p : points) {
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < samples.size(); ++i) {
            if ((samples[i] - p).squaredNorm() < (samples[nearest] - p).squaredNorm()) nearest = i;
        }
        // Refine on the owning segment with Newton steps on |B(t) - p|^2.
        const std::size_t seg = std::min(nearest / kDense, path.size() - 1);
        const CubicBezier& b = path.segments[seg];
        double t = static_cast<double>(nearest - seg * kDense) / kDense;
        double best = (samples[nearest] - p).norm();
        for (int it = 0; it < 8; ++it) {
            const Vec2 d = eval_bezier(b, t) - p;
            const Vec2 d1 = bezier_derivative(b, t);
            const double den = d1.dot(d1) + d.dot(bezier_second_derivative(b, t));
            if (!(std::abs(den) > 1e-300)) break;
            const double next = std::clamp(t - d.dot(d1) / den, 0.0, 1.0);
            if (!std::isfinite(next)) break;
            t = next;
            best = std::min(best, (eval_bezier(b, t) - p).norm());
        }
        worst = std::max(worst, best);
    }
    for (const auto& s : samples) worst = std::max(worst, distance_to_polyline(points, s));
    return worst;
}

namespace {

struct Segment {
    std::size_t first = 0;
    std::size_t last = 0;
    Vec2 t1;  // unit tangent leaving the first point
    Vec2 t2;  // unit tangent at the last point, pointing back into the curve
    CubicBezier curve;
    double error = 0.0;
    std::size_t worst = 0;
};

Vec2 unit_or(const Vec2& v, const Vec2& fallback) {
    const double n = v.norm();
    return n > 1e-15 ? Vec2(v / n) : fallback;
}

std::vector<double> chord_parameters(const std::vector<Vec2>& pts, std::size_t first,
                                     std::size_t last) {
    std::vector<double> u{0.0};
    for (std::size_t i = first + 1; i <= last; ++i) u.push_back(u.back() + (pts[i] - pts[i - 1]).norm());
    const double total = u.back();
    for (auto& x : u) x = total > 0.0 ? x / total : 0.0;
    u.back() = 1.0;
    return u;
}

/// Least-squares inner control points for fixed end points. A free end
/// solves for its control point outright; otherwise it moves along the
/// given unit tangent.
CubicBezier least_squares(const std::vector<Vec2>& pts, std::size_t first, std::size_t last,
                          const std::vector<double>& u, const Vec2& t1, const Vec2& t2,
                          bool free_start, bool free_end) {
    const Vec2 p0 = pts[first], p3 = pts[last];
    const int cols = (free_start ? 2 : 1) + (free_end ? 2 : 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * static_cast<Eigen::Index>(u.size()), cols);
    Eigen::VectorXd rhs(2 * static_cast<Eigen::Index>(u.size()));
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double t = u[k], s = 1.0 - t;
        const double b0 = s * s * s, b1 = 3 * t * s * s, b2 = 3 * t * t * s, b3 = t * t * t;
        Vec2 fixed = p0 * b0 + p3 * b3;
        if (!free_start) fixed += p0 * b1;
        if (!free_end) fixed += p3 * b2;
        const auto row = 2 * static_cast<Eigen::Index>(k);
        rhs.segment<2>(row) = pts[first + k] - fixed;
        int c = 0;
        if (free_start) {
            a(row, c) = b1;
            a(row + 1, c + 1) = b1;
            c += 2;
        } else {
            a.block<2, 1>(row, c) = t1 * b1;
            c += 1;
        }
        if (free_end) {
            a(row, c) = b2;
            a(row + 1, c + 1) = b2;
        } else {
            a.block<2, 1>(row, c) = t2 * b2;
        }
    }
    const auto qr = a.colPivHouseholderQr();
    const double chord = (p3 - p0).norm();
    CubicBezier b;
    b.p = {p0, p0 + t1 * (chord / 3.0), p3 + t2 * (chord / 3.0), p3};
    if (qr.rank() < cols) return b;
    const Eigen::VectorXd x = qr.solve(rhs);
    if (!x.allFinite()) return b;
    const Vec2 p1 = free_start ? Vec2(x(0), x(1)) : Vec2(p0 + x(0) * t1);
    const int c = free_start ? 2 : 1;
    const Vec2 p2 = free_end ? Vec2(x(c), x(c + 1)) : Vec2(p3 + x(c) * t2);
    // Tangent-constrained ends must not flip or collapse.
    const double floor = 1e-6 * chord;
    if ((!free_start && x(0) < floor) || (!free_end && x(c) < floor)) return b;
    b.p = {p0, p1, p2, p3};
    return b;
}

double newton_step(const CubicBezier& b, const Vec2& p, double u) {
    const Vec2 d = eval_bezier(b, u) - p;
    const Vec2 d1 = bezier_derivative(b, u);
    const Vec2 d2 = bezier_second_derivative(b, u);
    const double den = d1.dot(d1) + d.dot(d2);
    if (std::abs(den) < 1e-300) return u;
    const double next = u - d.dot(d1) / den;
    return std::isfinite(next) ? std::clamp(next, 0.0, 1.0) : u;
}

void measure(Segment& s, const std::vector<Vec2>& pts, const std::vector<double>& u) {
    s.error = 0.0;
    s.worst = (s.first + s.last) / 2;
    for (std::size_t k = 1; k + 1 < u.size(); ++k) {
        const double e = (eval_bezier(s.curve, u[k]) - pts[s.first + k]).norm();
        if (e > s.error) {
            s.error = e;
            s.worst = s.first + k;
        }
    }
}

void fit_segment(Segment& s, const std::vector<Vec2>& pts, double tol) {
    auto u = chord_parameters(pts, s.first, s.last);
    // Only the path's outer ends may choose their own tangent.
    const bool free_start = s.first == 0 && s.last - s.first >= 3;
    const bool free_end = s.last + 1 == pts.size() && s.last - s.first >= 3;
    s.curve = least_squares(pts, s.first, s.last, u, s.t1, s.t2, free_start, free_end);
    measure(s, pts, u);
    if (s.last - s.first < 2) return;
    // Alternate reparameterization and refitting, keeping the best curve.
    constexpr int kMaxIterations = 4000;
    constexpr int kWindow = 100;
    Segment current = s;
    double window_start = s.error;
    for (int it = 0; it < kMaxIterations && s.error > tol; ++it) {
        if (it > 0 && it % kWindow == 0) {
            if (s.error > 0.99 * window_start) break;  // stalled
            window_start = s.error;
        }
        for (std::size_t k = 1; k + 1 < u.size(); ++k) u[k] = newton_step(current.curve, pts[s.first + k], u[k]);
        current.curve = least_squares(pts, s.first, s.last, u, s.t1, s.t2, free_start, free_end);
        measure(current, pts, u);
        if (current.error < s.error) s = current;
    }
}

BezierPath assemble(const std::vector<Segment>& segs) {
    BezierPath path;
    for (const auto& s : segs) path.segments.push_back(s.curve);
    return path;
}

}  // namespace

FitResult fit_bezier_path(const std::vector<Vec2>& input, int budget, double tol) {
    if (input.size() < 4) throw Error(ErrorCode::InsufficientPoints, "fitting needs at least 4 points");
    if (budget < 1) throw Error(ErrorCode::InvalidArgument, "segment budget must be at least 1");
    std::vector<Vec2> pts;
    for (const auto& p : input) {
        if (!p.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite point");
        if (pts.empty() || (p - pts.back()).norm() > 1e-15) pts.push_back(p);
    }
    if (pts.size() < 2) throw Error(ErrorCode::InsufficientPoints, "points coincide");

    const std::size_t n = pts.size() - 1;
    const Vec2 chord_dir = unit_or(pts[n] - pts[0], Vec2::UnitX());
    // Second-order one-sided differences estimate the end tangents.
    Vec2 t_start = unit_or(pts[1] - pts[0], chord_dir);
    Vec2 t_end = unit_or(pts[n - 1] - pts[n], -chord_dir);
    if (pts.size() >= 3) {
        t_start = unit_or(-3.0 * pts[0] + 4.0 * pts[1] - pts[2], t_start);
        t_end = unit_or(-3.0 * pts[n] + 4.0 * pts[n - 1] - pts[n - 2], t_end);
    }

    std::vector<Segment> segs(1);
    segs[0].first = 0;
    segs[0].last = n;
    segs[0].t1 = t_start;
    segs[0].t2 = t_end;
    fit_segment(segs[0], pts, tol);

    FitResult best;
    best.path = assemble(segs);
    best.max_deviation = path_deviation(best.path, pts);
    double current = best.max_deviation;

    while (static_cast<int>(segs.size()) < budget && current > tol) {
        std::size_t pick = segs.size();
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (segs[i].last - segs[i].first < 2) continue;
            if (pick == segs.size() || segs[i].error > segs[pick].error) pick = i;
        }
        if (pick == segs.size()) break;
        const Segment whole = segs[pick];
        const std::size_t split = std::clamp(whole.worst, whole.first + 1, whole.last - 1);
        const Vec2 center = unit_or(pts[split - 1] - pts[split + 1], unit_or(pts[split - 1] - pts[split], -chord_dir));
        Segment left = whole, right = whole;
        left.last = split;
        left.t2 = center;
        right.first = split;
        right.t1 = -center;
        fit_segment(left, pts, tol);
        fit_segment(right, pts, tol);
        segs[pick] = left;
        segs.insert(segs.begin() + static_cast<long>(pick) + 1, right);

        auto path = assemble(segs);
        current = path_deviation(path, pts);
        if (current < best.max_deviation) {
            best.path = std::move(path);
            best.max_deviation = current;
        }
    }
    return best;
}

FitResult fit_stroke(const Stroke& stroke, int budget, double tol) {
    const auto projected = project_stroke(stroke);
    if (!(tol > 0.0)) {
        Vec2 lo = projected.points.front(), hi = lo;
        for (const auto& p : projected.points) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        tol = 0.01 * (hi - lo).norm();
    }
    auto fit = fit_bezier_path(projected.points, budget, tol);
    fit.frame = projected.frame;
    return fit;
}

namespace {

BezierPath reversed(const BezierPath& path) {
    BezierPath out;
    for (auto it = path.segments.rbegin(); it != path.segments.rend(); ++it) {
        CubicBezier b;
        b.p = {it->p[3], it->p[2], it->p[1], it->p[0]};
        out.segments.push_back(b);
    }
    return out;
}

}  // namespace

CurveApplication apply_curve(const Design& design, const Configuration& config,
                             std::string_view name, const FitResult& fit) {
    const auto& def = design.at(name);
    const auto* kind = std::get_if<CurveKind>(&def.kind);
    if (!kind) {
        throw Error(ErrorCode::KindMismatch, "parameter '" + def.name + "' is not a curve");
    }
    CurveApplication out;
    BezierPath path = fit.path;
    bool modified = fit.modified_by_constraints;

    if (kind->plane == CurvePlane::lathe_profile && !path.empty()) {
        double axis = 0.0;
        if (fit.frame) axis = fit.frame->to_plane(config.pose.position).x();
        if (path.front().y() > path.back().y()) path = reversed(path);

        // Measure radii on the side of the axis where most of the stroke lies.
        double side = 0.0;
        for (const auto& seg : path.segments) {
            for (const auto& p : seg.p) side += p.x() - axis;
        }
        const double sign = side < 0.0 ? -1.0 : 1.0;
        const double y0 = path.front().y();
        const double span = path.back().y() - y0;
        double scale = 1.0;
        if (auto h = slot_number(design, config, "height"); h && span > 0.0) scale = *h / span;
        for (auto& seg : path.segments) {
            for (auto& p : seg.p) {
                p = Vec2(sign * (p.x() - axis) * scale, (p.y() - y0) * scale);
                if (p.x() < kMinProfileRadius) {
                    p.x() = kMinProfileRadius;
                    modified = true;
                }
            }
        }
    }
    out.applied = path;
    out.modified_by_constraints = modified;
    out.edit = set_parameter(design, config, name, path, EditMode::commit);
    return out;
}

}  // namespace insitu
