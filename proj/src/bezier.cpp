#include "insitu/bezier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace insitu {

bool CubicBezier::operator==(const CubicBezier& other) const {
    for (int i = 0; i < 4; ++i) {
        if (p[i] != other.p[i]) return false;
    }
    return true;
}

Vec2 eval_bezier(const CubicBezier& b, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw Error(ErrorCode::OutOfRangeT, "bezier parameter outside [0, 1]");
    }
    const double s = 1.0 - t;
    const double b0 = s * s * s;
    const double b1 = 3.0 * s * s * t;
    const double b2 = 3.0 * s * t * t;
    const double b3 = t * t * t;
    return b0 * b.p[0] + b1 * b.p[1] + b2 * b.p[2] + b3 * b.p[3];
}

Vec2 bezier_derivative(const CubicBezier& b, double t) {
    const double s = 1.0 - t;
    return 3.0 * s * s * (b.p[1] - b.p[0]) + 6.0 * s * t * (b.p[2] - b.p[1]) +
           3.0 * t * t * (b.p[3] - b.p[2]);
}

Vec2 bezier_second_derivative(const CubicBezier& b, double t) {
    return 6.0 * (1.0 - t) * (b.p[2] - 2.0 * b.p[1] + b.p[0]) +
           6.0 * t * (b.p[3] - 2.0 * b.p[2] + b.p[1]);
}

Vec2 eval_path(const BezierPath& path, double s) {
    if (path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty bezier path");
    }
    const double n = static_cast<double>(path.size());
    s = std::clamp(s, 0.0, n);
    auto index = static_cast<std::size_t>(std::floor(s));
    if (index >= path.size()) index = path.size() - 1;
    return eval_bezier(path.segments[index], std::clamp(s - static_cast<double>(index), 0.0, 1.0));
}

std::vector<Vec2> sample_path(const BezierPath& path, int per_segment) {
    std::vector<Vec2> out;
    if (path.empty() || per_segment < 1) return out;
    out.reserve(path.size() * static_cast<std::size_t>(per_segment) + 1);
    for (std::size_t i = 0; i < path.size(); ++i) {
        const int first = (i == 0) ? 0 : 1;
        for (int k = first; k <= per_segment; ++k) {
            out.push_back(eval_bezier(path.segments[i], static_cast<double>(k) / per_segment));
        }
    }
    return out;
}

double max_continuity_gap(const BezierPath& path) {
    double gap = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        gap = std::max(gap, (path.segments[i].p[0] - path.segments[i - 1].p[3]).norm());
    }
    return gap;
}

double min_control_x(const BezierPath& path) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& seg : path.segments) {
        for (const auto& q : seg.p) m = std::min(m, q.x());
    }
    return m;
}

}  // namespace insitu
