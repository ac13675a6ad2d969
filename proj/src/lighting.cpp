#include "insitu/lighting.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace insitu {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(1, count / 256));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk, end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

double horizontal_distance(const Vec3& a, const Vec3& b) {
    return std::hypot(a.x() - b.x(), a.z() - b.z());
}

void subdivide(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& normal, const Vec3& light,
               const LightingOptions& options, int depth, std::vector<LightSample>& out) {
    const Vec3 centroid = (a + b + c) / 3.0;
    const double limit =
        horizontal_distance(centroid, light) <= options.near_radius ? options.near_edge : options.far_edge;
    const double ab = (b - a).squaredNorm(), bc = (c - b).squaredNorm(), ca = (a - c).squaredNorm();
    const double longest = std::max({ab, bc, ca});
    if (longest <= limit * limit || depth > 40) {
        out.push_back({centroid, normal, 0.0, false});
        return;
    }
    // Split the longest edge at its midpoint.
    if (longest == ab) {
        const Vec3 m = 0.5 * (a + b);
        subdivide(a, m, c, normal, light, options, depth + 1, out);
        subdivide(m, b, c, normal, light, options, depth + 1, out);
    } else if (longest == bc) {
        const Vec3 m = 0.5 * (b + c);
        subdivide(a, b, m, normal, light, options, depth + 1, out);
        subdivide(a, m, c, normal, light, options, depth + 1, out);
    } else {
        const Vec3 m = 0.5 * (c + a);
        subdivide(a, b, m, normal, light, options, depth + 1, out);
        subdivide(m, b, c, normal, light, options, depth + 1, out);
    }
}

bool occluded(const Bvh& design, const Vec3& point, const Vec3& light) {
    if (design.empty()) return false;
    const Vec3 to_light = light - point;
    const double d = to_light.norm();
    return design.occluded(point, to_light / d, d);
}

void shade(LightSample& s, const Bvh& design, const PointLight& light) {
    s.occluded = occluded(design, s.point, light.position);
    if (s.occluded) {
        s.illuminance = 0.0;
        return;
    }
    const Vec3 to_light = light.position - s.point;
    const double d2 = to_light.squaredNorm();
    const double cosine = s.normal.dot(to_light) / std::sqrt(d2);
    s.illuminance = light.intensity * std::max(0.0, cosine) / d2;
}

}  // namespace

bool point_inside_mesh(const Bvh& accel, const Vec3& point) {
    if (accel.empty()) return false;
    static const Vec3 dirs[] = {Vec3(0.0123, 1.0, 0.0371).normalized(),
                                Vec3(0.7071, -0.0213, 0.7071).normalized(),
                                Vec3(-0.5774, 0.5774, -0.5774).normalized()};
    for (const auto& dir : dirs) {
        int crossings = 0;
        Vec3 origin = point;
        while (auto hit = accel.raycast(origin, dir, 1e9)) {
            ++crossings;
            origin = origin + dir * hit->t;
            if (crossings > 100000) break;
        }
        if (crossings % 2 == 0) return false;
    }
    return true;
}

LightingReport estimate_lighting(const TriangleMesh& design_mesh, const EnvironmentScene& scene,
                                 const PointLight& light, const LightingOptions& options) {
    if (scene.mesh.empty()) throw Error(ErrorCode::EmptyScene, "lighting needs an environment mesh");
    const Bvh design(design_mesh);
    if (point_inside_mesh(design, light.position)) {
        throw Error(ErrorCode::LightInsideMesh, "the light lies inside the design mesh");
    }

    LightingReport report;
    const Vec3 down = -kUp;
    if (const auto nadir = scene.accel.raycast(light.position, down, 1e9)) {
        report.samples.push_back({light.position + down * nadir->t, triangle_normal(scene.mesh, nadir->triangle),
                                  0.0, false});
    }
    for (std::size_t i = 0; i < scene.mesh.triangles.size(); ++i) {
        const auto& t = scene.mesh.triangles[i];
        const Vec3 normal = triangle_normal(scene.mesh, i);
        if (normal.isZero()) continue;
        subdivide(scene.mesh.vertices[t[0]], scene.mesh.vertices[t[1]], scene.mesh.vertices[t[2]], normal,
                  light.position, options, 0, report.samples);
    }
    parallel_for(report.samples.size(), options.threads,
                 [&](std::size_t i) { shade(report.samples[i], design, light); });
    double total = 0.0;
    for (const auto& s : report.samples) total += s.illuminance;
    if (!report.samples.empty()) report.mean_illuminance = total / static_cast<double>(report.samples.size());

    // Raster.
    const SupportPlane* floor = plane_below(scene, light.position);
    if (floor) report.floor_height = floor->height_at(light.position.x(), light.position.z());
    auto& raster = report.raster;
    raster.size = options.raster_size;
    raster.cell = options.raster_extent / options.raster_size;
    const Vec2 center = options.raster_center.value_or(Vec2(light.position.x(), light.position.z()));
    raster.origin = center - Vec2::Constant(0.5 * options.raster_extent);
    const auto cells = static_cast<std::size_t>(raster.size) * raster.size;
    raster.occlusion.assign(cells, 0.0);
    raster.floor.assign(cells, 0);
    const int ss = std::max(1, options.supersample);
    const double on_plane = RansacOptions{}.inlier_distance;

    parallel_for(static_cast<std::size_t>(raster.size), options.threads, [&](std::size_t row) {
        for (int col = 0; col < raster.size; ++col) {
            int hits_floor = 0, blocked = 0;
            for (int sy = 0; sy < ss; ++sy) {
                for (int sx = 0; sx < ss; ++sx) {
                    const double x = raster.origin.x() + (col + (sx + 0.5) / ss) * raster.cell;
                    const double z = raster.origin.y() + (static_cast<double>(row) + (sy + 0.5) / ss) * raster.cell;
                    const Vec3 top(x, light.position.y(), z);
                    const auto hit = scene.accel.raycast(top, down, 1e9);
                    if (!hit) continue;
                    const Vec3 p = top + down * hit->t;
                    if (occluded(design, p, light.position)) ++blocked;
                    if (floor && std::abs(floor->normal.dot(p) - floor->offset) <= on_plane &&
                        floor->contains(x, z, 0.01)) {
                        ++hits_floor;
                    }
                }
            }
            const std::size_t idx = row * static_cast<std::size_t>(raster.size) + col;
            raster.occlusion[idx] = static_cast<double>(blocked) / (ss * ss);
            raster.floor[idx] = hits_floor == ss * ss ? 1 : 0;
        }
    });

    double covered = 0.0;
    std::size_t counted = 0;
    const Vec2 foot(light.position.x(), light.position.z());
    for (int row = 0; row < raster.size; ++row) {
        for (int col = 0; col < raster.size; ++col) {
            const std::size_t idx = static_cast<std::size_t>(row) * raster.size + col;
            if (!raster.floor[idx] || (raster.cell_center(row, col) - foot).norm() > options.coverage_radius) continue;
            covered += raster.occlusion[idx];
            ++counted;
        }
    }
    report.shadow_coverage = counted ? covered / static_cast<double>(counted) : 0.0;
    return report;
}

std::string export_pgm(const ShadowRaster& raster) {
    std::string out = "P5\n" + std::to_string(raster.size) + " " + std::to_string(raster.size) + "\n255\n";
    out.reserve(out.size() + raster.occlusion.size());
    for (double o : raster.occlusion) {
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - o)))));
    }
    return out;
}

}  // namespace insitu
