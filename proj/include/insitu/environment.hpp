#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "insitu/bvh.hpp"
#include "insitu/mesh.hpp"

namespace insitu {

/// Horizontal support surface: points x with normal . x = offset.
struct SupportPlane {
    Vec3 normal = kUp;
    double offset = 0.0;
    int inlier_count = 0;
    std::vector<Vec2> bounds;  // convex hull of inliers in (x, z), counter-clockwise

    /// Height of the plane at horizontal position (x, z).
    double height_at(double x, double z) const;
    bool contains(double x, double z, double tol = 0.0) const;
};

struct RansacOptions {
    int samples = 40000;
    int iterations = 200;
    double inlier_distance = 0.005;
    double max_tilt_deg = 10.0;
    int min_inliers = 80;
    double min_fraction = 0.002;
    int max_planes = 8;
    std::uint64_t seed = 0x5eed'0f'5ca9ULL;
};

/// RANSAC over area-weighted surface samples. Hypotheses are a sample and
/// its face normal. Inliers are samples within the inlier distance whose
/// face normal is within the tilt limit of the plane's. Each accepted plane
/// is refit by least squares and its inliers removed before the next round.
std::vector<SupportPlane> detect_planes(const TriangleMesh& mesh, const RansacOptions& options = {});

enum class SceneFormat { obj, ply };

struct LoadOptions {
    bool z_up = false;  // remap (x, y, z) -> (x, z, -y)
    RansacOptions ransac;
};

struct EnvironmentScene {
    TriangleMesh mesh;
    std::vector<SupportPlane> planes;
    Bvh accel;
    std::uint64_t seed = 0;
};

/// ASCII OBJ. Quads are split, larger polygons raise NonTriangulated.
TriangleMesh parse_obj(std::string_view text, bool z_up = false);

/// ASCII or binary little-endian PLY with a vertex and a face element.
TriangleMesh parse_ply(std::string_view bytes, bool z_up = false);

/// Parses, builds the acceleration structure and detects planes.
/// Throws ParseError, EmptyScan or NonTriangulated.
EnvironmentScene load_scene(std::string_view bytes, SceneFormat format, const LoadOptions& options = {});
EnvironmentScene make_scene(TriangleMesh mesh, const RansacOptions& options = {});

/// Guesses the format from a file name extension. Throws ParseError.
SceneFormat format_from_path(std::string_view path);

std::optional<Hit> raycast(const EnvironmentScene& scene, const Vec3& origin, const Vec3& dir,
                           double max_t);

/// The highest plane lying below `point` whose bounds contain its
/// horizontal position, or the highest plane below it when none contains
/// it. nullptr when no plane is below.
const SupportPlane* plane_below(const EnvironmentScene& scene, const Vec3& point);

/// ASCII OBJ text of a mesh (1-based indices).
std::string export_obj(const TriangleMesh& mesh);

}  // namespace insitu
