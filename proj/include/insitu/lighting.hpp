#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "insitu/environment.hpp"
#include "insitu/mesh.hpp"

namespace insitu {

struct PointLight {
    Vec3 position = Vec3::Zero();
    double intensity = 1.0;
};

struct LightingOptions {
    double near_edge = 0.02;    // max sample triangle edge close to the light
    double far_edge = 0.10;     // max sample triangle edge elsewhere
    double near_radius = 1.5;   // horizontal distance from the light that counts as close
    double coverage_radius = 1.0;
    int raster_size = 256;
    int supersample = 2;        // per axis
    double raster_extent = 2.0;           // side length in meters
    std::optional<Vec2> raster_center;    // (x, z); defaults to below the light
    int threads = 0;                      // 0 picks the hardware concurrency
};

struct LightSample {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::Zero();
    double illuminance = 0.0;  // intensity * max(0, cos) / d^2, relative units
    bool occluded = false;
};

/// Top-down orthographic grid over the environment. Cell (row, col) spans
/// x in origin.x + [col, col + 1) * cell and z in origin.y + [row, row + 1) * cell.
struct ShadowRaster {
    int size = 0;
    Vec2 origin = Vec2::Zero();
    double cell = 0.0;
    std::vector<double> occlusion;    // fraction of occluded sub-samples, row-major
    std::vector<std::uint8_t> floor;  // 1 where every sub-sample lies on the floor plane

    double at(int row, int col) const { return occlusion[static_cast<std::size_t>(row) * size + col]; }
    Vec2 cell_center(int row, int col) const {
        return origin + Vec2((col + 0.5) * cell, (row + 0.5) * cell);
    }
};

struct LightingReport {
    std::vector<LightSample> samples;  // the first one lies straight below the light, when any
    ShadowRaster raster;
    double shadow_coverage = 0.0;  // mean floor-cell occlusion within coverage_radius
    double mean_illuminance = 0.0;
    std::optional<double> floor_height;  // plane used for coverage
};

/// Samples the environment surface, tests each sample against the design
/// mesh and rasterizes the shadow seen from above. Throws EmptyScene or
/// LightInsideMesh.
LightingReport estimate_lighting(const TriangleMesh& design_mesh, const EnvironmentScene& scene,
                                 const PointLight& light, const LightingOptions& options = {});

/// True when rays from `point` cross the mesh an odd number of times in
/// each of three fixed directions.
bool point_inside_mesh(const Bvh& accel, const Vec3& point);

/// Binary PGM (P5, 8-bit): 255 lit, 0 fully occluded, first row at the
/// lowest z.
std::string export_pgm(const ShadowRaster& raster);

}  // namespace insitu
