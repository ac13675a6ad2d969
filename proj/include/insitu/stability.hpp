#pragma once

#include <vector>

#include <Eigen/Geometry>

#include "insitu/environment.hpp"
#include "insitu/mesh.hpp"

namespace insitu {

struct StabilityOptions {
    double drop_height = 0.02;
    double dt = 1.0 / 240.0;
    double gravity = 9.81;
    double friction = 0.5;
    double restitution = 0.0;
    double density = 1000.0;
    double settle_linear = 1e-3;   // m/s
    double settle_angular = 1e-2;  // rad/s
    double settle_time = 0.5;
    double max_time = 5.0;
    double topple_deg = 45.0;
    double erosion = 0.005;
    double contact_band = 0.001;
    int solver_iterations = 30;
    int trace_stride = 8;          // steps between trace samples
    /// Initial rotation about a horizontal axis through the center of mass.
    double release_tilt_deg = 0.0;
    Vec3 release_tilt_axis = Vec3::UnitZ();
};

/// Maps points of the input mesh to their simulated position.
struct RigidTransform {
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

struct TraceSample {
    double time = 0.0;
    RigidTransform pose;
};

struct StabilityReport {
    bool toppled = false;
    bool settled = false;
    double settle_time = 0.0;  // simulated time at which the settle window closed
    double tilt_deg = 0.0;     // up-axis deviation at the end of the run
    RigidTransform settled_pose;
    double quasi_static_margin = 0.0;
    std::vector<Vec3> contact_points;
    std::vector<TraceSample> trace;
};

/// Quasi-static prediction for a mesh released on a plane.
struct QuasiStaticResult {
    double margin = 0.0;             // positive predicts a stable release
    std::vector<Vec2> support;       // support polygon in plane coordinates
    Vec2 com = Vec2::Zero();         // projected center of mass, plane coordinates
    std::vector<Vec3> contacts;      // world points within the contact band
    bool pivoting = false;           // released pose rests on an edge or a point
};

/// Lowers the mesh (with the release tilt of `options`) onto the plane along
/// gravity and measures the signed distance of the projected center of mass
/// to the support polygon eroded by `options.erosion`. A body resting on an
/// edge or point pivots: the margin is then the horizontal distance from
/// the pivot to the center of mass, positive when gravity turns the body
/// back onto its base, capped by the margin of the untilted rest pose.
QuasiStaticResult quasi_static_analysis(const TriangleMesh& mesh, const SupportPlane& plane,
                                        const StabilityOptions& options = {});

double quasi_static_stability(const TriangleMesh& mesh, const SupportPlane& plane,
                              const StabilityOptions& options = {});

/// Drops the convex hull of the mesh from `drop_height` onto the plane and
/// steps it with sequential impulses until it settles or `max_time` passes.
/// Throws EmptyMesh.
StabilityReport estimate_stability(const TriangleMesh& mesh, const SupportPlane& plane,
                                   const StabilityOptions& options = {});

/// Picks the plane below the mesh from the scene. Throws NoSupportPlane.
const SupportPlane& support_plane_for(const EnvironmentScene& scene, const TriangleMesh& mesh);

StabilityReport estimate_stability(const TriangleMesh& mesh, const EnvironmentScene& scene,
                                   const StabilityOptions& options = {});

/// Axis-aligned horizontal plane y = height with unbounded extent.
SupportPlane horizontal_plane(double height);

}  // namespace insitu
