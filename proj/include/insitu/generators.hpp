#pragma once

#include <optional>
#include <string>
#include <vector>

#include "insitu/design.hpp"
#include "insitu/mesh.hpp"

namespace insitu {

inline constexpr int kDefaultLatheSteps = 64;

/// Empty space a generated design offers, in the design-local frame.
/// Radial cavities (lathe designs) give the inscribed inner radius over
/// height; box cavities (panel designs) are axis-aligned compartments.
struct Cavity {
    std::string name;
    bool radial = false;
    std::vector<Vec2> inner_radius;  // (y, r), ascending y
    double floor = 0.0;
    double top = 0.0;
    Vec3 box_min = Vec3::Zero();
    Vec3 box_max = Vec3::Zero();
};

struct GeneratedModel {
    TriangleMesh mesh;  // design-local frame
    std::vector<Cavity> cavities;
};

struct LatheSpec {
    BezierPath profile;                   // (radius, height) in meters
    double height = 0.0;                  // profile is remapped to [0, height]
    std::optional<double> diameter;       // largest diameter after scaling
    std::optional<double> base_diameter;  // diameter at the foot
    double twist_deg = 0.0;               // angular offset at the top
    int steps = kDefaultLatheSteps;
    bool closed_bottom = true;            // solid blank; otherwise an open tube
    double wall = 0.002;                  // tube wall thickness
    int samples_per_segment = 24;
};

/// Revolves a profile around local Y. Throws DegenerateProfile when the
/// profile comes closer than r_min to the axis or has no height.
GeneratedModel lathe_model(const LatheSpec& spec);

/// Builds the model for a valid configuration, unposed.
/// Throws InvalidConfiguration or DegenerateProfile.
GeneratedModel generate_model(const Design& design, const Configuration& config);

/// generate_model's mesh moved by the configuration's pose.
TriangleMesh generate_mesh(const Design& design, const Configuration& config);

/// Radii of the profile after remapping, scaling and base adjustment, as
/// (radius, y) samples. Exposed for tests and cavity checks.
std::vector<Vec2> lathe_radii(const LatheSpec& spec);

}  // namespace insitu
