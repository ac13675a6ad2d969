#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "insitu/common.hpp"
#include "insitu/design.hpp"

namespace insitu {

using Triangle = std::array<std::uint32_t, 3>;

/// A contiguous run of triangles forming one named part.
struct MeshPart {
    std::string name;
    std::size_t first = 0;
    std::size_t count = 0;

    bool operator==(const MeshPart&) const = default;
};

/// Indexed triangle geometry in meters, Y up. Triangles not covered by any
/// part are treated as one anonymous part.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<MeshPart> parts;

    bool empty() const { return triangles.empty(); }

    /// Appends `other`, offsetting indices. Each of its parts is renamed
    /// `name` when it has exactly one part, otherwise kept.
    void append(const TriangleMesh& other, std::string_view name = {});

    bool has_part(std::string_view name) const;
    bool has_part_prefix(std::string_view prefix) const;

    /// Parts as they are diagnosed, with the anonymous remainder if any.
    std::vector<MeshPart> effective_parts() const;
};

/// Closed box with outward winding, as a single named part.
TriangleMesh make_box(const Vec3& lo, const Vec3& hi, std::string name = "box");

double triangle_area(const TriangleMesh& mesh, std::size_t tri);
Vec3 triangle_normal(const TriangleMesh& mesh, std::size_t tri);  // unit, zero if degenerate

/// Volume, first and second moments of a closed region (uniform unit
/// density). `inertia` is taken about the center of mass.
struct MassProperties {
    double volume = 0.0;
    Vec3 center_of_mass = Vec3::Zero();
    Mat3 inertia = Mat3::Zero();
};

struct MeshDiagnostics {
    std::vector<std::string> part_names;
    std::vector<bool> watertight_per_part;
    double volume = 0.0;                     // over watertight parts
    Vec3 center_of_mass = Vec3::Zero();      // vertex average when volume is 0
    bool com_from_volume = false;
    Vec3 bbox_min = Vec3::Zero();
    Vec3 bbox_max = Vec3::Zero();

    bool all_watertight() const;
};

/// Edge-manifold check, divergence-theorem volume and center of mass.
MeshDiagnostics diagnose(const TriangleMesh& mesh);

/// True when every edge of triangles [first, first + count) is shared by
/// exactly two of them with opposite orientation.
bool is_watertight(const TriangleMesh& mesh, std::size_t first, std::size_t count);

/// Mass properties over the watertight parts only.
MassProperties mass_properties(const TriangleMesh& mesh);

/// Axis-aligned bounds over all vertices. Throws EmptyMesh.
std::pair<Vec3, Vec3> bounding_box(const TriangleMesh& mesh);

TriangleMesh transform_mesh(const TriangleMesh& mesh, const Pose& pose);
TriangleMesh transform_mesh(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& offset);

/// Binary STL: 80-byte header, little-endian uint32 count, then normal,
/// three vertices (float32) and a zero attribute word per triangle.
/// Throws EmptyMesh.
std::string export_stl(const TriangleMesh& mesh);

/// Reads binary STL, welding bit-identical vertices. Throws ParseError.
TriangleMesh read_stl(std::string_view bytes);

}  // namespace insitu
