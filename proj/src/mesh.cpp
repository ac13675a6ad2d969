#include "insitu/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>
#include <unordered_map>

namespace insitu {

void TriangleMesh::append(const TriangleMesh& other, std::string_view name) {
    const auto base = static_cast<std::uint32_t>(vertices.size());
    const std::size_t tri_base = triangles.size();
    vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
    for (const auto& t : other.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    auto other_parts = other.effective_parts();
    for (auto p : other_parts) {
        p.first += tri_base;
        if (!name.empty() && other_parts.size() == 1) p.name = std::string(name);
        parts.push_back(std::move(p));
    }
}

bool TriangleMesh::has_part(std::string_view name) const {
    return std::any_of(parts.begin(), parts.end(), [&](const MeshPart& p) { return p.name == name; });
}

bool TriangleMesh::has_part_prefix(std::string_view prefix) const {
    return std::any_of(parts.begin(), parts.end(),
                       [&](const MeshPart& p) { return p.name.starts_with(prefix); });
}

std::vector<MeshPart> TriangleMesh::effective_parts() const {
    std::vector<MeshPart> out = parts;
    std::vector<bool> covered(triangles.size(), false);
    for (const auto& p : parts) {
        for (std::size_t i = p.first; i < std::min(p.first + p.count, triangles.size()); ++i) {
            covered[i] = true;
        }
    }
    // Uncovered triangles form one anonymous part, kept contiguous where possible.
    std::size_t first = triangles.size(), count = 0;
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        if (covered[i]) continue;
        if (count == 0) first = i;
        ++count;
    }
    if (count > 0 && first + count <= triangles.size() &&
        std::all_of(covered.begin() + static_cast<long>(first),
                    covered.begin() + static_cast<long>(first + count),
                    [](bool c) { return !c; })) {
        out.push_back({"mesh", first, count});
    }
    return out;
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi, std::string name) {
    TriangleMesh m;
    for (int i = 0; i < 8; ++i) {
        m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(),
                                (i & 4) ? hi.z() : lo.z());
    }
    m.triangles = {
        {0, 2, 1}, {1, 2, 3},  // z = lo
        {4, 5, 6}, {5, 7, 6},  // z = hi
        {0, 1, 4}, {1, 5, 4},  // y = lo
        {2, 6, 3}, {3, 6, 7},  // y = hi
        {0, 4, 2}, {2, 4, 6},  // x = lo
        {1, 3, 5}, {3, 7, 5},  // x = hi
    };
    m.parts.push_back({std::move(name), 0, 12});
    return m;
}

double triangle_area(const TriangleMesh& mesh, std::size_t tri) {
    const auto& t = mesh.triangles[tri];
    const Vec3& a = mesh.vertices[t[0]];
    return 0.5 * (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a).norm();
}

Vec3 triangle_normal(const TriangleMesh& mesh, std::size_t tri) {
    const auto& t = mesh.triangles[tri];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3 n = (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a);
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

bool is_watertight(const TriangleMesh& mesh, std::size_t first, std::size_t count) {
    if (count == 0) return false;
    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(count * 3);
    auto key = [](std::uint32_t a, std::uint32_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    };
    for (std::size_t i = first; i < first + count; ++i) {
        const auto& t = mesh.triangles[i];
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return false;
        for (int e = 0; e < 3; ++e) {
            if (++directed[key(t[e], t[(e + 1) % 3])] > 1) return false;
        }
    }
    for (const auto& [k, n] : directed) {
        const auto a = static_cast<std::uint32_t>(k >> 32);
        const auto b = static_cast<std::uint32_t>(k & 0xffffffffu);
        if (!directed.contains(key(b, a))) return false;
    }
    return true;
}

bool MeshDiagnostics::all_watertight() const {
    return std::all_of(watertight_per_part.begin(), watertight_per_part.end(),
                       [](bool b) { return b; });
}

namespace {

// Signed tetrahedron (origin, a, b, c) contributions to volume, first
// moment and second moment (covariance about the origin).
void accumulate(const Vec3& a, const Vec3& b, const Vec3& c, double& volume, Vec3& first,
                Mat3& second) {
    Mat3 A;
    A.col(0) = a;
    A.col(1) = b;
    A.col(2) = c;
    const double det = A.determinant();
    volume += det / 6.0;
    first += det / 24.0 * (a + b + c);
    Mat3 canonical;
    canonical << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    second += det / 120.0 * (A * canonical * A.transpose());
}

}  // namespace

MassProperties mass_properties(const TriangleMesh& mesh) {
    double volume = 0.0;
    Vec3 first = Vec3::Zero();
    Mat3 second = Mat3::Zero();
    for (const auto& part : mesh.effective_parts()) {
        if (!is_watertight(mesh, part.first, part.count)) continue;
        for (std::size_t i = part.first; i < part.first + part.count; ++i) {
            const auto& t = mesh.triangles[i];
            accumulate(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], volume, first,
                       second);
        }
    }
    MassProperties mp;
    mp.volume = volume;
    if (volume <= 0.0) return mp;
    mp.center_of_mass = first / volume;
    const Mat3 central = second - volume * mp.center_of_mass * mp.center_of_mass.transpose();
    mp.inertia = central.trace() * Mat3::Identity() - central;
    return mp;
}

std::pair<Vec3, Vec3> bounding_box(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no vertices");
    Vec3 lo = mesh.vertices.front(), hi = lo;
    for (const auto& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return {lo, hi};
}

MeshDiagnostics diagnose(const TriangleMesh& mesh) {
    MeshDiagnostics d;
    for (const auto& part : mesh.effective_parts()) {
        d.part_names.push_back(part.name);
        d.watertight_per_part.push_back(is_watertight(mesh, part.first, part.count));
    }
    if (mesh.vertices.empty()) return d;
    std::tie(d.bbox_min, d.bbox_max) = bounding_box(mesh);
    const auto mp = mass_properties(mesh);
    if (mp.volume > 0.0) {
        d.volume = mp.volume;
        d.center_of_mass = mp.center_of_mass;
        d.com_from_volume = true;
    } else {
        Vec3 sum = Vec3::Zero();
        for (const auto& v : mesh.vertices) sum += v;
        d.center_of_mass = sum / static_cast<double>(mesh.vertices.size());
    }
    return d;
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& offset) {
    TriangleMesh out = mesh;
    for (auto& v : out.vertices) v = rotation * v + offset;
    return out;
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const Pose& pose) {
    TriangleMesh out = mesh;
    for (auto& v : out.vertices) v = pose_point(pose, v);
    return out;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, double d) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(d)));
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    }
    return v;
}

}  // namespace

std::string export_stl(const TriangleMesh& mesh) {
    if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "cannot export an empty mesh");
    std::string out;
    out.reserve(84 + 50 * mesh.triangles.size());
    std::string header = "binary STL, units: meters";
    header.resize(80, ' ');
    out += header;
    put_u32(out, static_cast<std::uint32_t>(mesh.triangles.size()));
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const Vec3 n = triangle_normal(mesh, i);
        for (int k = 0; k < 3; ++k) put_f32(out, n[k]);
        for (auto idx : mesh.triangles[i]) {
            for (int k = 0; k < 3; ++k) put_f32(out, mesh.vertices[idx][k]);
        }
        out.push_back('\0');
        out.push_back('\0');
    }
    return out;
}

TriangleMesh read_stl(std::string_view bytes) {
    if (bytes.size() < 84) throw Error(ErrorCode::ParseError, "STL shorter than its header");
    const std::uint32_t count = get_u32(bytes, 80);
    if (bytes.size() != 84 + 50 * static_cast<std::size_t>(count)) {
        throw Error(ErrorCode::ParseError, "STL size does not match its triangle count");
    }
    TriangleMesh mesh;
    std::map<std::array<std::uint32_t, 3>, std::uint32_t> index;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::size_t base = 84 + 50 * static_cast<std::size_t>(i) + 12;
        Triangle tri{};
        for (int v = 0; v < 3; ++v) {
            std::array<std::uint32_t, 3> raw{};
            for (int k = 0; k < 3; ++k) raw[k] = get_u32(bytes, base + 12 * v + 4 * k);
            auto [it, inserted] = index.try_emplace(raw, static_cast<std::uint32_t>(mesh.vertices.size()));
            if (inserted) {
                mesh.vertices.emplace_back(std::bit_cast<float>(raw[0]), std::bit_cast<float>(raw[1]),
                                           std::bit_cast<float>(raw[2]));
            }
            tri[v] = it->second;
        }
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

}  // namespace insitu
