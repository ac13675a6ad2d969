#include "insitu/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "insitu/hull.hpp"

namespace insitu {

double SupportPlane::height_at(double x, double z) const {
    return (offset - normal.x() * x - normal.z() * z) / normal.y();
}

bool SupportPlane::contains(double x, double z, double tol) const {
    return point_in_polygon(bounds, Vec2(x, z), tol);
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

Vec3 remap(const Vec3& p, bool z_up) { return z_up ? Vec3(p.x(), p.z(), -p.y()) : p; }

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool to_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && end == s.data() + s.size() && std::isfinite(out);
}

bool to_long(std::string_view s, long& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && end == s.data() + s.size();
}

void add_polygon(TriangleMesh& mesh, const std::vector<std::uint32_t>& poly, std::size_t line) {
    if (poly.size() < 3) parse_fail(line, "face with fewer than 3 vertices");
    if (poly.size() > 4) {
        throw Error(ErrorCode::NonTriangulated,
                    "line " + std::to_string(line) + ": face with " + std::to_string(poly.size()) +
                        " vertices");
    }
    mesh.triangles.push_back({poly[0], poly[1], poly[2]});
    if (poly.size() == 4) mesh.triangles.push_back({poly[0], poly[2], poly[3]});
}

}  // namespace

TriangleMesh parse_obj(std::string_view text, bool z_up) {
    TriangleMesh mesh;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields[0] == "v") {
            if (fields.size() < 4) parse_fail(line_no, "vertex needs 3 coordinates");
            Vec3 p;
            for (int k = 0; k < 3; ++k) {
                if (!to_double(fields[k + 1], p[k])) parse_fail(line_no, "malformed coordinate");
            }
            mesh.vertices.push_back(remap(p, z_up));
        } else if (fields[0] == "f") {
            std::vector<std::uint32_t> poly;
            for (std::size_t k = 1; k < fields.size(); ++k) {
                const auto ref = fields[k].substr(0, fields[k].find('/'));
                long idx = 0;
                if (!to_long(ref, idx) || idx == 0) parse_fail(line_no, "malformed face index");
                const long count = static_cast<long>(mesh.vertices.size());
                const long resolved = idx > 0 ? idx - 1 : count + idx;
                if (resolved < 0 || resolved >= count) parse_fail(line_no, "face index out of range");
                poly.push_back(static_cast<std::uint32_t>(resolved));
            }
            add_polygon(mesh, poly, line_no);
        }
        if (end == text.size()) break;
    }
    return mesh;
}

namespace {

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view s) {
    if (s == "char" || s == "int8") return PlyType::i8;
    if (s == "uchar" || s == "uint8") return PlyType::u8;
    if (s == "short" || s == "int16") return PlyType::i16;
    if (s == "ushort" || s == "uint16") return PlyType::u16;
    if (s == "int" || s == "int32") return PlyType::i32;
    if (s == "uint" || s == "uint32") return PlyType::u32;
    if (s == "float" || s == "float32") return PlyType::f32;
    if (s == "double" || s == "float64") return PlyType::f64;
    return std::nullopt;
}

std::size_t ply_size(PlyType t) {
    switch (t) {
        case PlyType::i8:
        case PlyType::u8: return 1;
        case PlyType::i16:
        case PlyType::u16: return 2;
        case PlyType::i32:
        case PlyType::u32:
        case PlyType::f32: return 4;
        case PlyType::f64: return 8;
    }
    return 1;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::f32;
    bool is_list = false;
    PlyType count_type = PlyType::u8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;
};

class BinaryReader {
public:
    BinaryReader(std::string_view data, std::size_t pos) : data_(data), pos_(pos) {}

    double read(PlyType t) {
        const std::size_t n = ply_size(t);
        if (pos_ + n > data_.size()) throw Error(ErrorCode::ParseError, "PLY body is truncated");
        unsigned char b[8] = {};
        std::memcpy(b, data_.data() + pos_, n);
        pos_ += n;
        std::uint64_t raw = 0;
        for (std::size_t i = 0; i < n; ++i) raw |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        switch (t) {
            case PlyType::i8: return static_cast<std::int8_t>(raw);
            case PlyType::u8: return static_cast<std::uint8_t>(raw);
            case PlyType::i16: return static_cast<std::int16_t>(raw);
            case PlyType::u16: return static_cast<std::uint16_t>(raw);
            case PlyType::i32: return static_cast<std::int32_t>(raw);
            case PlyType::u32: return static_cast<std::uint32_t>(raw);
            case PlyType::f32: {
                float f;
                const auto r32 = static_cast<std::uint32_t>(raw);
                std::memcpy(&f, &r32, 4);
                return f;
            }
            case PlyType::f64: {
                double d;
                std::memcpy(&d, &raw, 8);
                return d;
            }
        }
        return 0.0;
    }

private:
    std::string_view data_;
    std::size_t pos_;
};

class AsciiReader {
public:
    AsciiReader(std::string_view data, std::size_t pos) : data_(data), pos_(pos) {}

    double read(PlyType) {
        while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
        double v = 0.0;
        if (start == pos_ || !to_double(data_.substr(start, pos_ - start), v)) {
            throw Error(ErrorCode::ParseError, "malformed or missing PLY value");
        }
        return v;
    }

private:
    std::string_view data_;
    std::size_t pos_;
};

template <typename Reader>
TriangleMesh read_ply_body(Reader reader, const std::vector<PlyElement>& elements, bool z_up) {
    TriangleMesh mesh;
    for (const auto& el : elements) {
        for (std::size_t i = 0; i < el.count; ++i) {
            Vec3 p = Vec3::Zero();
            for (const auto& prop : el.props) {
                if (prop.is_list) {
                    const double n = reader.read(prop.count_type);
                    if (n < 0 || n > 1e6 || n != std::floor(n)) {
                        throw Error(ErrorCode::ParseError, "bad PLY list length");
                    }
                    std::vector<std::uint32_t> poly;
                    for (int k = 0; k < static_cast<int>(n); ++k) {
                        const double idx = reader.read(prop.type);
                        if (el.name == "face") {
                            if (idx < 0 || idx != std::floor(idx)) {
                                throw Error(ErrorCode::ParseError, "bad PLY face index");
                            }
                            poly.push_back(static_cast<std::uint32_t>(idx));
                        }
                    }
                    if (el.name == "face" &&
                        (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
                        for (auto idx : poly) {
                            if (idx >= mesh.vertices.size()) {
                                throw Error(ErrorCode::ParseError, "PLY face index out of range");
                            }
                        }
                        add_polygon(mesh, poly, 0);
                    }
                    continue;
                }
                const double v = reader.read(prop.type);
                if (el.name == "vertex") {
                    if (prop.name == "x") p.x() = v;
                    if (prop.name == "y") p.y() = v;
                    if (prop.name == "z") p.z() = v;
                }
            }
            if (el.name == "vertex") {
                if (!p.allFinite()) throw Error(ErrorCode::ParseError, "non-finite PLY vertex");
                mesh.vertices.push_back(remap(p, z_up));
            }
        }
    }
    return mesh;
}

}  // namespace

TriangleMesh parse_ply(std::string_view bytes, bool z_up) {
    const auto header_end = bytes.find("end_header");
    if (!bytes.starts_with("ply") || header_end == std::string_view::npos) {
        throw Error(ErrorCode::ParseError, "not a PLY file");
    }
    std::size_t body = bytes.find('\n', header_end);
    if (body == std::string_view::npos) throw Error(ErrorCode::ParseError, "PLY header has no body");
    ++body;

    bool binary = false, seen_format = false;
    std::vector<PlyElement> elements;
    std::size_t pos = 0, line_no = 0;
    while (pos < header_end) {
        std::size_t end = bytes.find('\n', pos);
        const auto fields = split_ws(bytes.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (fields.empty() || fields[0] == "ply" || fields[0] == "comment" || fields[0] == "obj_info") {
            continue;
        }
        if (fields[0] == "format") {
            if (fields.size() < 2) parse_fail(line_no, "format needs a type");
            if (fields[1] == "ascii") {
                binary = false;
            } else if (fields[1] == "binary_little_endian") {
                binary = true;
            } else {
                parse_fail(line_no, "unsupported PLY format '" + std::string(fields[1]) + "'");
            }
            seen_format = true;
        } else if (fields[0] == "element") {
            long count = 0;
            if (fields.size() != 3 || !to_long(fields[2], count) || count < 0) {
                parse_fail(line_no, "malformed element line");
            }
            elements.push_back({std::string(fields[1]), static_cast<std::size_t>(count), {}});
        } else if (fields[0] == "property") {
            if (elements.empty()) parse_fail(line_no, "property before any element");
            PlyProperty prop;
            if (fields.size() == 5 && fields[1] == "list") {
                auto ct = ply_type(fields[2]);
                auto it = ply_type(fields[3]);
                if (!ct || !it) parse_fail(line_no, "unknown PLY list type");
                prop.is_list = true;
                prop.count_type = *ct;
                prop.type = *it;
                prop.name = std::string(fields[4]);
            } else if (fields.size() == 3) {
                auto t = ply_type(fields[1]);
                if (!t) parse_fail(line_no, "unknown PLY type '" + std::string(fields[1]) + "'");
                prop.type = *t;
                prop.name = std::string(fields[2]);
            } else {
                parse_fail(line_no, "malformed property line");
            }
            elements.back().props.push_back(prop);
        } else {
            parse_fail(line_no, "unknown header line '" + std::string(fields[0]) + "'");
        }
    }
    if (!seen_format) throw Error(ErrorCode::ParseError, "PLY header has no format line");
    if (binary) return read_ply_body(BinaryReader(bytes, body), elements, z_up);
    return read_ply_body(AsciiReader(bytes, body), elements, z_up);
}

namespace {

struct Sample {
    Vec3 point;
    Vec3 normal;
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<Sample> area_samples(const TriangleMesh& mesh, int count, std::mt19937_64& rng) {
    std::vector<double> cdf;
    cdf.reserve(mesh.triangles.size());
    double total = 0.0;
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        total += triangle_area(mesh, i);
        cdf.push_back(total);
    }
    std::vector<Sample> out;
    if (!(total > 0.0)) return out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double r = uniform01(rng) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        if (it == cdf.end()) --it;
        const auto tri = static_cast<std::size_t>(it - cdf.begin());
        const auto& t = mesh.triangles[tri];
        const double s = std::sqrt(uniform01(rng));
        const double b = uniform01(rng);
        const Vec3 p = (1.0 - s) * mesh.vertices[t[0]] + s * (1.0 - b) * mesh.vertices[t[1]] +
                       s * b * mesh.vertices[t[2]];
        out.push_back({p, triangle_normal(mesh, tri)});
    }
    return out;
}

}  // namespace

std::vector<SupportPlane> detect_planes(const TriangleMesh& mesh, const RansacOptions& options) {
    std::vector<SupportPlane> planes;
    if (mesh.empty()) return planes;
    std::mt19937_64 rng(options.seed);
    auto samples = area_samples(mesh, options.samples, rng);
    const std::size_t total = samples.size();
    const auto threshold = static_cast<std::size_t>(
        std::max<double>(options.min_inliers, std::ceil(options.min_fraction * total)));
    const double cos_tilt = std::cos(options.max_tilt_deg * std::numbers::pi / 180.0);

    std::vector<std::size_t> remaining(total);
    for (std::size_t i = 0; i < total; ++i) remaining[i] = i;
    // Inliers lie close to the plane and face the same way as it.
    const auto fits = [&](std::size_t i, const Vec3& n, double d) {
        return std::abs(n.dot(samples[i].point) - d) <= options.inlier_distance &&
               samples[i].normal.dot(n) >= cos_tilt;
    };

    for (int round = 0; round < options.max_planes && remaining.size() >= threshold; ++round) {
        Vec3 best_n = kUp;
        double best_d = 0.0;
        std::size_t best_count = 0;
        for (int it = 0; it < options.iterations; ++it) {
            const auto& s = samples[remaining[static_cast<std::size_t>(uniform01(rng) * remaining.size())]];
            if (s.normal.dot(kUp) < cos_tilt) continue;
            const double d = s.normal.dot(s.point);
            std::size_t count = 0;
            for (auto i : remaining) {
                if (fits(i, s.normal, d)) ++count;
            }
            if (count > best_count) {
                best_count = count;
                best_n = s.normal;
                best_d = d;
            }
        }
        if (best_count < threshold) break;

        // Least-squares refit over the inliers.
        std::vector<std::size_t> inliers;
        Vec3 centroid = Vec3::Zero();
        for (auto i : remaining) {
            if (fits(i, best_n, best_d)) {
                inliers.push_back(i);
                centroid += samples[i].point;
            }
        }
        centroid /= static_cast<double>(inliers.size());
        Mat3 cov = Mat3::Zero();
        for (auto i : inliers) {
            const Vec3 q = samples[i].point - centroid;
            cov += q * q.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        Vec3 n = eig.eigenvectors().col(0).normalized();
        if (n.dot(kUp) < 0.0) n = -n;
        if (n.dot(kUp) < cos_tilt) n = best_n;
        const double d = n.dot(centroid);

        SupportPlane plane;
        plane.normal = n;
        plane.offset = d;
        std::vector<std::size_t> keep;
        std::vector<Vec2> footprint;
        for (auto i : remaining) {
            if (fits(i, n, d)) {
                footprint.emplace_back(samples[i].point.x(), samples[i].point.z());
            } else {
                keep.push_back(i);
            }
        }
        plane.inlier_count = static_cast<int>(footprint.size());
        plane.bounds = convex_hull_2d(std::move(footprint));
        planes.push_back(std::move(plane));
        remaining = std::move(keep);
    }
    std::sort(planes.begin(), planes.end(), [](const SupportPlane& a, const SupportPlane& b) {
        return a.height_at(0, 0) < b.height_at(0, 0);
    });
    return planes;
}

EnvironmentScene make_scene(TriangleMesh mesh, const RansacOptions& options) {
    if (mesh.empty()) throw Error(ErrorCode::EmptyScan, "scan has no triangles");
    EnvironmentScene scene;
    scene.mesh = std::move(mesh);
    scene.accel = Bvh(scene.mesh);
    scene.planes = detect_planes(scene.mesh, options);
    scene.seed = options.seed;
    return scene;
}

EnvironmentScene load_scene(std::string_view bytes, SceneFormat format, const LoadOptions& options) {
    TriangleMesh mesh = format == SceneFormat::obj ? parse_obj(bytes, options.z_up)
                                                   : parse_ply(bytes, options.z_up);
    return make_scene(std::move(mesh), options.ransac);
}

SceneFormat format_from_path(std::string_view path) {
    std::string ext;
    if (const auto dot = path.rfind('.'); dot != std::string_view::npos) {
        for (char c : path.substr(dot + 1)) ext += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (ext == "obj") return SceneFormat::obj;
    if (ext == "ply") return SceneFormat::ply;
    throw Error(ErrorCode::ParseError, "unknown scan format for '" + std::string(path) + "'");
}

std::optional<Hit> raycast(const EnvironmentScene& scene, const Vec3& origin, const Vec3& dir,
                           double max_t) {
    return scene.accel.raycast(origin, dir, max_t);
}

const SupportPlane* plane_below(const EnvironmentScene& scene, const Vec3& point) {
    const SupportPlane* containing = nullptr;
    const SupportPlane* any = nullptr;
    for (const auto& p : scene.planes) {
        const double h = p.height_at(point.x(), point.z());
        if (h > point.y() + 1e-6) continue;
        if (!any || h > any->height_at(point.x(), point.z())) any = &p;
        if (p.contains(point.x(), point.z(), 1e-6) &&
            (!containing || h > containing->height_at(point.x(), point.z()))) {
            containing = &p;
        }
    }
    return containing ? containing : any;
}

std::string export_obj(const TriangleMesh& mesh) {
    std::string out;
    for (const auto& v : mesh.vertices) {
        out += "v " + format_number(v.x()) + " " + format_number(v.y()) + " " + format_number(v.z()) + "\n";
    }
    for (const auto& t : mesh.triangles) {
        out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
               std::to_string(t[2] + 1) + "\n";
    }
    return out;
}

}  // namespace insitu
