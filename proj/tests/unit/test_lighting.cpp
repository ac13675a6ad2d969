#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "insitu/lighting.hpp"

using namespace insitu;

namespace {

/// Radius of the occluded region on the raster row through the light,
/// reading the half-occluded crossing point on each side.
double shadow_radius(const ShadowRaster& r, const Vec2& center) {
    const int row = static_cast<int>(std::floor((center.y() - r.origin.y()) / r.cell));
    const auto crossing = [&](int step) {
        int col = static_cast<int>(std::floor((center.x() - r.origin.x()) / r.cell));
        while (col + step >= 0 && col + step < r.size && r.at(row, col + step) >= 0.5) col += step;
        // Interpolate between the last occluded cell and its neighbour.
        const double a = r.at(row, col);
        const double b = r.at(row, col + step);
        const double frac = (a - 0.5) / (a - b);
        return r.cell_center(row, col).x() + step * frac * r.cell;
    };
    return 0.5 * (crossing(1) - crossing(-1));
}

double expected_coverage(const ShadowRaster& r, const Vec2& center, double radius) {
    double sum = 0.0;
    int count = 0;
    for (int row = 0; row < r.size; ++row) {
        for (int col = 0; col < r.size; ++col) {
            if (!r.floor[static_cast<std::size_t>(row) * r.size + col]) continue;
            if ((r.cell_center(row, col) - center).norm() > radius) continue;
            sum += r.at(row, col);
            ++count;
        }
    }
    return count ? sum / count : 0.0;
}

}  // namespace

TEST_CASE("disc occluder casts the similar-triangles shadow") {
    const auto scene = make_scene(testing::floor_grid(2.0, 8, 0.0));
    const PointLight light{Vec3(0, 2.0, 0), 1.0};
    const auto report = estimate_lighting(testing::disc(0.1, 1.0), scene, light);
    REQUIRE(report.raster.size == 256);
    // r H / (H - h) = 0.1 * 2 / 1
    CHECK(std::abs(shadow_radius(report.raster, Vec2(0, 0)) - 0.2) <= 0.05 * 0.2);
    REQUIRE(report.floor_height.has_value());
    CHECK(*report.floor_height == doctest::Approx(0.0));
    // Coverage over the 1 m disc: pi 0.2^2 / (pi 1^2) = 0.04.
    CHECK(report.shadow_coverage == doctest::Approx(0.04).epsilon(0.05));
    CHECK(report.shadow_coverage == doctest::Approx(expected_coverage(report.raster, Vec2(0, 0), 1.0)).epsilon(1e-6));
    REQUIRE_FALSE(report.samples.empty());
    CHECK(report.samples.front().occluded);
}

TEST_CASE("off-centre light keeps the shadow centred below the occluder") {
    const auto scene = make_scene(testing::floor_grid(2.0, 8, 0.0));
    TriangleMesh disc = testing::disc(0.1, 1.0);
    for (auto& v : disc.vertices) v += Vec3(0.3, 0, 0.2);
    const PointLight light{Vec3(0.3, 2.0, 0.2), 1.0};
    const auto report = estimate_lighting(disc, scene, light);
    CHECK(std::abs(shadow_radius(report.raster, Vec2(0.3, 0.2)) - 0.2) <= 0.01);
}

TEST_CASE("inverse-square scaling of unoccluded illuminance") {
    const auto scene = make_scene(testing::floor_grid(2.0, 8, 0.0));
    const auto near = estimate_lighting(TriangleMesh{}, scene, {Vec3(0, 1.0, 0), 3.0});
    const auto far = estimate_lighting(TriangleMesh{}, scene, {Vec3(0, 2.0, 0), 3.0});
    REQUIRE(near.samples.size() == far.samples.size());
    // Same sample points: the nadir sample is first and lies at the origin.
    CHECK(near.samples.front().point.isApprox(far.samples.front().point));
    CHECK(near.samples.front().illuminance == doctest::Approx(3.0));
    CHECK(std::abs(far.samples.front().illuminance / near.samples.front().illuminance - 0.25) <= 1e-6);
    double peak_near = 0.0, peak_far = 0.0;
    for (const auto& s : near.samples) peak_near = std::max(peak_near, s.illuminance);
    for (const auto& s : far.samples) peak_far = std::max(peak_far, s.illuminance);
    CHECK(std::abs(peak_far / peak_near - 0.25) <= 1e-6);
}

TEST_CASE("no design mesh means nothing is occluded") {
    const auto scene = make_scene(testing::floor_grid(1.5, 6, 0.0));
    const auto report = estimate_lighting(TriangleMesh{}, scene, {Vec3(0.2, 1.5, -0.1), 1.0});
    CHECK(report.shadow_coverage == 0.0);
    for (const auto& s : report.samples) CHECK_FALSE(s.occluded);
    for (double o : report.raster.occlusion) CHECK(o == 0.0);
}

TEST_CASE("a box around the light's lower hemisphere blocks everything below") {
    const auto scene = make_scene(testing::floor_grid(2.0, 8, 0.0));
    // Open-topped box: floor and four walls, light inside above its floor.
    TriangleMesh cup = make_box(Vec3(-0.3, 1.0, -0.3), Vec3(0.3, 1.6, 0.3));
    cup.triangles.erase(std::remove_if(cup.triangles.begin(), cup.triangles.end(),
                                       [&](const Triangle& t) {
                                           return cup.vertices[t[0]].y() > 1.5 && cup.vertices[t[1]].y() > 1.5 &&
                                                  cup.vertices[t[2]].y() > 1.5;
                                       }),
                        cup.triangles.end());
    cup.parts.clear();
    const auto report = estimate_lighting(cup, scene, {Vec3(0, 1.4, 0), 1.0});
    CHECK(report.shadow_coverage == doctest::Approx(1.0));
    for (const auto& s : report.samples) {
        if (s.point.y() < 0.5) CHECK(s.occluded);
    }
}

TEST_CASE("shadow coverage grows with the occluder radius") {
    const auto scene = make_scene(testing::floor_grid(2.0, 8, 0.0));
    double last = -1.0;
    for (double r : {0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.45}) {
        const auto report = estimate_lighting(testing::disc(r, 1.0), scene, {Vec3(0, 2.0, 0), 1.0});
        CHECK_MESSAGE(report.shadow_coverage >= last, "radius " << r);
        last = report.shadow_coverage;
    }
    CHECK(last > 0.5);
}

TEST_CASE("illuminance is non-negative and zero when occluded") {
    const auto scene = make_scene(testing::floor_grid(2.0, 8, 0.0));
    const auto report = estimate_lighting(testing::disc(0.2, 0.8), scene, {Vec3(0.1, 1.7, 0.0), 2.0});
    double sum = 0.0;
    for (const auto& s : report.samples) {
        CHECK(s.illuminance >= 0.0);
        if (s.occluded) CHECK(s.illuminance == 0.0);
        sum += s.illuminance;
    }
    CHECK(report.mean_illuminance == doctest::Approx(sum / report.samples.size()));
    for (double o : report.raster.occlusion) CHECK((o >= 0.0 && o <= 1.0));
}

TEST_CASE("samples are denser near the light") {
    const auto scene = make_scene(testing::floor_grid(3.0, 6, 0.0));
    const auto report = estimate_lighting(TriangleMesh{}, scene, {Vec3(0, 2.0, 0), 1.0});
    std::size_t near = 0, far = 0;
    for (const auto& s : report.samples) {
        const double d = std::hypot(s.point.x(), s.point.z());
        if (d < 1.0) ++near;
        if (d > 2.0) ++far;
    }
    // Inside r < 1 and outside r > 2 of the 6 m square.
    const double near_area = std::numbers::pi;
    const double far_area = 36.0 - 4.0 * std::numbers::pi;
    // Edge limits 2 cm and 10 cm give at least a 25x density ratio, minus slack
    // for bisection overshoot.
    CHECK(near / near_area > 10.0 * (far / far_area));
    CHECK(near > near_area / (0.02 * 0.02));
}

TEST_CASE("lighting errors") {
    const auto scene = make_scene(testing::floor_grid(1.0, 2, 0.0));
    try {
        estimate_lighting(TriangleMesh{}, EnvironmentScene{}, {Vec3(0, 1, 0), 1.0});
        FAIL("expected EmptyScene");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyScene);
    }
    const auto box = make_box(Vec3(-0.2, 0.5, -0.2), Vec3(0.2, 0.9, 0.2));
    try {
        estimate_lighting(box, scene, {Vec3(0, 0.7, 0), 1.0});
        FAIL("expected LightInsideMesh");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LightInsideMesh);
    }
    CHECK_FALSE(point_inside_mesh(Bvh(box), Vec3(0, 1.2, 0)));
    CHECK(point_inside_mesh(Bvh(box), Vec3(0.1, 0.6, -0.1)));
}

TEST_CASE("PGM export") {
    ShadowRaster r;
    r.size = 2;
    r.cell = 0.5;
    r.occlusion = {0.0, 1.0, 0.5, 0.25};
    r.floor = {1, 1, 1, 1};
    const std::string pgm = export_pgm(r);
    const std::string header = "P5\n2 2\n255\n";
    REQUIRE(pgm.size() == header.size() + 4);
    CHECK(pgm.substr(0, header.size()) == header);
    const auto* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
    CHECK(px[0] == 255);
    CHECK(px[1] == 0);
    CHECK(std::abs(int(px[2]) - 128) <= 1);
    CHECK(std::abs(int(px[3]) - 191) <= 1);
}

TEST_CASE("lighting is deterministic across thread counts") {
    const auto scene = make_scene(testing::floor_grid(2.0, 8, 0.0));
    LightingOptions one;
    one.threads = 1;
    LightingOptions many;
    many.threads = 7;
    const auto a = estimate_lighting(testing::disc(0.1, 1.0), scene, {Vec3(0, 2, 0), 1.0}, one);
    const auto b = estimate_lighting(testing::disc(0.1, 1.0), scene, {Vec3(0, 2, 0), 1.0}, many);
    CHECK(a.shadow_coverage == b.shadow_coverage);
    CHECK(a.raster.occlusion == b.raster.occlusion);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].illuminance == b.samples[i].illuminance);
}
