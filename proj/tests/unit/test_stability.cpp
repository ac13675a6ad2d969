#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "insitu/catalog.hpp"
#include "insitu/editor.hpp"
#include "insitu/generators.hpp"
#include "insitu/stability.hpp"

using namespace insitu;

namespace {

TriangleMesh cylinder(double r, double h, int n = 64) {
    TriangleMesh m;
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n;
        m.vertices.emplace_back(r * std::cos(a), 0.0, r * std::sin(a));
        m.vertices.emplace_back(r * std::cos(a), h, r * std::sin(a));
    }
    const auto bottom = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.emplace_back(0.0, 0.0, 0.0);
    m.vertices.emplace_back(0.0, h, 0.0);
    for (int k = 0; k < n; ++k) {
        const auto a0 = static_cast<std::uint32_t>(2 * k);
        const auto a1 = static_cast<std::uint32_t>(2 * ((k + 1) % n));
        m.triangles.push_back({a0, a0 + 1, a1 + 1});
        m.triangles.push_back({a0, a1 + 1, a1});
        m.triangles.push_back({bottom, a0, a1});
        m.triangles.push_back({bottom + 1, a1 + 1, a0 + 1});
    }
    return m;
}

double tilt_of(const RigidTransform& pose) {
    const Vec3 up = pose.rotation * kUp;
    return std::acos(std::clamp(up.dot(kUp), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

}  // namespace

TEST_CASE("upright box settles with the eroded half-width as margin") {
    const auto box = make_box(Vec3(-0.2, 0.0, -0.2), Vec3(0.2, 0.5, 0.2));
    const auto plane = horizontal_plane(0.0);
    const auto r = estimate_stability(box, plane);
    CHECK_FALSE(r.toppled);
    CHECK(r.settled);
    CHECK(r.tilt_deg < 1.0);
    CHECK(r.quasi_static_margin == doctest::Approx(0.195).epsilon(1e-6));
    CHECK(r.contact_points.size() >= 4);
    for (const auto& c : r.contact_points) CHECK(std::abs(c.y()) < 2e-3);
    // The final pose rests on the plane rather than floating above it.
    const Vec3 lowest = r.settled_pose.apply(Vec3(-0.2, 0.0, -0.2));
    CHECK(std::abs(lowest.y()) < 2e-3);
}

TEST_CASE("quasi-static margins of simple solids") {
    const auto plane = horizontal_plane(0.0);
    SUBCASE("cube resting flat") {
        const auto cube = make_box(Vec3(-0.1, 0.3, -0.1), Vec3(0.1, 0.5, 0.1));
        CHECK(quasi_static_stability(cube, plane) == doctest::Approx(0.1 - 0.005).epsilon(1e-9));
    }
    SUBCASE("upright cylinder") {
        // Inscribed circle of a 256-gon: r cos(pi / 256).
        const auto cyl = cylinder(0.05, 0.3, 256);
        const double inscribed = 0.05 * std::cos(std::numbers::pi / 256);
        CHECK(quasi_static_stability(cyl, plane) == doctest::Approx(inscribed - 0.005).epsilon(1e-6));
        CHECK(quasi_static_stability(cyl, plane) == doctest::Approx(0.045).epsilon(1e-3));
    }
    SUBCASE("centre of mass over a support vertex") {
        // Tetrahedron (0,0,0) (a,0,0) (0,0,a) (-a,h,-a): its COM is the
        // vertex average (0, h/4, 0), straight above the base corner.
        const double a = 0.2;
        TriangleMesh t;
        t.vertices = {{0, 0, 0}, {a, 0, 0}, {0, 0, a}, {-a, 0.3, -a}};
        t.triangles = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
        const auto q = quasi_static_analysis(t, plane);
        CHECK(q.com.norm() < 1e-12);
        CHECK(q.margin == doctest::Approx(-0.005).epsilon(1e-9));
    }
    SUBCASE("off-centre COM shrinks the margin") {
        TriangleMesh l = make_box(Vec3(0, 0, 0), Vec3(0.4, 0.05, 0.1), "base");
        l.append(make_box(Vec3(0.3, 0.05, 0), Vec3(0.4, 0.6, 0.1)), "post");
        // Volumes 0.002 and 0.0055; COM x = (0.002*0.2 + 0.0055*0.35) / 0.0075.
        const double com_x = (0.002 * 0.2 + 0.0055 * 0.35) / 0.0075;
        const double expected = std::min({0.4 - com_x, com_x, 0.05}) - 0.005;
        CHECK(quasi_static_stability(l, plane) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("thin column released with a 5 degree tilt topples") {
    const auto column = make_box(Vec3(-0.01, 0.0, -0.01), Vec3(0.01, 0.5, 0.01));
    const auto plane = horizontal_plane(0.0);
    StabilityOptions opts;
    opts.release_tilt_deg = 5.0;
    const auto r = estimate_stability(column, plane, opts);
    CHECK(r.toppled);
    CHECK(r.tilt_deg > 45.0);
    CHECK(r.quasi_static_margin < 0.0);

    // Below the critical angle atan(0.01 / 0.25) the column rights itself.
    opts.release_tilt_deg = 1.0;
    const auto upright = estimate_stability(column, plane, opts);
    CHECK_FALSE(upright.toppled);
    CHECK(upright.quasi_static_margin > 0.0);
}

TEST_CASE("quasi-static pivot margin matches the tilted-column geometry") {
    const auto column = make_box(Vec3(-0.01, 0.0, -0.01), Vec3(0.01, 0.5, 0.01));
    const auto plane = horizontal_plane(0.0);
    for (double deg : {1.0, 2.0, 3.0, 5.0, 10.0}) {
        StabilityOptions opts;
        opts.release_tilt_deg = deg;
        const double t = deg * std::numbers::pi / 180.0;
        // Rotating about +z leans the top towards -x. The pivot edge sits at
        // (-0.01, -0.25) from the COM before rotation.
        const double pivot_margin = 0.01 * std::cos(t) - 0.25 * std::sin(t);
        // While the raised edge stays inside the contact band the whole
        // footprint supports the column and the erosion applies. A column
        // leaning past its edge reports the eroded distance to that edge.
        const bool flat = 0.02 * std::sin(t) <= 0.001;
        const double expected = (flat || pivot_margin < 0.0) ? pivot_margin - 0.005
                                                              : std::min(pivot_margin, 0.01 - 0.005);
        CHECK_MESSAGE(quasi_static_stability(column, plane, opts) == doctest::Approx(expected).epsilon(1e-9),
                      "tilt " << deg);
    }
}

TEST_CASE("drops are deterministic") {
    const auto box = make_box(Vec3(-0.05, 0.0, -0.08), Vec3(0.05, 0.3, 0.08));
    StabilityOptions opts;
    opts.release_tilt_deg = 7.0;
    opts.release_tilt_axis = Vec3(1, 0, 1).normalized();
    const auto a = estimate_stability(box, horizontal_plane(0.0), opts);
    const auto b = estimate_stability(box, horizontal_plane(0.0), opts);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].time == b.trace[i].time);
        CHECK(a.trace[i].pose.rotation.coeffs() == b.trace[i].pose.rotation.coeffs());
        CHECK(a.trace[i].pose.translation == b.trace[i].pose.translation);
    }
    CHECK(a.toppled == b.toppled);
    CHECK(a.quasi_static_margin == b.quasi_static_margin);
}

TEST_CASE("report invariants") {
    std::mt19937_64 rng(3);
    const auto plane = horizontal_plane(0.1);
    for (int i = 0; i < 12; ++i) {
        const double w = testing::uniform(rng, 0.02, 0.3);
        const double h = testing::uniform(rng, 0.05, 0.6);
        const double d = testing::uniform(rng, 0.02, 0.3);
        const auto box = make_box(Vec3(-w / 2, 0.1, -d / 2), Vec3(w / 2, 0.1 + h, d / 2));
        StabilityOptions opts;
        opts.release_tilt_deg = testing::uniform(rng, 0.0, 30.0);
        const auto r = estimate_stability(box, plane, opts);
        CHECK(r.toppled == (!r.settled || r.tilt_deg > 45.0));
        CHECK(r.tilt_deg == doctest::Approx(tilt_of(r.settled_pose)).epsilon(1e-9));
        REQUIRE_FALSE(r.trace.empty());
        CHECK(r.trace.front().time == 0.0);
        for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k].time > r.trace[k - 1].time);
    }
}

TEST_CASE("stability errors") {
    CHECK_THROWS_AS(estimate_stability(TriangleMesh{}, horizontal_plane(0.0)), Error);
    try {
        estimate_stability(TriangleMesh{}, horizontal_plane(0.0));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyMesh);
    }
    // A scene with only a wall offers nothing to stand on.
    TriangleMesh wall;
    wall.vertices = {{-1, 0, 1}, {1, 0, 1}, {1, 2, 1}, {-1, 2, 1}};
    wall.triangles = {{0, 1, 2}, {0, 2, 3}};
    const auto scene = make_scene(testing::floor_grid(1.0, 1, 0.0));
    const auto wall_scene = make_scene(wall);
    const auto box = make_box(Vec3(-0.1, 0.0, -0.1), Vec3(0.1, 0.2, 0.1));
    try {
        estimate_stability(box, wall_scene);
        FAIL("expected NoSupportPlane");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoSupportPlane);
    }
    CHECK_FALSE(estimate_stability(box, scene).toppled);
}

TEST_CASE("tulip lampshade topples on a narrow foot and stands once widened") {
    const Design& tulip = builtin_design("lampshade_tulip");
    const auto plane = horizontal_plane(0.0);
    StabilityOptions opts;
    opts.release_tilt_deg = 5.0;

    const auto narrow = default_configuration(tulip);
    const auto before = estimate_stability(generate_mesh(tulip, narrow), plane, opts);
    CHECK(before.toppled);
    CHECK(before.quasi_static_margin < 0.0);

    const auto widened = set_parameter(tulip, narrow, "base_diameter", 0.20, EditMode::commit);
    REQUIRE(widened.status == EditStatus::committed);
    const auto after = estimate_stability(generate_mesh(tulip, widened.config), plane, opts);
    CHECK_FALSE(after.toppled);
    CHECK(after.quasi_static_margin > 0.0);
}
