#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <set>

#include "helpers.hpp"
#include "insitu/bvh.hpp"
#include "insitu/hull.hpp"

using namespace insitu;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return Vec3(g(rng), g(rng), g(rng)).normalized();
}

/// Random triangle soup in the unit cube with a few large triangles mixed in.
TriangleMesh soup(std::mt19937_64& rng, int n) {
    TriangleMesh m;
    for (int i = 0; i < n; ++i) {
        const Vec3 c(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1));
        const double size = i % 50 == 0 ? 1.0 : 0.15;
        const auto base = static_cast<std::uint32_t>(m.vertices.size());
        for (int k = 0; k < 3; ++k) m.vertices.push_back(c + size * random_unit(rng));
        m.triangles.push_back({base, base + 1, base + 2});
    }
    return m;
}

}  // namespace

TEST_CASE("BVH agrees with brute force on random rays") {
    std::mt19937_64 rng(31);
    const auto mesh = soup(rng, 1000);
    const Bvh bvh(mesh);
    CHECK(bvh.triangle_count() == 1000);
    int hits = 0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 origin = 2.0 * Vec3(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1),
                                       testing::uniform(rng, -1, 1));
        const Vec3 dir = i % 4 == 0 ? (Vec3(testing::uniform(rng, -0.5, 0.5), 0, 0) - origin).normalized()
                                    : random_unit(rng);
        const double max_t = i % 3 == 0 ? testing::uniform(rng, 0.1, 2.0) : 100.0;
        const auto a = bvh.raycast(origin, dir, max_t);
        const auto b = bvh.brute_force(origin, dir, max_t);
        REQUIRE(a.has_value() == b.has_value());
        CHECK(bvh.occluded(origin, dir, max_t) == b.has_value());
        if (!a) continue;
        ++hits;
        CHECK(a->triangle == b->triangle);
        CHECK(a->t == b->t);
    }
    CHECK(hits > 2000);
}

TEST_CASE("watertight intersection agrees with the Moller-Trumbore reference") {
    std::mt19937_64 rng(32);
    int compared = 0;
    for (int i = 0; i < 20000; ++i) {
        const Vec3 a = random_unit(rng), b = random_unit(rng), c = random_unit(rng);
        const Vec3 origin = 3.0 * random_unit(rng);
        // Aim at a random interior point so most rays hit.
        const double u = testing::uniform(rng, -0.1, 1), v = testing::uniform(rng, -0.1, 1);
        const Vec3 dir = (a + u * (b - a) + v * (c - a) - origin).normalized();
        const auto w = intersect_triangle(origin, dir, a, b, c);
        const auto m = intersect_triangle_mt(origin, dir, a, b, c);
        if (w && m) {
            CHECK(std::abs(*w - *m) <= 1e-9 * std::max(1.0, *m));
            ++compared;
        }
    }
    CHECK(compared > 5000);
}

TEST_CASE("rays through shared edges and vertices do not leak") {
    // Closed fan around a vertex: a ray through the apex or any shared edge
    // must hit one of the triangles.
    TriangleMesh fan;
    fan.vertices.emplace_back(0, 0, 0);
    const int n = 7;
    for (int k = 0; k < n; ++k) {
        const double a = 2 * std::numbers::pi * k / n;
        fan.vertices.emplace_back(std::cos(a), 0, std::sin(a));
    }
    for (int k = 0; k < n; ++k) {
        fan.triangles.push_back({0, static_cast<std::uint32_t>(1 + k), static_cast<std::uint32_t>(1 + (k + 1) % n)});
    }
    const Bvh bvh(fan);
    std::mt19937_64 rng(33);
    for (int k = 0; k < n; ++k) {
        for (double s : {0.0, 0.1, 0.37, 0.5, 0.93}) {
            const Vec3 target = s * fan.vertices[1 + k];
            const Vec3 origin = target + Vec3(testing::uniform(rng, -0.3, 0.3), 1.0, testing::uniform(rng, -0.3, 0.3));
            const auto hit = bvh.raycast(origin, (target - origin).normalized(), 10.0);
            CHECK(hit.has_value());
        }
    }
}

TEST_CASE("BVH structure") {
    std::mt19937_64 rng(34);
    for (int n : {1, 3, 4, 5, 17, 256, 999}) {
        const auto mesh = soup(rng, n);
        const Bvh bvh(mesh);
        auto ids = bvh.leaf_triangles();
        CHECK(ids.size() == static_cast<std::size_t>(n));
        std::sort(ids.begin(), ids.end());
        CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
        CHECK(ids.back() == static_cast<std::uint32_t>(n - 1));
        // A binary tree with leaves of at most four triangles.
        CHECK(bvh.node_count() >= 2 * ((n + 3) / 4) - 1);
    }
    const Bvh empty;
    CHECK(empty.empty());
    CHECK_FALSE(empty.raycast(Vec3::Zero(), kUp, 1.0).has_value());
}

TEST_CASE("2D convex hull") {
    std::mt19937_64 rng(35);
    for (int i = 0; i < 200; ++i) {
        std::vector<Vec2> pts;
        const int n = 3 + static_cast<int>(rng() % 60);
        for (int k = 0; k < n; ++k) pts.emplace_back(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1));
        const auto hull = convex_hull_2d(pts);
        REQUIRE(hull.size() >= 3);
        for (std::size_t k = 0; k < hull.size(); ++k) {
            const Vec2 a = hull[k], b = hull[(k + 1) % hull.size()], c = hull[(k + 2) % hull.size()];
            const Vec2 ab = b - a, bc = c - b;
            CHECK(ab.x() * bc.y() - ab.y() * bc.x() > 0.0);
        }
        for (const auto& p : pts) CHECK(signed_distance_to_polygon(hull, p) >= -1e-12);
    }
    // Collinear points are dropped.
    const auto square = convex_hull_2d({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0, 0.5}});
    CHECK(square.size() == 4);
    CHECK(signed_distance_to_polygon(square, Vec2(0.5, 0.5)) == doctest::Approx(0.5));
    CHECK(signed_distance_to_polygon(square, Vec2(0.2, 0.5)) == doctest::Approx(0.2));
    CHECK(signed_distance_to_polygon(square, Vec2(2, 0.5)) == doctest::Approx(-1.0));
    CHECK(signed_distance_to_polygon(square, Vec2(2, 2)) == doctest::Approx(-std::sqrt(2.0)));
    CHECK(point_in_polygon(square, Vec2(0.5, 0.5)));
    CHECK_FALSE(point_in_polygon(square, Vec2(1.01, 0.5)));
    CHECK(point_in_polygon(square, Vec2(1.01, 0.5), 0.02));
    // Degenerate inputs have no inside.
    const auto segment = convex_hull_2d({{0, 0}, {1, 0}, {0.5, 0}});
    CHECK(segment.size() == 2);
    CHECK(signed_distance_to_polygon(segment, Vec2(0.5, 0.0)) <= 0.0);
    CHECK(signed_distance_to_polygon(segment, Vec2(0.5, 0.3)) == doctest::Approx(-0.3));
    CHECK(signed_distance_to_polygon({Vec2(1, 1)}, Vec2(1, 2)) == doctest::Approx(-1.0));
}

TEST_CASE("3D convex hull") {
    std::mt19937_64 rng(36);
    for (int i = 0; i < 30; ++i) {
        std::vector<Vec3> pts;
        for (int k = 0; k < 300; ++k) pts.push_back(testing::uniform(rng, 0.1, 1.0) * random_unit(rng));
        const auto hull = convex_hull_3d(pts);
        REQUIRE_FALSE(hull.flat);
        REQUIRE(is_watertight(hull.mesh, 0, hull.mesh.triangles.size()));
        // Every input point is on the inner side of every hull face.
        for (std::size_t t = 0; t < hull.mesh.triangles.size(); ++t) {
            const Vec3 n = triangle_normal(hull.mesh, t);
            const Vec3& a = hull.mesh.vertices[hull.mesh.triangles[t][0]];
            for (const auto& p : pts) CHECK(n.dot(p - a) <= 1e-9);
        }
    }
    // Points of a box: the hull is the box.
    std::vector<Vec3> box_pts;
    for (int x = 0; x <= 4; ++x) {
        for (int y = 0; y <= 4; ++y) {
            for (int z = 0; z <= 4; ++z) box_pts.emplace_back(0.5 * x, 0.25 * y, 0.1 * z);
        }
    }
    const auto box = convex_hull_3d(box_pts);
    CHECK(box.vertices.size() == 8);
    CHECK(mass_properties(box.mesh).volume == doctest::Approx(2.0 * 1.0 * 0.4).epsilon(1e-12));
    // Coplanar input.
    const auto flat = convex_hull_3d({{0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {1, 0, 1}, {0.5, 0, 0.5}});
    CHECK(flat.flat);
}
