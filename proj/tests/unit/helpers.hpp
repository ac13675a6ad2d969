#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "insitu/environment.hpp"
#include "insitu/mesh.hpp"

namespace testing {

using insitu::TriangleMesh;
using insitu::Vec3;

/// Flat quad at height y spanning [-half, half] in x and z, facing up.
inline TriangleMesh floor_quad(double half, double y = 0.0) {
    TriangleMesh m;
    m.vertices = {{-half, y, -half}, {half, y, -half}, {half, y, half}, {-half, y, half}};
    m.triangles = {{0, 2, 1}, {0, 3, 2}};
    return m;
}

/// Floor quad split into an n x n grid (2 n^2 triangles).
inline TriangleMesh floor_grid(double half, int n, double y = 0.0) {
    TriangleMesh m;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            m.vertices.emplace_back(-half + 2 * half * j / n, y, -half + 2 * half * i / n);
        }
    }
    const auto id = [n](int i, int j) { return static_cast<std::uint32_t>(i * (n + 1) + j); };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        }
    }
    return m;
}

/// Flat disc of the given radius at height y, one fan of n triangles.
inline TriangleMesh disc(double radius, double y, int n = 128) {
    TriangleMesh m;
    m.vertices.emplace_back(0.0, y, 0.0);
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n;
        m.vertices.emplace_back(radius * std::cos(a), y, radius * std::sin(a));
    }
    for (int k = 0; k < n; ++k) {
        m.triangles.push_back({0, static_cast<std::uint32_t>(1 + (k + 1) % n), static_cast<std::uint32_t>(1 + k)});
    }
    return m;
}

inline std::string obj_text(const TriangleMesh& m) { return insitu::export_obj(m); }

/// Uniform double in [lo, hi).
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testing
