#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "placeopt/errors.hpp"
#include "placeopt/linalg.hpp"

namespace placeopt {

/// Vertex bearings of the regular n-gon; an equally-weighted tight set in
/// the plane for every n >= 3.
inline std::vector<Vec<2>> regular_polygon_bearings(int n) {
    if (n < 3) throw contract_error("regular polygon needs n >= 3 vertices");
    std::vector<Vec<2>> g;
    g.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * i / n;
        g.push_back(Vec<2>{{std::cos(th), std::sin(th)}});
    }
    return g;
}

enum class PlatonicSolid { Tetrahedron, Octahedron, Hexahedron, Icosahedron, Dodecahedron };

constexpr int platonic_vertex_count(PlatonicSolid s) {
    switch (s) {
        case PlatonicSolid::Tetrahedron: return 4;
        case PlatonicSolid::Octahedron: return 6;
        case PlatonicSolid::Hexahedron: return 8;
        case PlatonicSolid::Icosahedron: return 12;
        case PlatonicSolid::Dodecahedron: return 20;
    }
    return 0;
}

/// Unit vertex bearings of a Platonic solid centered at the origin; each is
/// an equally-weighted tight set in three dimensions.
inline std::vector<Vec<3>> platonic_bearings(PlatonicSolid s) {
    std::vector<Vec<3>> g;
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    switch (s) {
        case PlatonicSolid::Tetrahedron: {
            const double k = 1.0 / std::sqrt(3.0);
            g = {Vec<3>{{k, k, k}}, Vec<3>{{k, -k, -k}}, Vec<3>{{-k, k, -k}}, Vec<3>{{-k, -k, k}}};
            break;
        }
        case PlatonicSolid::Octahedron: {
            for (int axis = 0; axis < 3; ++axis)
                for (int sign : {1, -1}) {
                    Vec<3> v;
                    v[axis] = sign;
                    g.push_back(v);
                }
            break;
        }
        case PlatonicSolid::Hexahedron: {
            const double k = 1.0 / std::sqrt(3.0);
            for (int sx : {1, -1})
                for (int sy : {1, -1})
                    for (int sz : {1, -1}) g.push_back(Vec<3>{{sx * k, sy * k, sz * k}});
            break;
        }
        case PlatonicSolid::Icosahedron: {
            const double norm = std::sqrt(1.0 + phi * phi);
            const double a = 1.0 / norm, b = phi / norm;
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) {
                    g.push_back(Vec<3>{{0.0, s1 * a, s2 * b}});
                    g.push_back(Vec<3>{{s1 * a, s2 * b, 0.0}});
                    g.push_back(Vec<3>{{s2 * b, 0.0, s1 * a}});
                }
            break;
        }
        case PlatonicSolid::Dodecahedron: {
            const double k = 1.0 / std::sqrt(3.0);
            for (int sx : {1, -1})
                for (int sy : {1, -1})
                    for (int sz : {1, -1}) g.push_back(Vec<3>{{sx * k, sy * k, sz * k}});
            const double a = (1.0 / phi) / std::sqrt(3.0), b = phi / std::sqrt(3.0);
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) {
                    g.push_back(Vec<3>{{0.0, s1 * a, s2 * b}});
                    g.push_back(Vec<3>{{s1 * a, s2 * b, 0.0}});
                    g.push_back(Vec<3>{{s2 * b, 0.0, s1 * a}});
                }
            break;
        }
    }
    return g;
}

}  // namespace placeopt
