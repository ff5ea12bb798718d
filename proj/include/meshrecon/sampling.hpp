#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "meshrecon/mesh.hpp"
#include "meshrecon/rng.hpp"

namespace meshrecon {

struct SurfaceSamples {
    std::vector<Vec3> points;
    std::uint64_t seed = 0;
};

/// Sample n points uniformly over the surface: faces chosen with probability
/// proportional to area, positions by the square-root barycentric rule.
/// Zero-area faces are skipped (they carry no probability mass).
inline SurfaceSamples sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw Error("sample_surface: n must be >= 1");
    if (mesh.faces.empty()) throw Error("sample_surface: mesh has no faces");

    std::vector<double> cdf(mesh.faces.size());
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        total += face_area(mesh, f);
        cdf[f] = total;
    }
    if (total <= 0.0) throw Error("sample_surface: all faces degenerate");

    SurfaceSamples out;
    out.seed = seed;
    out.points.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        double target = rng.uniform() * total;
        std::size_t f = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
        if (f >= cdf.size()) f = cdf.size() - 1;
        const auto& face = mesh.faces[f];
        const Vec3& a = mesh.vertices[face[0]];
        const Vec3& b = mesh.vertices[face[1]];
        const Vec3& c = mesh.vertices[face[2]];
        double r1 = std::sqrt(rng.uniform());
        double r2 = rng.uniform();
        out.points.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
    }
    return out;
}

}  // namespace meshrecon
