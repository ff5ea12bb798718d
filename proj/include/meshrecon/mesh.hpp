#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "meshrecon/core.hpp"

namespace meshrecon {

/// Triangle mesh: vertex positions plus vertex-index triples. The unit of
/// all geometry in this library.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::size_t, 3>> faces;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }

    Aabb bounds() const {
        Aabb box;
        for (const Vec3& v : vertices) box.expand(v);
        return box;
    }
};

/// Throws Error if a face indexes past the vertex array or repeats a vertex.
inline void validate_mesh(const Mesh& mesh) {
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            if (face[k] >= mesh.vertices.size())
                throw Error("mesh: face " + std::to_string(f) + " references vertex " +
                            std::to_string(face[k]) + " but mesh has " +
                            std::to_string(mesh.vertices.size()) + " vertices");
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
            throw Error("mesh: face " + std::to_string(f) + " repeats a vertex index");
    }
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

inline double face_area(const Mesh& mesh, std::size_t f) {
    const auto& face = mesh.faces[f];
    return triangle_area(mesh.vertices[face[0]], mesh.vertices[face[1]],
                         mesh.vertices[face[2]]);
}

/// Center the bounding box at the origin and scale so its diagonal has
/// length 1. Returns the transformed mesh and the transform itself so the
/// identical mapping can be applied to a paired mesh.
inline std::pair<Mesh, SimilarityTransform> normalize_mesh(const Mesh& mesh) {
    if (mesh.vertices.empty()) throw Error("normalize_mesh: empty mesh");
    Aabb box = mesh.bounds();
    double diag = box.diagonal();
    if (diag <= 0.0) throw Error("normalize_mesh: degenerate mesh (zero bounding-box diagonal)");
    SimilarityTransform t;
    t.offset = -box.center();
    t.scale = 1.0 / diag;
    Mesh out = mesh;
    for (Vec3& v : out.vertices) v = t.apply(v);
    return {std::move(out), t};
}

inline Mesh transform_mesh(const Mesh& mesh, const SimilarityTransform& t) {
    Mesh out = mesh;
    for (Vec3& v : out.vertices) v = t.apply(v);
    return out;
}

/// Axis-aligned box mesh (12 triangles).
inline Mesh make_box(const Vec3& lo, const Vec3& hi) {
    Mesh m;
    m.vertices = {
        {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
        {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
    m.faces = {{0, 2, 1}, {0, 3, 2},   // z = lo
               {4, 5, 6}, {4, 6, 7},   // z = hi
               {0, 1, 5}, {0, 5, 4},   // y = lo
               {3, 6, 2}, {3, 7, 6},   // y = hi
               {0, 7, 3}, {0, 4, 7},   // x = lo
               {1, 2, 6}, {1, 6, 5}};  // x = hi
    return m;
}

inline Mesh make_unit_cube() { return make_box({0, 0, 0}, {1, 1, 1}); }

/// Latitude/longitude sphere. Mirror-symmetric in x for even `slices`.
inline Mesh make_uv_sphere(const Vec3& center, double radius, int stacks = 12, int slices = 16) {
    Mesh m;
    m.vertices.push_back(center + Vec3{0, 0, radius});
    for (int i = 1; i < stacks; ++i) {
        double phi = 3.14159265358979323846 * static_cast<double>(i) / stacks;
        for (int j = 0; j < slices; ++j) {
            double theta = 2.0 * 3.14159265358979323846 * static_cast<double>(j) / slices;
            m.vertices.push_back(center + Vec3{radius * std::sin(phi) * std::cos(theta),
                                               radius * std::sin(phi) * std::sin(theta),
                                               radius * std::cos(phi)});
        }
    }
    m.vertices.push_back(center + Vec3{0, 0, -radius});
    std::size_t south = m.vertices.size() - 1;
    auto ring = [&](int i, int j) -> std::size_t {
        return 1 + static_cast<std::size_t>(i - 1) * slices + static_cast<std::size_t>(j % slices);
    };
    for (int j = 0; j < slices; ++j) m.faces.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i + 1 < stacks; ++i) {
        for (int j = 0; j < slices; ++j) {
            std::size_t a = ring(i, j), b = ring(i, j + 1);
            std::size_t c = ring(i + 1, j), d = ring(i + 1, j + 1);
            m.faces.push_back({a, c, d});
            m.faces.push_back({a, d, b});
        }
    }
    for (int j = 0; j < slices; ++j)
        m.faces.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
    return m;
}

}  // namespace meshrecon
