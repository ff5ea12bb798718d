#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "meshrecon/io_util.hpp"
#include "meshrecon/mesh.hpp"

namespace meshrecon {

struct VoxelGrid {
    std::size_t resolution = 0;  // voxels per axis
    Vec3 origin{0, 0, 0};
    double voxel_size = 0.0;
    std::vector<std::uint8_t> occupancy;  // resolution^3, x-fastest

    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
        return x + resolution * (y + resolution * z);
    }
    bool occupied(std::size_t x, std::size_t y, std::size_t z) const {
        return occupancy[index(x, y, z)] != 0;
    }
    Vec3 voxel_center(std::size_t x, std::size_t y, std::size_t z) const {
        return origin + Vec3{(static_cast<double>(x) + 0.5) * voxel_size,
                             (static_cast<double>(y) + 0.5) * voxel_size,
                             (static_cast<double>(z) + 0.5) * voxel_size};
    }
    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (auto v : occupancy) n += v != 0;
        return n;
    }
};

namespace detail {

inline bool axis_test(double a, double b, double c, double d, double rad) {
    double mn = std::min(std::min(a, b), std::min(c, d));
    double mx = std::max(std::max(a, b), std::max(c, d));
    return mn <= rad && mx >= -rad;
}

/// Triangle vs axis-aligned box overlap (separating axis test, Akenine-
/// Moller). Touching counts as overlap.
inline bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& ta,
                                 const Vec3& tb, const Vec3& tc) {
    Vec3 v0 = ta - center, v1 = tb - center, v2 = tc - center;
    // box face normals
    for (int a = 0; a < 3; ++a) {
        double mn = std::min({v0[a], v1[a], v2[a]});
        double mx = std::max({v0[a], v1[a], v2[a]});
        if (mn > half[a] || mx < -half[a]) return false;
    }
    // 9 edge cross-product axes
    Vec3 e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;
    const Vec3 edges[3] = {e0, e1, e2};
    const Vec3 verts[3] = {v0, v1, v2};
    for (int i = 0; i < 3; ++i) {
        const Vec3& e = edges[i];
        // axis = cross(unit_x, e), cross(unit_y, e), cross(unit_z, e)
        const Vec3 axes[3] = {{0.0, -e.z, e.y}, {e.z, 0.0, -e.x}, {-e.y, e.x, 0.0}};
        for (int k = 0; k < 3; ++k) {
            const Vec3& ax = axes[k];
            double p0 = dot(ax, verts[0]);
            double p1 = dot(ax, verts[1]);
            double p2 = dot(ax, verts[2]);
            double rad = half.x * std::abs(ax.x) + half.y * std::abs(ax.y) +
                         half.z * std::abs(ax.z);
            double mn = std::min({p0, p1, p2});
            double mx = std::max({p0, p1, p2});
            if (mn > rad || mx < -rad) return false;
        }
    }
    // triangle plane
    Vec3 n = cross(e0, e1);
    double d = dot(n, v0);
    double rad = half.x * std::abs(n.x) + half.y * std::abs(n.y) + half.z * std::abs(n.z);
    return std::abs(d) <= rad;
}

}  // namespace detail

/// Solid voxelization: surface voxels by triangle-box overlap, exterior by
/// 6-connected flood fill from the grid boundary, occupancy = complement of
/// the exterior. Watertight input yields a filled interior.
inline VoxelGrid voxelize(const Mesh& mesh, std::size_t resolution, const Aabb& bounds) {
    if (resolution < 4) throw Error("voxelize: resolution must be >= 4");
    if (mesh.vertices.empty()) throw Error("voxelize: empty mesh");
    Aabb mb = mesh.bounds();
    for (int a = 0; a < 3; ++a)
        if (mb.lo[a] < bounds.lo[a] || mb.hi[a] > bounds.hi[a])
            throw Error("voxelize: mesh exceeds the given bounds");

    VoxelGrid grid;
    grid.resolution = resolution;
    grid.origin = bounds.lo;
    Vec3 ext = bounds.extent();
    grid.voxel_size = std::max({ext.x, ext.y, ext.z}) / static_cast<double>(resolution);
    grid.occupancy.assign(resolution * resolution * resolution, 0);

    const double vs = grid.voxel_size;
    const std::size_t res = resolution;
    std::vector<std::uint8_t> surface(grid.occupancy.size(), 0);
    Vec3 half{vs * 0.5, vs * 0.5, vs * 0.5};

    auto clamp_cell = [&](double t) {
        long long c = static_cast<long long>(std::floor(t));
        if (c < 0) c = 0;
        if (c >= static_cast<long long>(res)) c = static_cast<long long>(res) - 1;
        return static_cast<std::size_t>(c);
    };

    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        Aabb tb;
        tb.expand(a);
        tb.expand(b);
        tb.expand(c);
        std::size_t x0 = clamp_cell((tb.lo.x - grid.origin.x) / vs);
        std::size_t x1 = clamp_cell((tb.hi.x - grid.origin.x) / vs);
        std::size_t y0 = clamp_cell((tb.lo.y - grid.origin.y) / vs);
        std::size_t y1 = clamp_cell((tb.hi.y - grid.origin.y) / vs);
        std::size_t z0 = clamp_cell((tb.lo.z - grid.origin.z) / vs);
        std::size_t z1 = clamp_cell((tb.hi.z - grid.origin.z) / vs);
        for (std::size_t z = z0; z <= z1; ++z)
            for (std::size_t y = y0; y <= y1; ++y)
                for (std::size_t x = x0; x <= x1; ++x) {
                    if (surface[grid.index(x, y, z)]) continue;
                    Vec3 center = grid.voxel_center(x, y, z);
                    if (detail::triangle_box_overlap(center, half, a, b, c))
                        surface[grid.index(x, y, z)] = 1;
                }
    }

    // exterior flood fill from non-surface boundary voxels
    std::vector<std::uint8_t> exterior(grid.occupancy.size(), 0);
    std::vector<std::size_t> queue;
    auto push = [&](std::size_t x, std::size_t y, std::size_t z) {
        std::size_t i = grid.index(x, y, z);
        if (!surface[i] && !exterior[i]) {
            exterior[i] = 1;
            queue.push_back(i);
        }
    };
    for (std::size_t u = 0; u < res; ++u)
        for (std::size_t v = 0; v < res; ++v) {
            push(0, u, v);
            push(res - 1, u, v);
            push(u, 0, v);
            push(u, res - 1, v);
            push(u, v, 0);
            push(u, v, res - 1);
        }
    while (!queue.empty()) {
        std::size_t i = queue.back();
        queue.pop_back();
        std::size_t x = i % res, y = (i / res) % res, z = i / (res * res);
        if (x > 0) push(x - 1, y, z);
        if (x + 1 < res) push(x + 1, y, z);
        if (y > 0) push(x, y - 1, z);
        if (y + 1 < res) push(x, y + 1, z);
        if (z > 0) push(x, y, z - 1);
        if (z + 1 < res) push(x, y, z + 1);
    }
    for (std::size_t i = 0; i < grid.occupancy.size(); ++i) grid.occupancy[i] = exterior[i] ? 0 : 1;
    return grid;
}

/// Cubical box covering both meshes' bounds plus one voxel of margin per
/// side, so two grids voxelized against it align exactly.
inline Aabb shared_voxel_bounds(const Mesh& a, const Mesh& b, std::size_t resolution) {
    Aabb u = a.bounds();
    u.expand(b.bounds());
    Vec3 ext = u.extent();
    double max_ext = std::max({ext.x, ext.y, ext.z});
    if (resolution <= 2) throw Error("shared_voxel_bounds: resolution too small");
    // edge E solves E = max_ext + 2 * (E / resolution)
    double edge = max_ext * static_cast<double>(resolution) / static_cast<double>(resolution - 2);
    Vec3 c = u.center();
    Vec3 h{edge * 0.5, edge * 0.5, edge * 0.5};
    Aabb out;
    out.lo = c - h;
    out.hi = c + h;
    return out;
}

/// ASCII export: header `resolution origin_x origin_y origin_z voxel_size`,
/// then resolution^3 0/1 characters in x-fastest order.
inline void save_voxels(const VoxelGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_voxels: cannot open " + path + " for writing");
    out << grid.resolution << ' ' << detail::format_double(grid.origin.x) << ' '
        << detail::format_double(grid.origin.y) << ' ' << detail::format_double(grid.origin.z)
        << ' ' << detail::format_double(grid.voxel_size) << '\n';
    for (std::size_t i = 0; i < grid.occupancy.size(); ++i)
        out.put(grid.occupancy[i] ? '1' : '0');
    out.put('\n');
    if (!out) throw Error("save_voxels: write failure on " + path);
}

inline VoxelGrid load_voxels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_voxels: cannot open " + path);
    VoxelGrid grid;
    in >> grid.resolution >> grid.origin.x >> grid.origin.y >> grid.origin.z >> grid.voxel_size;
    if (!in) throw Error("load_voxels: malformed header in " + path);
    std::size_t n = grid.resolution * grid.resolution * grid.resolution;
    grid.occupancy.reserve(n);
    char ch;
    while (grid.occupancy.size() < n && in.get(ch)) {
        if (ch == '0' || ch == '1') grid.occupancy.push_back(ch == '1' ? 1 : 0);
    }
    if (grid.occupancy.size() != n) throw Error("load_voxels: truncated occupancy in " + path);
    return grid;
}

}  // namespace meshrecon
