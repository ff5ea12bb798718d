#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "meshrecon/mesh.hpp"

namespace meshrecon {

/// Number of reduced displacement rows for the default 4x4x4 lattice.
inline constexpr std::size_t kDefaultReducedPoints = 32;

struct GridDims {
    std::size_t x = 4, y = 4, z = 4;

    std::size_t count() const { return x * y * z; }
    std::size_t operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }
    bool operator==(const GridDims&) const = default;
};

/// Trivariate Bernstein control lattice. Control points are stored in world
/// space in lattice order (x-fastest).
struct FfdGrid {
    GridDims dims;
    Vec3 origin{0, 0, 0};
    std::array<Vec3, 3> axes{};  // orthogonal edge vectors spanning the box
    std::vector<Vec3> control_points;

    std::size_t control_index(std::size_t i, std::size_t j, std::size_t k) const {
        return i + dims.x * (j + dims.y * k);
    }
    std::array<std::size_t, 3> lattice_coords(std::size_t index) const {
        return {index % dims.x, (index / dims.x) % dims.y, index / (dims.x * dims.y)};
    }
};

/// Row i holds the Bernstein weights of vertex i over all control points.
struct DeformationMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> entries;  // row-major
    std::size_t out_of_box_vertices = 0;  // vertices with a local coord outside [0,1]

    double at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

/// Expansion from the reduced control-point set to the full lattice: each
/// reduced point owns an identity slot and a mirror slot whose displacement
/// is flipped on the mirrored axis.
struct SymmetryMap {
    int axis = 0;  // 0 = x, 1 = y, 2 = z
    GridDims dims;
    struct Pair {
        std::size_t reduced;      // reduced row index
        std::size_t full;         // identity slot, sign (+1, +1, +1)
        std::size_t mirror;       // mirror slot
        Vec3 mirror_sign{1, 1, 1};
    };
    std::vector<Pair> pairs;

    std::size_t reduced_count() const { return pairs.size(); }
};

struct ReducedDisplacements {
    std::vector<Vec3> values;  // one per reduced control point, lattice-axis coords

    static ReducedDisplacements zeros(std::size_t n) {
        ReducedDisplacements d;
        d.values.assign(n, Vec3{0, 0, 0});
        return d;
    }
    /// Flat layout: reduced index major, then x, y, z.
    std::vector<double> flat() const {
        std::vector<double> out;
        out.reserve(values.size() * 3);
        for (const Vec3& v : values) {
            out.push_back(v.x);
            out.push_back(v.y);
            out.push_back(v.z);
        }
        return out;
    }
    static ReducedDisplacements from_flat(const std::vector<double>& flat) {
        if (flat.size() % 3 != 0)
            throw Error("ReducedDisplacements: flat size must be a multiple of 3");
        ReducedDisplacements d;
        d.values.resize(flat.size() / 3);
        for (std::size_t i = 0; i < d.values.size(); ++i)
            d.values[i] = {flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
        return d;
    }
};

/// Bernstein basis value C(d,i) t^i (1-t)^(d-i). t outside [0,1] is allowed
/// (extrapolation for vertices marginally outside the lattice box).
inline double bernstein(std::size_t degree, std::size_t index, double t) {
    if (index > degree) throw Error("bernstein: index exceeds degree");
    double binom = 1.0;
    for (std::size_t k = 1; k <= index; ++k)
        binom = binom * static_cast<double>(degree - index + k) / static_cast<double>(k);
    double a = 1.0, b = 1.0;
    for (std::size_t k = 0; k < index; ++k) a *= t;
    for (std::size_t k = 0; k < degree - index; ++k) b *= 1.0 - t;
    return binom * a * b;
}

/// Axis-aligned lattice over the mesh bounding box inflated by `margin` of
/// the box extent per side, with control points at rest positions.
inline FfdGrid build_grid(const Mesh& mesh, const GridDims& dims = {}, double margin = 0.05) {
    if (mesh.vertices.empty()) throw Error("build_grid: empty mesh");
    if (margin < 0.0) throw Error("build_grid: margin must be >= 0");
    if (dims.x < 2 || dims.y < 2 || dims.z < 2)
        throw Error("build_grid: need at least 2 control points per axis");
    Aabb box = mesh.bounds();
    Vec3 ext = box.extent();
    if (ext.x <= 0.0 || ext.y <= 0.0 || ext.z <= 0.0)
        throw Error("build_grid: degenerate bounding box");
    FfdGrid grid;
    grid.dims = dims;
    grid.origin = box.lo - ext * margin;
    Vec3 span = ext * (1.0 + 2.0 * margin);
    grid.axes = {Vec3{span.x, 0, 0}, Vec3{0, span.y, 0}, Vec3{0, 0, span.z}};
    grid.control_points.resize(dims.count());
    for (std::size_t k = 0; k < dims.z; ++k)
        for (std::size_t j = 0; j < dims.y; ++j)
            for (std::size_t i = 0; i < dims.x; ++i) {
                double fx = static_cast<double>(i) / static_cast<double>(dims.x - 1);
                double fy = static_cast<double>(j) / static_cast<double>(dims.y - 1);
                double fz = static_cast<double>(k) / static_cast<double>(dims.z - 1);
                grid.control_points[grid.control_index(i, j, k)] =
                    grid.origin + grid.axes[0] * fx + grid.axes[1] * fy + grid.axes[2] * fz;
            }
    return grid;
}

/// Local lattice coordinates of a point: projection onto the lattice axes,
/// scaled so the box maps to [0,1]^3.
inline Vec3 lattice_coords_of(const FfdGrid& grid, const Vec3& p) {
    Vec3 rel = p - grid.origin;
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
        double len2 = norm2(grid.axes[a]);
        out[a] = dot(rel, grid.axes[a]) / len2;
    }
    return out;
}

inline DeformationMatrix build_deformation_matrix(const Mesh& mesh, const FfdGrid& grid) {
    DeformationMatrix B;
    B.rows = mesh.vertex_count();
    B.cols = grid.dims.count();
    B.entries.assign(B.rows * B.cols, 0.0);
    std::size_t dl = grid.dims.x - 1, dm = grid.dims.y - 1, dn = grid.dims.z - 1;
    std::vector<double> bx(grid.dims.x), by(grid.dims.y), bz(grid.dims.z);
    for (std::size_t r = 0; r < B.rows; ++r) {
        Vec3 stu = lattice_coords_of(grid, mesh.vertices[r]);
        if (stu.x < 0.0 || stu.x > 1.0 || stu.y < 0.0 || stu.y > 1.0 || stu.z < 0.0 ||
            stu.z > 1.0)
            ++B.out_of_box_vertices;
        for (std::size_t i = 0; i <= dl; ++i) bx[i] = bernstein(dl, i, stu.x);
        for (std::size_t j = 0; j <= dm; ++j) by[j] = bernstein(dm, j, stu.y);
        for (std::size_t k = 0; k <= dn; ++k) bz[k] = bernstein(dn, k, stu.z);
        double* row = B.entries.data() + r * B.cols;
        for (std::size_t k = 0; k <= dn; ++k)
            for (std::size_t j = 0; j <= dm; ++j) {
                double w = by[j] * bz[k];
                for (std::size_t i = 0; i <= dl; ++i)
                    row[grid.control_index(i, j, k)] = bx[i] * w;
            }
    }
    return B;
}

/// Reduced set = control points with lattice coordinate < dims[axis]/2 along
/// the mirrored axis, in lattice order. The mirror slot is the reflected
/// lattice position with the displacement sign flipped on that axis.
inline SymmetryMap build_symmetry_map(const GridDims& dims, int axis = 0) {
    if (axis < 0 || axis > 2) throw Error("build_symmetry_map: axis must be 0, 1, or 2");
    if (dims[axis] % 2 != 0)
        throw Error("build_symmetry_map: dims along the mirrored axis must be even");
    SymmetryMap map;
    map.axis = axis;
    map.dims = dims;
    std::size_t half = dims[axis] / 2;
    FfdGrid indexer;
    indexer.dims = dims;
    for (std::size_t k = 0; k < dims.z; ++k)
        for (std::size_t j = 0; j < dims.y; ++j)
            for (std::size_t i = 0; i < dims.x; ++i) {
                std::array<std::size_t, 3> c{i, j, k};
                if (c[axis] >= half) continue;
                std::array<std::size_t, 3> m = c;
                m[axis] = dims[axis] - 1 - c[axis];
                SymmetryMap::Pair pair;
                pair.reduced = map.pairs.size();
                pair.full = indexer.control_index(c[0], c[1], c[2]);
                pair.mirror = indexer.control_index(m[0], m[1], m[2]);
                pair.mirror_sign = Vec3{1, 1, 1};
                pair.mirror_sign[axis] = -1.0;
                map.pairs.push_back(pair);
            }
    return map;
}

/// Expand reduced displacements to one displacement per lattice control
/// point (still in lattice-axis coordinates).
inline std::vector<Vec3> expand_displacements(const SymmetryMap& phi,
                                              const ReducedDisplacements& dp) {
    if (dp.values.size() != phi.reduced_count())
        throw Error("expand_displacements: displacement count does not match symmetry map");
    std::vector<Vec3> full(phi.dims.count(), Vec3{0, 0, 0});
    for (const auto& pair : phi.pairs) {
        const Vec3& d = dp.values[pair.reduced];
        full[pair.full] = d;
        full[pair.mirror] = Vec3{pair.mirror_sign.x * d.x, pair.mirror_sign.y * d.y,
                                 pair.mirror_sign.z * d.z};
    }
    return full;
}

/// Dense matrix view of the expansion for one displacement component:
/// full[j][comp] = sum_r M[j][r] * dp[r][comp]. Test support.
inline std::vector<double> symmetry_matrix_dense(const SymmetryMap& phi, int component) {
    std::size_t m = phi.dims.count(), r = phi.reduced_count();
    std::vector<double> mat(m * r, 0.0);
    for (const auto& pair : phi.pairs) {
        mat[pair.full * r + pair.reduced] = 1.0;
        mat[pair.mirror * r + pair.reduced] = pair.mirror_sign[component];
    }
    return mat;
}

/// Deformed vertex positions: B * (P + dP), with dP the symmetric expansion
/// of the reduced displacements. Faces are unchanged.
inline Mesh apply_ffd(const Mesh& mesh, const FfdGrid& grid, const DeformationMatrix& B,
                      const SymmetryMap& phi, const ReducedDisplacements& dp) {
    if (B.rows != mesh.vertex_count() || B.cols != grid.dims.count())
        throw Error("apply_ffd: deformation matrix does not match mesh/grid");
    if (!(phi.dims == grid.dims))
        throw Error("apply_ffd: symmetry map dims do not match grid");
    std::vector<Vec3> disp = expand_displacements(phi, dp);
    // lattice-axis coords -> world
    std::array<Vec3, 3> unit = {normalized(grid.axes[0]), normalized(grid.axes[1]),
                                normalized(grid.axes[2])};
    std::vector<Vec3> moved(grid.control_points.size());
    for (std::size_t c = 0; c < moved.size(); ++c) {
        Vec3 w = unit[0] * disp[c].x + unit[1] * disp[c].y + unit[2] * disp[c].z;
        moved[c] = grid.control_points[c] + w;
    }
    Mesh out = mesh;
    for (std::size_t r = 0; r < B.rows; ++r) {
        const double* row = B.entries.data() + r * B.cols;
        Vec3 v{0, 0, 0};
        for (std::size_t c = 0; c < B.cols; ++c) v += moved[c] * row[c];
        out.vertices[r] = v;
    }
    return out;
}

}  // namespace meshrecon
