#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "meshrecon/mesh.hpp"

namespace meshrecon {

/// Closest point on triangle (a,b,c) to p; handles vertex, edge, and
/// interior regions (Ericson, Real-Time Collision Detection).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

inline double point_triangle_distance2(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    return norm2(p - closest_point_on_triangle(p, a, b, c));
}

/// Exact distance from p to the nearest point on any face, by scanning all
/// faces.
inline double point_to_mesh_distance(const Vec3& p, const Mesh& mesh) {
    if (mesh.vertices.empty()) throw Error("point_to_mesh_distance: empty mesh");
    double best = std::numeric_limits<double>::infinity();
    if (mesh.faces.empty()) {
        for (const Vec3& v : mesh.vertices) best = std::min(best, norm2(p - v));
        return std::sqrt(best);
    }
    for (const auto& f : mesh.faces)
        best = std::min(best, point_triangle_distance2(p, mesh.vertices[f[0]],
                                                       mesh.vertices[f[1]], mesh.vertices[f[2]]));
    return std::sqrt(best);
}

/// Median-split AABB tree over the faces of one mesh. Gives the same
/// distances as the face scan (exact), just faster for repeated queries.
class MeshDistanceQuery {
public:
    explicit MeshDistanceQuery(const Mesh& mesh) : mesh_(mesh) {
        if (mesh.vertices.empty()) throw Error("MeshDistanceQuery: empty mesh");
        face_order_.resize(mesh.faces.size());
        std::iota(face_order_.begin(), face_order_.end(), std::size_t{0});
        if (!mesh.faces.empty()) root_ = build(0, mesh.faces.size());
    }

    double distance(const Vec3& p) const {
        if (mesh_.faces.empty()) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& v : mesh_.vertices) best = std::min(best, norm2(p - v));
            return std::sqrt(best);
        }
        double best = std::numeric_limits<double>::infinity();
        search(root_, p, best);
        return std::sqrt(best);
    }

private:
    struct Node {
        Aabb box;
        int left = -1, right = -1;
        std::size_t first = 0, count = 0;  // leaf payload when count > 0
    };

    static double box_distance2(const Aabb& box, const Vec3& p) {
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            double v = p[a];
            if (v < box.lo[a]) d2 += (box.lo[a] - v) * (box.lo[a] - v);
            else if (v > box.hi[a]) d2 += (v - box.hi[a]) * (v - box.hi[a]);
        }
        return d2;
    }

    Aabb face_box(std::size_t f) const {
        Aabb b;
        for (int k = 0; k < 3; ++k) b.expand(mesh_.vertices[mesh_.faces[f][k]]);
        return b;
    }

    Vec3 face_centroid(std::size_t f) const {
        const auto& face = mesh_.faces[f];
        return (mesh_.vertices[face[0]] + mesh_.vertices[face[1]] + mesh_.vertices[face[2]]) / 3.0;
    }

    int build(std::size_t first, std::size_t count) {
        Node node;
        for (std::size_t i = 0; i < count; ++i) node.box.expand(face_box(face_order_[first + i]));
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        if (count <= 4) {
            nodes_[id].first = first;
            nodes_[id].count = count;
            return id;
        }
        Vec3 ext = node.box.extent();
        int axis = 0;
        if (ext.y > ext.x) axis = 1;
        if (ext.z > ext[axis]) axis = 2;
        std::size_t mid = count / 2;
        std::nth_element(face_order_.begin() + first, face_order_.begin() + first + mid,
                         face_order_.begin() + first + count,
                         [&](std::size_t fa, std::size_t fb) {
                             return face_centroid(fa)[axis] < face_centroid(fb)[axis];
                         });
        int left = build(first, mid);
        int right = build(first + mid, count - mid);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void search(int id, const Vec3& p, double& best) const {
        const Node& node = nodes_[id];
        if (box_distance2(node.box, p) >= best) return;
        if (node.count > 0) {
            for (std::size_t i = 0; i < node.count; ++i) {
                const auto& f = mesh_.faces[face_order_[node.first + i]];
                best = std::min(best, point_triangle_distance2(p, mesh_.vertices[f[0]],
                                                               mesh_.vertices[f[1]],
                                                               mesh_.vertices[f[2]]));
            }
            return;
        }
        double dl = box_distance2(nodes_[node.left].box, p);
        double dr = box_distance2(nodes_[node.right].box, p);
        if (dl <= dr) {
            search(node.left, p, best);
            if (dr < best) search(node.right, p, best);
        } else {
            search(node.right, p, best);
            if (dl < best) search(node.left, p, best);
        }
    }

    const Mesh& mesh_;
    std::vector<std::size_t> face_order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace meshrecon
