#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "meshrecon/ffd.hpp"
#include "meshrecon/io_util.hpp"
#include "meshrecon/mesh.hpp"
#include "meshrecon/obj_io.hpp"

namespace meshrecon {

/// Shape-embedding graph: nodes are meshes of one object class, edges mark
/// pairs in dense vertex correspondence (equal vertex counts).
struct EmbeddingGraph {
    struct Node {
        std::size_t id = 0;
        Mesh mesh;
        std::string mesh_path;
    };
    std::vector<Node> nodes;
    std::vector<std::vector<std::size_t>> adjacency;  // sorted neighbor lists

    std::size_t node_count() const { return nodes.size(); }

    bool has_edge(std::size_t a, std::size_t b) const {
        const auto& n = adjacency[a];
        return std::binary_search(n.begin(), n.end(), b);
    }
};

/// Compact shape code: graph index, reduced FFD displacements, and one
/// linear-combination weight per graph node.
struct ShapeParams {
    std::size_t index = 0;
    ReducedDisplacements dp;
    std::vector<double> alpha;
};

namespace detail {

inline void add_edge(EmbeddingGraph& graph, std::size_t a, std::size_t b) {
    if (a == b) throw Error("graph: self-edge on node " + std::to_string(a));
    if (a >= graph.node_count() || b >= graph.node_count())
        throw Error("graph: edge (" + std::to_string(a) + "," + std::to_string(b) +
                    ") references a missing node");
    if (graph.nodes[a].mesh.vertex_count() != graph.nodes[b].mesh.vertex_count())
        throw Error("graph: edge (" + std::to_string(a) + "," + std::to_string(b) +
                    ") joins meshes with different vertex counts (" +
                    std::to_string(graph.nodes[a].mesh.vertex_count()) + " vs " +
                    std::to_string(graph.nodes[b].mesh.vertex_count()) + ")");
    if (!graph.has_edge(a, b)) {
        graph.adjacency[a].insert(
            std::upper_bound(graph.adjacency[a].begin(), graph.adjacency[a].end(), b), b);
        graph.adjacency[b].insert(
            std::upper_bound(graph.adjacency[b].begin(), graph.adjacency[b].end(), a), a);
    }
}

}  // namespace detail

/// Load a graph manifest: `node <id> <obj-path>` lines followed by
/// `edge <id> <id>` lines. Mesh paths are resolved relative to the manifest.
inline EmbeddingGraph load_graph(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw Error("load_graph: cannot open " + manifest_path);
    std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();

    EmbeddingGraph graph;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "node") {
            std::size_t id;
            std::string rel;
            if (!(ss >> id >> rel))
                throw Error("load_graph: " + manifest_path + ":" + std::to_string(lineno) +
                            ": malformed node line");
            if (id != graph.node_count())
                throw Error("load_graph: " + manifest_path + ":" + std::to_string(lineno) +
                            ": node ids must be dense from 0 (got " + std::to_string(id) + ")");
            EmbeddingGraph::Node node;
            node.id = id;
            node.mesh_path = (base / rel).string();
            node.mesh = load_obj(node.mesh_path);
            if (node.mesh.vertices.empty())
                throw Error("load_graph: node " + std::to_string(id) + " has an empty mesh");
            graph.nodes.push_back(std::move(node));
        } else if (tag == "edge") {
            std::size_t a, b;
            if (!(ss >> a >> b))
                throw Error("load_graph: " + manifest_path + ":" + std::to_string(lineno) +
                            ": malformed edge line");
            edges.emplace_back(a, b);
        } else {
            throw Error("load_graph: " + manifest_path + ":" + std::to_string(lineno) +
                        ": unknown record '" + tag + "'");
        }
    }
    if (graph.nodes.empty()) throw Error("load_graph: manifest has no nodes");
    graph.adjacency.assign(graph.node_count(), {});
    for (auto [a, b] : edges) detail::add_edge(graph, a, b);
    return graph;
}

/// Write a manifest for a graph whose node meshes are already on disk at
/// paths relative to the manifest directory.
inline void save_graph_manifest(const EmbeddingGraph& graph, const std::string& manifest_path,
                                const std::vector<std::string>& relative_mesh_paths) {
    if (relative_mesh_paths.size() != graph.node_count())
        throw Error("save_graph_manifest: path count does not match node count");
    detail::ensure_parent_dir(manifest_path);
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw Error("save_graph_manifest: cannot open " + manifest_path);
    for (std::size_t i = 0; i < graph.node_count(); ++i)
        out << "node " << i << ' ' << relative_mesh_paths[i] << '\n';
    for (std::size_t a = 0; a < graph.node_count(); ++a)
        for (std::size_t b : graph.adjacency[a])
            if (a < b) out << "edge " << a << ' ' << b << '\n';
    if (!out) throw Error("save_graph_manifest: write failure on " + manifest_path);
}

/// Neighbor set of node c (never contains c itself).
inline std::vector<std::size_t> subgraph(const EmbeddingGraph& graph, std::size_t c) {
    if (c >= graph.node_count())
        throw Error("subgraph: invalid node id " + std::to_string(c));
    return graph.adjacency[c];
}

/// Weighted vertex blend over the subgraph of c:
///   V = alpha[c] * base + sum over neighbors i with |alpha[i]| > zero_tol
///       of alpha[i] * V_i,  faces taken from node c.
/// `base` is typically the FFD-deformed node c.
inline Mesh linear_combine(const EmbeddingGraph& graph, std::size_t c, const Mesh& base,
                           const std::vector<double>& alpha, double zero_tol = 1e-3) {
    if (c >= graph.node_count())
        throw Error("linear_combine: invalid node id " + std::to_string(c));
    if (alpha.size() != graph.node_count())
        throw Error("linear_combine: alpha length " + std::to_string(alpha.size()) +
                    " does not match node count " + std::to_string(graph.node_count()));
    const Mesh& center = graph.nodes[c].mesh;
    if (base.vertex_count() != center.vertex_count())
        throw Error("linear_combine: base vertex count does not match node " +
                    std::to_string(c));

    Mesh out;
    out.faces = center.faces;
    out.vertices.assign(base.vertex_count(), Vec3{0, 0, 0});
    for (std::size_t v = 0; v < base.vertex_count(); ++v)
        out.vertices[v] = base.vertices[v] * alpha[c];
    for (std::size_t i : graph.adjacency[c]) {
        if (std::abs(alpha[i]) <= zero_tol) continue;
        const Mesh& m = graph.nodes[i].mesh;
        if (m.vertex_count() != base.vertex_count())
            throw Error("linear_combine: node " + std::to_string(i) +
                        " vertex count does not match node " + std::to_string(c));
        for (std::size_t v = 0; v < base.vertex_count(); ++v)
            out.vertices[v] += m.vertices[v] * alpha[i];
    }
    return out;
}

}  // namespace meshrecon
