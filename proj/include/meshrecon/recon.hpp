#pragma once

#include <cmath>

#include "meshrecon/ffd.hpp"
#include "meshrecon/graph.hpp"

namespace meshrecon {

/// Knobs shared by dataset synthesis and inference. Both go through
/// reconstruct_from_params with the same options so the two paths agree
/// bitwise.
struct ReconOptions {
    GridDims grid_dims{4, 4, 4};
    double grid_margin = 0.05;
    int symmetry_axis = 0;
    double zero_tol = 1e-3;
};

struct ReconStages {
    Mesh selected;  // undeformed node mesh
    Mesh ffd;       // after control-point displacement
    Mesh final;     // after linear combination
};

/// Deform node `params.index` by the reduced displacements, then blend with
/// its subgraph using the alpha weights. If sparsification zeroes out every
/// weight (|alpha_i| <= zero_tol for all i, including the center), the
/// combination would collapse to the origin; the center weight falls back
/// to 1 and the FFD-stage mesh is returned unchanged.
inline ReconStages reconstruct_stages(const EmbeddingGraph& graph, const ShapeParams& params,
                                      const ReconOptions& opts = {}) {
    if (params.index >= graph.node_count())
        throw Error("reconstruct: invalid node index " + std::to_string(params.index));
    if (params.alpha.size() != graph.node_count())
        throw Error("reconstruct: alpha length does not match graph node count");

    ReconStages stages;
    stages.selected = graph.nodes[params.index].mesh;

    FfdGrid grid = build_grid(stages.selected, opts.grid_dims, opts.grid_margin);
    DeformationMatrix B = build_deformation_matrix(stages.selected, grid);
    SymmetryMap phi = build_symmetry_map(opts.grid_dims, opts.symmetry_axis);
    stages.ffd = apply_ffd(stages.selected, grid, B, phi, params.dp);

    bool all_zero = std::abs(params.alpha[params.index]) <= opts.zero_tol;
    if (all_zero) {
        for (std::size_t i : graph.adjacency[params.index]) {
            if (std::abs(params.alpha[i]) > opts.zero_tol) {
                all_zero = false;
                break;
            }
        }
    }
    if (all_zero) {
        std::vector<double> fallback(graph.node_count(), 0.0);
        fallback[params.index] = 1.0;
        stages.final = linear_combine(graph, params.index, stages.ffd, fallback, opts.zero_tol);
    } else {
        stages.final = linear_combine(graph, params.index, stages.ffd, params.alpha, opts.zero_tol);
    }
    return stages;
}

inline Mesh reconstruct_from_params(const EmbeddingGraph& graph, const ShapeParams& params,
                                    const ReconOptions& opts = {}) {
    return reconstruct_stages(graph, params, opts).final;
}

}  // namespace meshrecon
