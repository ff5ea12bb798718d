#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "meshrecon/gmm.hpp"
#include "meshrecon/graph.hpp"
#include "meshrecon/image.hpp"
#include "meshrecon/obj_io.hpp"
#include "meshrecon/recon.hpp"
#include "meshrecon/render.hpp"
#include "meshrecon/rng.hpp"

namespace meshrecon {

/// Viewpoint sampling ranges for dataset rendering. `fill` is the fraction
/// of the frame height the model's bounding sphere should cover.
struct CameraRanges {
    double azimuth_lo = 0.0;
    double azimuth_hi = 6.283185307179586476925286766559;
    double elevation_lo = 0.0;
    double elevation_hi = 0.52359877559829887308;  // pi/6
    double fill_lo = 0.6;
    double fill_hi = 0.8;
    double fov_y = 0.78539816339744830961;  // pi/4
};

struct DatasetRecord {
    std::string image_path;  // relative to the manifest directory
    std::size_t label = 0;
    std::vector<double> dp;     // flat reduced displacements
    std::vector<double> alpha;  // node-count weights
    std::string mesh_path;      // relative to the manifest directory
    Camera camera;
};

struct Dataset {
    std::string graph_manifest;  // relative to the dataset manifest
    std::size_t train_count = 0;
    std::vector<DatasetRecord> records;
    std::string base_dir;  // directory of the manifest, for resolving paths

    std::size_t test_count() const { return records.size() - train_count; }
    std::string resolve(const std::string& rel) const {
        return (std::filesystem::path(base_dir) / rel).string();
    }
};

struct DatasetGenConfig {
    std::size_t count = 0;
    double sparsity = 0.5;
    CameraRanges cameras;
    std::size_t render_width = 256;
    std::size_t render_height = 192;
    ReconOptions recon;
    double train_fraction = 0.7;
};

namespace detail {

inline Camera sample_camera(const Mesh& mesh, const CameraRanges& ranges, Rng& rng) {
    Aabb box = mesh.bounds();
    Vec3 center = box.center();
    double radius = 0.0;
    for (const Vec3& v : mesh.vertices) radius = std::max(radius, norm(v - center));
    if (radius <= 0.0) radius = 1e-6;
    Camera cam;
    cam.azimuth = rng.uniform(ranges.azimuth_lo, ranges.azimuth_hi);
    cam.elevation = rng.uniform(ranges.elevation_lo, ranges.elevation_hi);
    cam.fov_y = ranges.fov_y;
    cam.target = center;
    double fill = rng.uniform(ranges.fill_lo, ranges.fill_hi);
    double d = radius / (fill * std::tan(cam.fov_y * 0.5));
    cam.distance = std::max(d, 1.5 * radius);
    return cam;
}

inline std::string record_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06zu", i);
    return buf;
}

}  // namespace detail

/// Synthesize one deformed model. Identical code path to inference
/// reconstruction (reconstruct_from_params).
inline Mesh synthesize_model(const EmbeddingGraph& graph, std::size_t c,
                             const std::vector<double>& dp_flat,
                             const std::vector<double>& alpha, const ReconOptions& opts = {}) {
    ShapeParams params;
    params.index = c;
    params.dp = ReducedDisplacements::from_flat(dp_flat);
    params.alpha = alpha;
    return reconstruct_from_params(graph, params, opts);
}

inline void save_dataset_manifest(const Dataset& ds, const std::string& path) {
    detail::ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_dataset_manifest: cannot open " + path);
    out << "graph " << ds.graph_manifest << '\n';
    out << "split train " << ds.train_count << " test " << ds.records.size() - ds.train_count
        << '\n';
    for (const auto& rec : ds.records) {
        out << "record " << rec.image_path << ' ' << rec.label;
        for (double v : rec.dp) out << ' ' << detail::format_double(v);
        for (double v : rec.alpha) out << ' ' << detail::format_double(v);
        out << ' ' << rec.mesh_path << ' ' << detail::format_double(rec.camera.azimuth) << ' '
            << detail::format_double(rec.camera.elevation) << ' '
            << detail::format_double(rec.camera.distance) << ' '
            << detail::format_double(rec.camera.fov_y) << ' '
            << detail::format_double(rec.camera.target.x) << ' '
            << detail::format_double(rec.camera.target.y) << ' '
            << detail::format_double(rec.camera.target.z) << '\n';
    }
    if (!out) throw Error("save_dataset_manifest: write failure on " + path);
}

inline Dataset load_dataset_manifest(const std::string& path, std::size_t dp_size,
                                     std::size_t node_count) {
    std::ifstream in(path);
    if (!in) throw Error("load_dataset_manifest: cannot open " + path);
    Dataset ds;
    ds.base_dir = std::filesystem::path(path).parent_path().string();
    std::string line;
    std::size_t lineno = 0;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "graph") {
            ss >> ds.graph_manifest;
        } else if (tag == "split") {
            std::string t1, t2;
            std::size_t test = 0;
            if (!(ss >> t1 >> ds.train_count >> t2 >> test) || t1 != "train" || t2 != "test")
                throw Error("load_dataset_manifest: malformed split line at " +
                            std::to_string(lineno));
            declared = ds.train_count + test;
        } else if (tag == "record") {
            DatasetRecord rec;
            if (!(ss >> rec.image_path >> rec.label))
                throw Error("load_dataset_manifest: malformed record at line " +
                            std::to_string(lineno));
            rec.dp.resize(dp_size);
            for (double& v : rec.dp)
                if (!(ss >> v))
                    throw Error("load_dataset_manifest: truncated dp at line " +
                                std::to_string(lineno));
            rec.alpha.resize(node_count);
            for (double& v : rec.alpha)
                if (!(ss >> v))
                    throw Error("load_dataset_manifest: truncated alpha at line " +
                                std::to_string(lineno));
            if (!(ss >> rec.mesh_path >> rec.camera.azimuth >> rec.camera.elevation >>
                  rec.camera.distance >> rec.camera.fov_y >> rec.camera.target.x >>
                  rec.camera.target.y >> rec.camera.target.z))
                throw Error("load_dataset_manifest: truncated record at line " +
                            std::to_string(lineno));
            if (rec.label >= node_count)
                throw Error("load_dataset_manifest: label out of range at line " +
                            std::to_string(lineno));
            ds.records.push_back(std::move(rec));
        } else {
            throw Error("load_dataset_manifest: unknown record '" + tag + "' at line " +
                        std::to_string(lineno));
        }
    }
    if (declared != 0 && declared != ds.records.size())
        throw Error("load_dataset_manifest: split header does not match record count");
    return ds;
}

/// Generate `config.count` records: for each, a uniformly chosen node, a
/// deformation drawn from the GMM, sparse alpha weights from the normal
/// prior, the synthesized ground-truth mesh, and one rendered view. Every
/// record derives its RNG stream from (seed, record index), so the result
/// is fully deterministic. Returns the manifest path.
inline std::string generate_dataset(const EmbeddingGraph& graph,
                                    const std::string& graph_manifest_path,
                                    const DatasetGenConfig& config, const GaussianMixture& gmm,
                                    const AlphaPrior& prior, std::uint64_t seed,
                                    const std::string& out_dir) {
    if (config.count < 1) throw Error("generate_dataset: count must be >= 1");
    std::size_t reduced = build_symmetry_map(config.recon.grid_dims, config.recon.symmetry_axis)
                              .reduced_count();
    if (gmm.dim != reduced * 3)
        throw Error("generate_dataset: GMM dimension " + std::to_string(gmm.dim) +
                    " does not match reduced displacement size " + std::to_string(reduced * 3));

    std::filesystem::create_directories(std::filesystem::path(out_dir) / "images");
    std::filesystem::create_directories(std::filesystem::path(out_dir) / "meshes");

    Dataset ds;
    ds.base_dir = out_dir;
    ds.graph_manifest = std::filesystem::relative(graph_manifest_path, out_dir).string();
    ds.train_count = static_cast<std::size_t>(
        std::llround(config.train_fraction * static_cast<double>(config.count)));

    for (std::size_t r = 0; r < config.count; ++r) {
        // independent substreams per record: selection, dp, alpha, camera
        Rng pick(seed, r * 4 + 0);
        std::size_t c = pick.uniform_index(graph.node_count());
        std::vector<double> dp = sample_gmm(gmm, mix_seed(seed, r * 4 + 1));
        std::vector<double> alpha = sample_alpha(prior, c, subgraph(graph, c), config.sparsity,
                                                 graph.node_count(), mix_seed(seed, r * 4 + 2));

        Mesh gt = synthesize_model(graph, c, dp, alpha, config.recon);

        Rng cam_rng(seed, r * 4 + 3);
        Camera cam = detail::sample_camera(gt, config.cameras, cam_rng);
        Image img = render(gt, cam, config.render_width, config.render_height);

        DatasetRecord rec;
        rec.image_path = "images/" + detail::record_name(r) + ".pgm";
        rec.mesh_path = "meshes/" + detail::record_name(r) + ".obj";
        rec.label = c;
        rec.dp = std::move(dp);
        rec.alpha = std::move(alpha);
        rec.camera = cam;
        save_pgm(img, ds.resolve(rec.image_path));
        save_obj(gt, ds.resolve(rec.mesh_path));
        ds.records.push_back(std::move(rec));
    }

    std::string manifest = (std::filesystem::path(out_dir) / "dataset.txt").string();
    save_dataset_manifest(ds, manifest);
    return manifest;
}

}  // namespace meshrecon
