#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "meshrecon/io_util.hpp"
#include "meshrecon/mesh.hpp"

namespace meshrecon {

/// Load a Wavefront OBJ (v and f records). `f` entries may carry /vt/vn
/// suffixes, which are stripped; polygons with more than 3 vertices are
/// fan-triangulated. Indices are 1-based in the file, 0-based in Mesh.
inline Mesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_obj: cannot open " + path);
    Mesh mesh;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            std::string xs, ys, zs;
            Vec3 v;
            if (!(ss >> xs >> ys >> zs) || !detail::parse_double(xs, v.x) ||
                !detail::parse_double(ys, v.y) || !detail::parse_double(zs, v.z))
                throw Error("load_obj: " + path + ":" + std::to_string(lineno) +
                            ": malformed vertex record");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<std::size_t> idx;
            std::string tok;
            while (ss >> tok) {
                // keep only the vertex index before any '/'
                std::size_t slash = tok.find('/');
                if (slash != std::string::npos) tok = tok.substr(0, slash);
                long long raw = 0;
                auto res = std::from_chars(tok.data(), tok.data() + tok.size(), raw);
                if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || raw == 0)
                    throw Error("load_obj: " + path + ":" + std::to_string(lineno) +
                                ": malformed face index '" + tok + "'");
                // negative indices are relative to the current vertex count
                long long resolved = raw > 0
                                         ? raw - 1
                                         : static_cast<long long>(mesh.vertices.size()) + raw;
                if (resolved < 0)
                    throw Error("load_obj: " + path + ":" + std::to_string(lineno) +
                                ": face index out of range");
                idx.push_back(static_cast<std::size_t>(resolved));
            }
            if (idx.size() < 3)
                throw Error("load_obj: " + path + ":" + std::to_string(lineno) +
                            ": face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k)
                mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
        }
        // other record types (vn, vt, o, g, usemtl, #, ...) are ignored
    }
    validate_mesh(mesh);
    return mesh;
}

inline void save_obj(const Mesh& mesh, const std::string& path) {
    validate_mesh(mesh);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_obj: cannot open " + path + " for writing");
    for (const Vec3& v : mesh.vertices)
        out << "v " << detail::format_double(v.x) << ' ' << detail::format_double(v.y) << ' '
            << detail::format_double(v.z) << '\n';
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) throw Error("save_obj: write failure on " + path);
}

}  // namespace meshrecon
