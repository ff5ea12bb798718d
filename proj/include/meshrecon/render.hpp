#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "meshrecon/image.hpp"
#include "meshrecon/mesh.hpp"

namespace meshrecon {

/// Orbit camera: position on a sphere around the look-at target, z-up.
struct Camera {
    double azimuth = 0.0;    // radians around +z
    double elevation = 0.0;  // radians above the xy-plane
    double distance = 2.0;
    double fov_y = 0.78539816339744830961;  // vertical field of view, pi/4
    Vec3 target{0, 0, 0};

    Vec3 position() const {
        double ce = std::cos(elevation);
        return target + Vec3{distance * ce * std::cos(azimuth),
                             distance * ce * std::sin(azimuth),
                             distance * std::sin(elevation)};
    }
};

namespace detail {

struct ViewBasis {
    Vec3 pos, right, up, forward;
};

inline ViewBasis view_basis(const Camera& cam) {
    ViewBasis vb;
    vb.pos = cam.position();
    vb.forward = normalized(cam.target - vb.pos);
    Vec3 world_up{0, 0, 1};
    Vec3 r = cross(vb.forward, world_up);
    if (norm(r) < 1e-12) r = Vec3{1, 0, 0};  // looking straight up/down
    vb.right = normalized(r);
    vb.up = cross(vb.right, vb.forward);
    return vb;
}

}  // namespace detail

inline constexpr double kRenderAmbient = 0.2;
inline constexpr double kRenderNearPlane = 1e-4;

/// Perspective projection, z-buffered rasterization, flat Lambert shading
/// with a headlight at the camera, white (255) background. Output values
/// never reach 255 on covered pixels so geometry stays separable from the
/// background. Triangles with a vertex behind the near plane are skipped.
inline Image render(const Mesh& mesh, const Camera& cam, std::size_t width = 256,
                    std::size_t height = 192) {
    if (mesh.vertices.empty()) throw Error("render: empty mesh");
    Image img(width, height, 255);
    std::vector<double> zbuf(width * height, std::numeric_limits<double>::infinity());

    detail::ViewBasis vb = detail::view_basis(cam);
    double tan_y = std::tan(cam.fov_y * 0.5);
    double tan_x = tan_y * static_cast<double>(width) / static_cast<double>(height);

    struct Projected {
        double px, py, z;
    };
    std::vector<Projected> proj(mesh.vertex_count());
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        Vec3 rel = mesh.vertices[i] - vb.pos;
        double z = dot(rel, vb.forward);
        proj[i].z = z;
        if (z <= kRenderNearPlane) continue;
        double ndc_x = dot(rel, vb.right) / (z * tan_x);
        double ndc_y = dot(rel, vb.up) / (z * tan_y);
        proj[i].px = (ndc_x + 1.0) * 0.5 * static_cast<double>(width);
        proj[i].py = (1.0 - ndc_y) * 0.5 * static_cast<double>(height);
    }

    for (const auto& f : mesh.faces) {
        const Projected& a = proj[f[0]];
        const Projected& b = proj[f[1]];
        const Projected& c = proj[f[2]];
        if (a.z <= kRenderNearPlane || b.z <= kRenderNearPlane || c.z <= kRenderNearPlane)
            continue;

        // flat shade: face normal against the direction to the camera
        const Vec3& wa = mesh.vertices[f[0]];
        const Vec3& wb = mesh.vertices[f[1]];
        const Vec3& wc = mesh.vertices[f[2]];
        Vec3 n = cross(wb - wa, wc - wa);
        double nl = norm(n);
        if (nl <= 0.0) continue;
        Vec3 centroid = (wa + wb + wc) / 3.0;
        Vec3 to_cam = normalized(vb.pos - centroid);
        double lambert = std::abs(dot(n / nl, to_cam));
        double intensity = kRenderAmbient + (1.0 - kRenderAmbient) * lambert;
        std::uint8_t shade = static_cast<std::uint8_t>(
            std::min(254L, std::lround(intensity * 255.0)));

        double area = (b.px - a.px) * (c.py - a.py) - (b.py - a.py) * (c.px - a.px);
        if (area == 0.0) continue;

        long min_x = std::max(0L, static_cast<long>(std::floor(std::min({a.px, b.px, c.px}))));
        long max_x = std::min(static_cast<long>(width) - 1,
                              static_cast<long>(std::ceil(std::max({a.px, b.px, c.px}))));
        long min_y = std::max(0L, static_cast<long>(std::floor(std::min({a.py, b.py, c.py}))));
        long max_y = std::min(static_cast<long>(height) - 1,
                              static_cast<long>(std::ceil(std::max({a.py, b.py, c.py}))));

        double inv_za = 1.0 / a.z, inv_zb = 1.0 / b.z, inv_zc = 1.0 / c.z;
        for (long y = min_y; y <= max_y; ++y) {
            double py = static_cast<double>(y) + 0.5;
            for (long x = min_x; x <= max_x; ++x) {
                double px = static_cast<double>(x) + 0.5;
                double w0 = (b.px - a.px) * (py - a.py) - (b.py - a.py) * (px - a.px);
                double w1 = (c.px - b.px) * (py - b.py) - (c.py - b.py) * (px - b.px);
                double w2 = (a.px - c.px) * (py - c.py) - (a.py - c.py) * (px - c.px);
                bool inside = (w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0) ||
                              (w0 <= 0.0 && w1 <= 0.0 && w2 <= 0.0);
                if (!inside) continue;
                // barycentric weights; 1/z interpolates linearly in screen space
                double l1 = w2 / area, l2 = w0 / area;
                double l0 = 1.0 - l1 - l2;
                double inv_z = l0 * inv_za + l1 * inv_zb + l2 * inv_zc;
                if (inv_z <= 0.0) continue;
                double z = 1.0 / inv_z;
                std::size_t idx = static_cast<std::size_t>(y) * width +
                                  static_cast<std::size_t>(x);
                if (z < zbuf[idx]) {
                    zbuf[idx] = z;
                    img.pixels[idx] = shade;
                }
            }
        }
    }
    return img;
}

}  // namespace meshrecon
