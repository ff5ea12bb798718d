#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "meshrecon/core.hpp"
#include "meshrecon/io_util.hpp"

namespace meshrecon {

/// 8-bit grayscale raster, row-major from the top-left.
struct Image {
    std::size_t width = 0, height = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(std::size_t w, std::size_t h, std::uint8_t fill = 255)
        : width(w), height(h), pixels(w * h, fill) {}

    std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
};

/// Binary PGM (P5), maxval 255.
inline void save_pgm(const Image& img, const std::string& path) {
    detail::ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_pgm: cannot open " + path + " for writing");
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw Error("save_pgm: write failure on " + path);
}

inline Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw Error("load_pgm: " + path + " is not a binary PGM");
    std::size_t w, h;
    int maxval;
    in >> w >> h >> maxval;
    if (!in || maxval != 255) throw Error("load_pgm: unsupported header in " + path);
    in.get();  // single whitespace after maxval
    Image img(w, h, 0);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!in) throw Error("load_pgm: truncated pixel data in " + path);
    return img;
}

/// Bilinear sample with edge clamp; (x, y) in pixel coordinates where pixel
/// centers sit at half-integers.
inline double bilinear_sample(const Image& img, double x, double y) {
    double fx = std::clamp(x - 0.5, 0.0, static_cast<double>(img.width - 1));
    double fy = std::clamp(y - 0.5, 0.0, static_cast<double>(img.height - 1));
    std::size_t x0 = static_cast<std::size_t>(fx);
    std::size_t y0 = static_cast<std::size_t>(fy);
    std::size_t x1 = std::min(x0 + 1, img.width - 1);
    std::size_t y1 = std::min(y0 + 1, img.height - 1);
    double tx = fx - static_cast<double>(x0);
    double ty = fy - static_cast<double>(y0);
    double top = (1.0 - tx) * img.at(x0, y0) + tx * img.at(x1, y0);
    double bot = (1.0 - tx) * img.at(x0, y1) + tx * img.at(x1, y1);
    return (1.0 - ty) * top + ty * bot;
}

/// Aspect-preserving bilinear scale so the longer side fits `side`, centered
/// on a white square canvas (letterbox).
inline Image resize_to_input(const Image& src, std::size_t side = 220) {
    if (src.width == 0 || src.height == 0) throw Error("resize_to_input: empty image");
    double scale = static_cast<double>(side) / static_cast<double>(std::max(src.width, src.height));
    std::size_t cw = static_cast<std::size_t>(std::round(src.width * scale));
    std::size_t ch = static_cast<std::size_t>(std::round(src.height * scale));
    cw = std::min(cw, side);
    ch = std::min(ch, side);
    std::size_t ox = (side - cw) / 2;
    std::size_t oy = (side - ch) / 2;
    Image out(side, side, 255);
    for (std::size_t y = 0; y < ch; ++y)
        for (std::size_t x = 0; x < cw; ++x) {
            double sx = (static_cast<double>(x) + 0.5) * static_cast<double>(src.width) /
                        static_cast<double>(cw);
            double sy = (static_cast<double>(y) + 0.5) * static_cast<double>(src.height) /
                        static_cast<double>(ch);
            double v = bilinear_sample(src, sx, sy);
            out.at(ox + x, oy + y) =
                static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    return out;
}

}  // namespace meshrecon
