#pragma once

#include <charconv>
#include <filesystem>
#include <string>
#include <system_error>

#include "meshrecon/core.hpp"

namespace meshrecon::detail {

/// Shortest round-trip text form of a double; identical output on every
/// platform, which the byte-reproducibility contracts rely on.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

inline void ensure_parent_dir(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
}

}  // namespace meshrecon::detail
