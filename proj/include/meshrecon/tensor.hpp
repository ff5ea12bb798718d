#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "meshrecon/core.hpp"

namespace meshrecon {

/// Dense row-major tensor of doubles.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), 0.0);
    }

    static std::size_t numel_of(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t d : s) n *= d;
        return n;
    }
    std::size_t numel() const { return data.size(); }

    static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

    static Tensor from_vector(const std::vector<double>& v) {
        Tensor t;
        t.shape = {v.size()};
        t.data = v;
        return t;
    }

    bool shape_equals(const Tensor& o) const { return shape == o.shape; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

}  // namespace meshrecon
