#pragma once

#include <cmath>

#include "meshrecon/tensor.hpp"

namespace meshrecon {

struct LossResult {
    double value = 0.0;
    Tensor grad;  // d value / d prediction
};

/// Mean over all elements of the squared difference.
inline LossResult mse_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.shape_equals(target)) throw Error("mse_loss: shape mismatch");
    LossResult res;
    res.grad = Tensor(pred.shape);
    double n = static_cast<double>(pred.numel());
    for (std::size_t i = 0; i < pred.numel(); ++i) {
        double d = pred.data[i] - target.data[i];
        res.value += d * d;
        res.grad.data[i] = 2.0 * d / n;
    }
    res.value /= n;
    return res;
}

namespace detail {

inline double softplus(double x) {
    // log(1 + e^x), stable for large |x|
    return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace detail

/// Per-class logistic loss averaged over classes:
///   mean_i -[ y_i log s(x_i) + (1 - y_i) log(1 - s(x_i)) ]
/// computed in softplus form for stability. Targets are 0/1.
inline LossResult multilabel_soft_margin_loss(const Tensor& logits, const Tensor& target) {
    if (!logits.shape_equals(target)) throw Error("multilabel_soft_margin_loss: shape mismatch");
    LossResult res;
    res.grad = Tensor(logits.shape);
    double n = static_cast<double>(logits.numel());
    for (std::size_t i = 0; i < logits.numel(); ++i) {
        double x = logits.data[i], y = target.data[i];
        res.value += y * detail::softplus(-x) + (1.0 - y) * detail::softplus(x);
        res.grad.data[i] = (detail::sigmoid(x) - y) / n;
    }
    res.value /= n;
    return res;
}

}  // namespace meshrecon
