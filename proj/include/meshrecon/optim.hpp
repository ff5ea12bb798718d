#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "meshrecon/loss.hpp"
#include "meshrecon/nn.hpp"
#include "meshrecon/rng.hpp"

namespace meshrecon {

/// Adam with decoupled weight decay (applied directly to the parameters
/// before the moment update).
struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

class AdamState {
public:
    AdamState(AdamConfig config, const std::vector<Tensor*>& params) : config_(config) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (Tensor* p : params) {
            m_.emplace_back(p->shape);
            v_.emplace_back(p->shape);
        }
    }

    std::size_t step_count() const { return step_; }
    const AdamConfig& config() const { return config_; }

    void step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads) {
        if (params.size() != m_.size() || grads.size() != m_.size())
            throw Error("adam: parameter list does not match optimizer state");
        ++step_;
        double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
        double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
        for (std::size_t t = 0; t < params.size(); ++t) {
            Tensor& p = *params[t];
            const Tensor& g = *grads[t];
            if (p.numel() != g.numel()) throw Error("adam: gradient shape mismatch");
            for (std::size_t i = 0; i < p.numel(); ++i) {
                if (config_.weight_decay != 0.0)
                    p.data[i] -= config_.lr * config_.weight_decay * p.data[i];
                double gi = g.data[i];
                double m = config_.beta1 * m_[t].data[i] + (1.0 - config_.beta1) * gi;
                double v = config_.beta2 * v_[t].data[i] + (1.0 - config_.beta2) * gi * gi;
                m_[t].data[i] = m;
                v_[t].data[i] = v;
                p.data[i] -= config_.lr * (m / bc1) / (std::sqrt(v / bc2) + config_.eps);
            }
        }
    }

private:
    AdamConfig config_;
    std::size_t step_ = 0;
    std::vector<Tensor> m_, v_;
};

enum class LossKind { Mse, MultilabelSoftMargin };

inline LossResult compute_loss(LossKind kind, const Tensor& pred, const Tensor& target) {
    return kind == LossKind::Mse ? mse_loss(pred, target)
                                 : multilabel_soft_margin_loss(pred, target);
}

struct TrainConfig {
    double lr = 1e-3;
    double weight_decay = 0.0;
    std::size_t epochs = 0;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

struct TrainResult {
    std::vector<double> epoch_losses;  // mean per-sample loss per epoch
};

/// Train on (inputs[i], targets[i]) pairs: fan-in uniform init from the
/// seed, shuffled minibatches, gradients averaged per batch, one Adam step
/// per batch. Fixed accumulation order keeps runs bит-reproducible.
/// Throws when the loss stops being finite, naming the stage and epoch.
inline TrainResult train(Network& net, const std::vector<Tensor>& inputs,
                         const std::vector<Tensor>& targets, LossKind loss_kind,
                         const TrainConfig& config, const std::string& stage_name = "train") {
    if (inputs.empty()) throw Error(stage_name + ": empty dataset");
    if (inputs.size() != targets.size())
        throw Error(stage_name + ": input/target count mismatch");
    if (config.batch_size < 1) throw Error(stage_name + ": batch size must be >= 1");

    net.init(config.seed);
    AdamConfig ac;
    ac.lr = config.lr;
    ac.weight_decay = config.weight_decay;
    AdamState adam(ac, net.parameters());

    TrainResult result;
    std::vector<std::size_t> order(inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(config.seed, epoch + 1);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = shuffle_rng.uniform_index(i);
            std::swap(order[i - 1], order[j]);
        }
        double epoch_loss = 0.0;
        std::size_t pos = 0;
        while (pos < order.size()) {
            std::size_t batch = std::min(config.batch_size, order.size() - pos);
            net.zero_grad();
            for (std::size_t b = 0; b < batch; ++b) {
                const Tensor& x = inputs[order[pos + b]];
                const Tensor& y = targets[order[pos + b]];
                Tensor pred = net.forward(x);
                LossResult loss = compute_loss(loss_kind, pred, y);
                if (!std::isfinite(loss.value))
                    throw Error(stage_name + ": loss diverged (non-finite) at epoch " +
                                std::to_string(epoch));
                epoch_loss += loss.value;
                net.backward(loss.grad);
            }
            double inv = 1.0 / static_cast<double>(batch);
            for (Tensor* g : net.gradients())
                for (double& v : g->data) v *= inv;
            adam.step(net.parameters(), net.gradients());
            ++net.train_steps;
            pos += batch;
        }
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(inputs.size()));
    }
    return result;
}

/// Pure forward pass.
inline Tensor predict(Network& net, const Tensor& input) { return net.forward(input); }

}  // namespace meshrecon
