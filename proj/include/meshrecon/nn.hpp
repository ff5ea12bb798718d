#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "meshrecon/rng.hpp"
#include "meshrecon/tensor.hpp"

namespace meshrecon {

/// One differentiable layer. forward() caches whatever backward() needs;
/// backward() accumulates parameter gradients and returns the input
/// gradient. Single-writer: one training loop owns a network instance.
class Layer {
public:
    virtual ~Layer() = default;
    virtual std::string spec_line() const = 0;
    virtual Tensor forward(const Tensor& input) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;
    virtual std::vector<Tensor*> parameters() { return {}; }
    virtual std::vector<Tensor*> gradients() { return {}; }
    virtual void init_params(Rng&) {}

protected:
    static void uniform_init(Tensor& t, double bound, Rng& rng) {
        for (double& v : t.data) v = rng.uniform(-bound, bound);
    }
};

namespace detail {

inline void check_chw(const Tensor& t, std::size_t channels, const char* who) {
    if (t.shape.size() != 3 || t.shape[0] != channels)
        throw Error(std::string(who) + ": expected input shape (C,H,W) with C=" +
                    std::to_string(channels));
}

}  // namespace detail

/// 2D cross-correlation with bias. Weight layout (out, in, k, k).
class Conv2d : public Layer {
public:
    Conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride,
           std::size_t padding = 0)
        : in_ch_(in_ch), out_ch_(out_ch), k_(kernel), s_(stride), p_(padding),
          weight_({out_ch, in_ch, kernel, kernel}), bias_({out_ch}),
          grad_weight_({out_ch, in_ch, kernel, kernel}), grad_bias_({out_ch}) {}

    std::string spec_line() const override {
        return "conv " + std::to_string(in_ch_) + ' ' + std::to_string(out_ch_) + ' ' +
               std::to_string(k_) + ' ' + std::to_string(s_) + ' ' + std::to_string(p_);
    }

    Tensor forward(const Tensor& input) override {
        detail::check_chw(input, in_ch_, "conv2d");
        std::size_t h = input.shape[1], w = input.shape[2];
        if (h + 2 * p_ < k_ || w + 2 * p_ < k_)
            throw Error("conv2d: kernel larger than padded input");
        std::size_t oh = (h + 2 * p_ - k_) / s_ + 1;
        std::size_t ow = (w + 2 * p_ - k_) / s_ + 1;
        if (oh < 1 || ow < 1) throw Error("conv2d: non-positive output size");
        input_ = input;
        Tensor out({out_ch_, oh, ow});
        for (std::size_t o = 0; o < out_ch_; ++o) {
            double b = bias_.data[o];
            for (std::size_t oy = 0; oy < oh; ++oy)
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    double acc = b;
                    for (std::size_t i = 0; i < in_ch_; ++i)
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            long iy = static_cast<long>(oy * s_ + ky) - static_cast<long>(p_);
                            if (iy < 0 || iy >= static_cast<long>(h)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                long ix = static_cast<long>(ox * s_ + kx) - static_cast<long>(p_);
                                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                                acc += input.data[(i * h + iy) * w + ix] *
                                       weight_.data[((o * in_ch_ + i) * k_ + ky) * k_ + kx];
                            }
                        }
                    out.data[(o * oh + oy) * ow + ox] = acc;
                }
        }
        out_h_ = oh;
        out_w_ = ow;
        return out;
    }

    Tensor backward(const Tensor& grad_out) override {
        if (input_.shape.empty()) throw Error("conv2d: backward before forward");
        std::size_t h = input_.shape[1], w = input_.shape[2];
        Tensor grad_in(input_.shape);
        for (std::size_t o = 0; o < out_ch_; ++o)
            for (std::size_t oy = 0; oy < out_h_; ++oy)
                for (std::size_t ox = 0; ox < out_w_; ++ox) {
                    double g = grad_out.data[(o * out_h_ + oy) * out_w_ + ox];
                    grad_bias_.data[o] += g;
                    for (std::size_t i = 0; i < in_ch_; ++i)
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            long iy = static_cast<long>(oy * s_ + ky) - static_cast<long>(p_);
                            if (iy < 0 || iy >= static_cast<long>(h)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                long ix = static_cast<long>(ox * s_ + kx) - static_cast<long>(p_);
                                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                                std::size_t in_idx = (i * h + iy) * w + ix;
                                std::size_t w_idx = ((o * in_ch_ + i) * k_ + ky) * k_ + kx;
                                grad_weight_.data[w_idx] += g * input_.data[in_idx];
                                grad_in.data[in_idx] += g * weight_.data[w_idx];
                            }
                        }
                }
        return grad_in;
    }

    std::vector<Tensor*> parameters() override { return {&weight_, &bias_}; }
    std::vector<Tensor*> gradients() override { return {&grad_weight_, &grad_bias_}; }

    void init_params(Rng& rng) override {
        double bound = 1.0 / std::sqrt(static_cast<double>(in_ch_ * k_ * k_));
        uniform_init(weight_, bound, rng);
        uniform_init(bias_, bound, rng);
    }

private:
    std::size_t in_ch_, out_ch_, k_, s_, p_;
    Tensor weight_, bias_, grad_weight_, grad_bias_;
    Tensor input_;
    std::size_t out_h_ = 0, out_w_ = 0;
};

/// Transposed 2D convolution (gradient of Conv2d wrt its input) with bias.
/// Weight layout (in, out, k, k). output_padding extends the bottom/right.
class TConv2d : public Layer {
public:
    TConv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride,
            std::size_t padding = 0, std::size_t output_padding = 0)
        : in_ch_(in_ch), out_ch_(out_ch), k_(kernel), s_(stride), p_(padding),
          op_(output_padding), weight_({in_ch, out_ch, kernel, kernel}), bias_({out_ch}),
          grad_weight_({in_ch, out_ch, kernel, kernel}), grad_bias_({out_ch}) {}

    std::string spec_line() const override {
        return "tconv " + std::to_string(in_ch_) + ' ' + std::to_string(out_ch_) + ' ' +
               std::to_string(k_) + ' ' + std::to_string(s_) + ' ' + std::to_string(p_) + ' ' +
               std::to_string(op_);
    }

    Tensor forward(const Tensor& input) override {
        detail::check_chw(input, in_ch_, "tconv2d");
        std::size_t h = input.shape[1], w = input.shape[2];
        long oh = static_cast<long>((h - 1) * s_ + k_ + op_) - 2 * static_cast<long>(p_);
        long ow = static_cast<long>((w - 1) * s_ + k_ + op_) - 2 * static_cast<long>(p_);
        if (oh < 1 || ow < 1) throw Error("tconv2d: non-positive output size");
        input_ = input;
        out_h_ = static_cast<std::size_t>(oh);
        out_w_ = static_cast<std::size_t>(ow);
        Tensor out({out_ch_, out_h_, out_w_});
        for (std::size_t o = 0; o < out_ch_; ++o) {
            double b = bias_.data[o];
            for (std::size_t y = 0; y < out_h_ * out_w_; ++y)
                out.data[o * out_h_ * out_w_ + y] = b;
        }
        for (std::size_t i = 0; i < in_ch_; ++i)
            for (std::size_t iy = 0; iy < h; ++iy)
                for (std::size_t ix = 0; ix < w; ++ix) {
                    double v = input.data[(i * h + iy) * w + ix];
                    for (std::size_t o = 0; o < out_ch_; ++o)
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            long y = static_cast<long>(iy * s_ + ky) - static_cast<long>(p_);
                            if (y < 0 || y >= static_cast<long>(out_h_)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                long x = static_cast<long>(ix * s_ + kx) - static_cast<long>(p_);
                                if (x < 0 || x >= static_cast<long>(out_w_)) continue;
                                out.data[(o * out_h_ + y) * out_w_ + x] +=
                                    v * weight_.data[((i * out_ch_ + o) * k_ + ky) * k_ + kx];
                            }
                        }
                }
        return out;
    }

    Tensor backward(const Tensor& grad_out) override {
        if (input_.shape.empty()) throw Error("tconv2d: backward before forward");
        std::size_t h = input_.shape[1], w = input_.shape[2];
        Tensor grad_in(input_.shape);
        for (std::size_t o = 0; o < out_ch_; ++o)
            for (std::size_t y = 0; y < out_h_; ++y)
                for (std::size_t x = 0; x < out_w_; ++x)
                    grad_bias_.data[o] += grad_out.data[(o * out_h_ + y) * out_w_ + x];
        for (std::size_t i = 0; i < in_ch_; ++i)
            for (std::size_t iy = 0; iy < h; ++iy)
                for (std::size_t ix = 0; ix < w; ++ix) {
                    double in_v = input_.data[(i * h + iy) * w + ix];
                    double acc = 0.0;
                    for (std::size_t o = 0; o < out_ch_; ++o)
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            long y = static_cast<long>(iy * s_ + ky) - static_cast<long>(p_);
                            if (y < 0 || y >= static_cast<long>(out_h_)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                long x = static_cast<long>(ix * s_ + kx) - static_cast<long>(p_);
                                if (x < 0 || x >= static_cast<long>(out_w_)) continue;
                                double g = grad_out.data[(o * out_h_ + y) * out_w_ + x];
                                std::size_t w_idx = ((i * out_ch_ + o) * k_ + ky) * k_ + kx;
                                acc += g * weight_.data[w_idx];
                                grad_weight_.data[w_idx] += g * in_v;
                            }
                        }
                    grad_in.data[(i * h + iy) * w + ix] = acc;
                }
        return grad_in;
    }

    std::vector<Tensor*> parameters() override { return {&weight_, &bias_}; }
    std::vector<Tensor*> gradients() override { return {&grad_weight_, &grad_bias_}; }

    void init_params(Rng& rng) override {
        double bound = 1.0 / std::sqrt(static_cast<double>(in_ch_ * k_ * k_));
        uniform_init(weight_, bound, rng);
        uniform_init(bias_, bound, rng);
    }

private:
    std::size_t in_ch_, out_ch_, k_, s_, p_, op_;
    Tensor weight_, bias_, grad_weight_, grad_bias_;
    Tensor input_;
    std::size_t out_h_ = 0, out_w_ = 0;
};

/// Fully connected layer over 1-D inputs. Weight layout (out, in).
class Dense : public Layer {
public:
    Dense(std::size_t in, std::size_t out)
        : in_(in), out_(out), weight_({out, in}), bias_({out}), grad_weight_({out, in}),
          grad_bias_({out}) {}

    std::string spec_line() const override {
        return "dense " + std::to_string(in_) + ' ' + std::to_string(out_);
    }

    Tensor forward(const Tensor& input) override {
        if (input.shape.size() != 1 || input.shape[0] != in_)
            throw Error("dense: expected input of length " + std::to_string(in_));
        input_ = input;
        Tensor out({out_});
        for (std::size_t o = 0; o < out_; ++o) {
            double acc = bias_.data[o];
            const double* wr = weight_.data.data() + o * in_;
            for (std::size_t i = 0; i < in_; ++i) acc += wr[i] * input.data[i];
            out.data[o] = acc;
        }
        return out;
    }

    Tensor backward(const Tensor& grad_out) override {
        if (input_.shape.empty()) throw Error("dense: backward before forward");
        Tensor grad_in({in_});
        for (std::size_t o = 0; o < out_; ++o) {
            double g = grad_out.data[o];
            grad_bias_.data[o] += g;
            const double* wr = weight_.data.data() + o * in_;
            double* gw = grad_weight_.data.data() + o * in_;
            for (std::size_t i = 0; i < in_; ++i) {
                gw[i] += g * input_.data[i];
                grad_in.data[i] += g * wr[i];
            }
        }
        return grad_in;
    }

    std::vector<Tensor*> parameters() override { return {&weight_, &bias_}; }
    std::vector<Tensor*> gradients() override { return {&grad_weight_, &grad_bias_}; }

    void init_params(Rng& rng) override {
        double bound = 1.0 / std::sqrt(static_cast<double>(in_));
        uniform_init(weight_, bound, rng);
        uniform_init(bias_, bound, rng);
    }

private:
    std::size_t in_, out_;
    Tensor weight_, bias_, grad_weight_, grad_bias_;
    Tensor input_;
};

class ReLU : public Layer {
public:
    std::string spec_line() const override { return "relu"; }
    Tensor forward(const Tensor& input) override {
        input_ = input;
        Tensor out = input;
        for (double& v : out.data) v = v > 0.0 ? v : 0.0;
        return out;
    }
    Tensor backward(const Tensor& grad_out) override {
        if (input_.shape.empty()) throw Error("relu: backward before forward");
        Tensor grad_in = grad_out;
        for (std::size_t i = 0; i < grad_in.data.size(); ++i)
            if (input_.data[i] <= 0.0) grad_in.data[i] = 0.0;
        return grad_in;
    }

private:
    Tensor input_;
};

class Tanh : public Layer {
public:
    std::string spec_line() const override { return "tanh"; }
    Tensor forward(const Tensor& input) override {
        Tensor out = input;
        for (double& v : out.data) v = std::tanh(v);
        output_ = out;
        return out;
    }
    Tensor backward(const Tensor& grad_out) override {
        if (output_.shape.empty()) throw Error("tanh: backward before forward");
        Tensor grad_in = grad_out;
        for (std::size_t i = 0; i < grad_in.data.size(); ++i)
            grad_in.data[i] *= 1.0 - output_.data[i] * output_.data[i];
        return grad_in;
    }

private:
    Tensor output_;
};

class Flatten : public Layer {
public:
    std::string spec_line() const override { return "flatten"; }
    Tensor forward(const Tensor& input) override {
        in_shape_ = input.shape;
        Tensor out = input;
        out.shape = {input.numel()};
        return out;
    }
    Tensor backward(const Tensor& grad_out) override {
        if (in_shape_.empty()) throw Error("flatten: backward before forward");
        Tensor grad_in = grad_out;
        grad_in.shape = in_shape_;
        return grad_in;
    }

private:
    std::vector<std::size_t> in_shape_;
};

/// Ordered layer stack. `encoder_layers` marks how many leading layers form
/// an encoder whose (flattened) output is the latent code; 0 means none.
class Network {
public:
    std::vector<std::unique_ptr<Layer>> layers;
    std::size_t encoder_layers = 0;
    std::uint64_t init_seed = 0;
    std::uint64_t train_steps = 0;

    Network() = default;
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;

    void add(std::unique_ptr<Layer> layer) { layers.push_back(std::move(layer)); }

    void init(std::uint64_t seed) {
        init_seed = seed;
        train_steps = 0;
        Rng rng(seed);
        for (auto& l : layers) l->init_params(rng);
    }

    Tensor forward(const Tensor& input) {
        Tensor t = input;
        for (auto& l : layers) t = l->forward(t);
        return t;
    }

    /// Forward pass recording the shape after every layer (input shape
    /// first).
    std::vector<std::vector<std::size_t>> forward_trace(const Tensor& input) {
        std::vector<std::vector<std::size_t>> shapes{input.shape};
        Tensor t = input;
        for (auto& l : layers) {
            t = l->forward(t);
            shapes.push_back(t.shape);
        }
        return shapes;
    }

    Tensor backward(const Tensor& grad_out) {
        Tensor g = grad_out;
        for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = (*it)->backward(g);
        return g;
    }

    /// Run the encoder prefix only and flatten the result.
    Tensor encode(const Tensor& input) {
        if (encoder_layers == 0 || encoder_layers > layers.size())
            throw Error("network: no encoder prefix defined");
        Tensor t = input;
        for (std::size_t i = 0; i < encoder_layers; ++i) t = layers[i]->forward(t);
        t.shape = {t.numel()};
        return t;
    }

    std::vector<Tensor*> parameters() {
        std::vector<Tensor*> out;
        for (auto& l : layers)
            for (Tensor* t : l->parameters()) out.push_back(t);
        return out;
    }
    std::vector<Tensor*> gradients() {
        std::vector<Tensor*> out;
        for (auto& l : layers)
            for (Tensor* t : l->gradients()) out.push_back(t);
        return out;
    }
    void zero_grad() {
        for (Tensor* g : gradients()) g->fill(0.0);
    }
    std::size_t parameter_count() {
        std::size_t n = 0;
        for (Tensor* p : parameters()) n += p->numel();
        return n;
    }
};

/// Convolutional autoencoder over 1x220x220 inputs: encoder strides the
/// image down to a 32x8x8 block (2048 latent values), the decoder mirrors
/// it back up. Final activation Tanh, everything else ReLU.
inline Network build_cae() {
    Network net;
    net.add(std::make_unique<Conv2d>(1, 8, 5, 3));
    net.add(std::make_unique<ReLU>());
    net.add(std::make_unique<Conv2d>(8, 16, 3, 3));
    net.add(std::make_unique<ReLU>());
    net.add(std::make_unique<Conv2d>(16, 32, 3, 3));
    net.add(std::make_unique<ReLU>());
    net.add(std::make_unique<TConv2d>(32, 16, 3, 3));
    net.add(std::make_unique<ReLU>());
    net.add(std::make_unique<TConv2d>(16, 8, 3, 3));
    net.add(std::make_unique<ReLU>());
    // (72-1)*3 + 5 = 218; output_padding 2 reaches the 220 input size
    net.add(std::make_unique<TConv2d>(8, 1, 5, 3, 0, 2));
    net.add(std::make_unique<Tanh>());
    net.encoder_layers = 6;
    return net;
}

inline constexpr std::size_t kLatentSize = 2048;

/// Multi-label classifier head over the latent code; raw logits out (the
/// loss applies the sigmoid).
inline Network build_classifier(std::size_t num_labels) {
    if (num_labels < 2) throw Error("build_classifier: need at least 2 labels");
    Network net;
    net.add(std::make_unique<Dense>(kLatentSize, 1050));
    net.add(std::make_unique<ReLU>());
    net.add(std::make_unique<Dense>(1050, num_labels));
    return net;
}

/// Shape-parameter regressor head over the latent code; linear output.
inline Network build_regressor(std::size_t out_dim) {
    if (out_dim < 1) throw Error("build_regressor: out_dim must be >= 1");
    Network net;
    net.add(std::make_unique<Dense>(kLatentSize, 1500));
    net.add(std::make_unique<ReLU>());
    net.add(std::make_unique<Dense>(1500, out_dim));
    return net;
}

}  // namespace meshrecon
