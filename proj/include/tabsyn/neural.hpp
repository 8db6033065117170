#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tabsyn/errors.hpp"
#include "tabsyn/rng.hpp"

namespace tabsyn {

enum class Activation { Identity, ReLU, LeakyReLU, Tanh, Sigmoid, Softmax };

inline std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::ReLU: return "relu";
        case Activation::LeakyReLU: return "leaky_relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Softmax: return "softmax";
    }
    return "identity";
}

inline Activation activation_from_name(const std::string& s) {
    if (s == "identity") return Activation::Identity;
    if (s == "relu") return Activation::ReLU;
    if (s == "leaky_relu") return Activation::LeakyReLU;
    if (s == "tanh") return Activation::Tanh;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "softmax") return Activation::Softmax;
    throw Error("unknown activation '" + s + "'");
}

struct Layer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;     // out
    Activation activation = Activation::Identity;
    double leak = 0.2;        // LeakyReLU slope
};

// Plain fully connected network. Batches are row-major: one sample per row,
// so a layer computes act(X * W^T + b^T).
class DenseNet {
public:
    DenseNet() = default;

    explicit DenseNet(std::vector<Layer> layers) : layers_(std::move(layers)) {
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const Layer& l = layers_[i];
            if (l.bias.size() != l.weights.rows())
                throw DimensionMismatch("layer " + std::to_string(i) + ": bias size " +
                                        std::to_string(l.bias.size()) + " vs weight rows " +
                                        std::to_string(l.weights.rows()));
            if (i > 0 && layers_[i - 1].weights.rows() != l.weights.cols())
                throw DimensionMismatch("layer " + std::to_string(i) + ": input dim " +
                                        std::to_string(l.weights.cols()) +
                                        " does not match previous output " +
                                        std::to_string(layers_[i - 1].weights.rows()));
            if (!l.weights.allFinite() || !l.bias.allFinite())
                throw Error("layer " + std::to_string(i) + ": non-finite parameters");
        }
    }

    // Glorot-uniform initialisation: weights in +-sqrt(6/(fan_in+fan_out)).
    static DenseNet glorot(const std::vector<std::size_t>& dims,
                           const std::vector<Activation>& activations, Rng& rng,
                           double leak = 0.2) {
        if (dims.size() < 2 || activations.size() != dims.size() - 1)
            throw DimensionMismatch("glorot: need dims.size()-1 activations");
        std::vector<Layer> layers;
        for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
            const auto in = static_cast<Eigen::Index>(dims[i]);
            const auto out = static_cast<Eigen::Index>(dims[i + 1]);
            const double bound = std::sqrt(6.0 / static_cast<double>(dims[i] + dims[i + 1]));
            Layer l;
            l.weights = Eigen::MatrixXd(out, in);
            for (Eigen::Index r = 0; r < out; ++r)
                for (Eigen::Index c = 0; c < in; ++c)
                    l.weights(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
            l.bias = Eigen::VectorXd::Zero(out);
            l.activation = activations[i];
            l.leak = leak;
            layers.push_back(std::move(l));
        }
        return DenseNet(std::move(layers));
    }

    std::size_t input_dim() const { return static_cast<std::size_t>(layers_.front().weights.cols()); }
    std::size_t output_dim() const { return static_cast<std::size_t>(layers_.back().weights.rows()); }
    std::size_t n_layers() const { return layers_.size(); }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

private:
    std::vector<Layer> layers_;
};

namespace detail {

inline void apply_activation(Eigen::MatrixXd& z, Activation act, double leak) {
    switch (act) {
        case Activation::Identity:
            break;
        case Activation::ReLU:
            z = z.cwiseMax(0.0);
            break;
        case Activation::LeakyReLU:
            z = z.unaryExpr([leak](double v) { return v > 0.0 ? v : leak * v; });
            break;
        case Activation::Tanh:
            z = z.array().tanh().matrix();
            break;
        case Activation::Sigmoid:
            z = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
            break;
        case Activation::Softmax:
            for (Eigen::Index r = 0; r < z.rows(); ++r) {
                Eigen::RowVectorXd row = z.row(r);
                row.array() -= row.maxCoeff();
                row = row.array().exp();
                z.row(r) = row / row.sum();
            }
            break;
    }
}

}  // namespace detail

// Cached activations from one forward pass: z[i] is the pre-activation of
// layer i, y[i] the post-activation. Enough to run backward().
struct ForwardTape {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> post;
};

inline std::pair<Eigen::MatrixXd, ForwardTape> forward(const DenseNet& net,
                                                       const Eigen::MatrixXd& input) {
    if (static_cast<std::size_t>(input.cols()) != net.input_dim())
        throw DimensionMismatch("forward: input width " + std::to_string(input.cols()) +
                                ", network expects " + std::to_string(net.input_dim()));
    ForwardTape tape;
    tape.input = input;
    Eigen::MatrixXd x = input;
    for (const Layer& l : net.layers()) {
        Eigen::MatrixXd z = (x * l.weights.transpose()).rowwise() + l.bias.transpose();
        tape.pre.push_back(z);
        detail::apply_activation(z, l.activation, l.leak);
        tape.post.push_back(z);
        x = std::move(z);
    }
    return {x, std::move(tape)};
}

inline std::pair<Eigen::VectorXd, ForwardTape> forward(const DenseNet& net,
                                                       const Eigen::VectorXd& input) {
    auto [y, tape] = forward(net, Eigen::MatrixXd(input.transpose()));
    return {Eigen::VectorXd(y.row(0).transpose()), std::move(tape)};
}

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> bias;
    Eigen::MatrixXd input;  // gradient w.r.t. the forward input
};

// Exact reverse-mode gradients of the scalar loss whose output gradient is
// supplied. output_grad has the same shape as the forward output.
inline Gradients backward(const DenseNet& net, const ForwardTape& tape,
                          const Eigen::MatrixXd& output_grad) {
    const auto& layers = net.layers();
    if (tape.pre.size() != layers.size())
        throw DimensionMismatch("backward: tape does not match network depth");
    if (output_grad.rows() != tape.input.rows() ||
        static_cast<std::size_t>(output_grad.cols()) != net.output_dim())
        throw DimensionMismatch("backward: output gradient shape mismatch");

    Gradients g;
    g.weights.resize(layers.size());
    g.bias.resize(layers.size());

    Eigen::MatrixXd dy = output_grad;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const Layer& l = layers[i];
        const Eigen::MatrixXd& z = tape.pre[i];
        const Eigen::MatrixXd& y = tape.post[i];
        Eigen::MatrixXd dz;
        switch (l.activation) {
            case Activation::Identity:
                dz = dy;
                break;
            case Activation::ReLU:
                dz = dy.cwiseProduct(
                    z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
                break;
            case Activation::LeakyReLU:
                dz = dy.cwiseProduct(z.unaryExpr(
                    [leak = l.leak](double v) { return v > 0.0 ? 1.0 : leak; }));
                break;
            case Activation::Tanh:
                dz = dy.cwiseProduct((1.0 - y.array().square()).matrix());
                break;
            case Activation::Sigmoid:
                dz = dy.cwiseProduct((y.array() * (1.0 - y.array())).matrix());
                break;
            case Activation::Softmax: {
                dz.resizeLike(dy);
                for (Eigen::Index r = 0; r < dy.rows(); ++r) {
                    const double dot = dy.row(r).dot(y.row(r));
                    dz.row(r) = (dy.row(r).array() - dot) * y.row(r).array();
                }
                break;
            }
        }
        const Eigen::MatrixXd& x_in = (i == 0) ? tape.input : tape.post[i - 1];
        g.weights[i] = dz.transpose() * x_in;
        g.bias[i] = dz.colwise().sum().transpose();
        dy = dz * l.weights;
    }
    g.input = std::move(dy);
    return g;
}

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Adam with bias correction. Moment accumulators mirror the parameter
// shapes of the network they were built for.
class AdamState {
public:
    AdamState(const DenseNet& net, AdamConfig config) : config_(config) {
        for (const Layer& l : net.layers()) {
            m_w_.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
            v_w_.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
            m_b_.push_back(Eigen::VectorXd::Zero(l.bias.size()));
            v_b_.push_back(Eigen::VectorXd::Zero(l.bias.size()));
        }
    }

    const AdamConfig& config() const { return config_; }
    long step_count() const { return t_; }

    void step(DenseNet& net, const Gradients& grads) {
        auto& layers = net.layers();
        if (grads.weights.size() != layers.size() || m_w_.size() != layers.size())
            throw DimensionMismatch("adam: gradient/state layer count mismatch");
        ++t_;
        const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (grads.weights[i].rows() != layers[i].weights.rows() ||
                grads.weights[i].cols() != layers[i].weights.cols())
                throw DimensionMismatch("adam: gradient shape mismatch at layer " +
                                        std::to_string(i));
            update(m_w_[i], v_w_[i], grads.weights[i], layers[i].weights, bc1, bc2);
            update(m_b_[i], v_b_[i], grads.bias[i], layers[i].bias, bc1, bc2);
        }
    }

private:
    template <typename Mat>
    void update(Mat& m, Mat& v, const Mat& g, Mat& param, double bc1, double bc2) {
        m = config_.beta1 * m + (1.0 - config_.beta1) * g;
        v = config_.beta2 * v.array().matrix() + (1.0 - config_.beta2) * g.array().square().matrix();
        param.array() -= config_.learning_rate * (m.array() / bc1) /
                         ((v.array() / bc2).sqrt() + config_.epsilon);
    }

    AdamConfig config_;
    std::vector<Eigen::MatrixXd> m_w_, v_w_;
    std::vector<Eigen::VectorXd> m_b_, v_b_;
    long t_ = 0;
};

inline Eigen::VectorXd softmax(Eigen::VectorXd v) {
    v.array() -= v.maxCoeff();
    v = v.array().exp().matrix();
    return v / v.sum();
}

// Differentiable categorical relaxation: softmax((logits + gumbel)/tau).
// Output lies in the open simplex; tau -> 0 approaches one-hot sampling.
inline Eigen::VectorXd gumbel_softmax(const Eigen::VectorXd& logits, double tau, Rng& rng) {
    if (tau <= 0.0) throw Error("gumbel_softmax: temperature must be positive");
    Eigen::VectorXd pert(logits.size());
    for (Eigen::Index i = 0; i < logits.size(); ++i) pert[i] = (logits[i] + rng.gumbel()) / tau;
    return softmax(std::move(pert));
}

// Inverted-dropout mask: entries are 0 with probability `rate`, otherwise
// 1/(1-rate), so the expected masked activation equals the original.
inline Eigen::VectorXd dropout_mask(std::size_t width, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw Error("dropout_mask: rate must be in [0,1)");
    Eigen::VectorXd mask(static_cast<Eigen::Index>(width));
    const double keep_scale = 1.0 / (1.0 - rate);
    for (Eigen::Index i = 0; i < mask.size(); ++i)
        mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
    return mask;
}

}  // namespace tabsyn
