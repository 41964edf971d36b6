#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rgs/dataset.hpp"
#include "rgs/model.hpp"
#include "rgs/rng.hpp"
#include "rgs/space.hpp"

namespace rgs {

enum class Activation { Relu, Sigmoid, Softmax, Tanh };
enum class Initializer { Constant, GlorotNormal, GlorotUniform, HeNormal, HeUniform };
enum class OptimizerKind { SGD, Adam, Adagrad, Nadam, Adamax };

Activation parse_activation(const std::string& token);
Initializer parse_initializer(const std::string& token);
OptimizerKind parse_optimizer(const std::string& token);

struct NetworkConfig {
    std::size_t input_width = 0;
    std::size_t n_hidden_layers = 1;
    std::size_t n_hidden_nodes = 1;
    Activation input_activation = Activation::Relu;  // first hidden transform
    Activation hidden_activation = Activation::Relu; // subsequent hidden layers
    Initializer initializer = Initializer::GlorotUniform;
    OptimizerKind optimizer = OptimizerKind::SGD;
    double learning_rate = 0.01;
    double momentum = 0.0; // applies only under SGD
    double decay = 0.0;
    double dropout_rate = 0.0;
    double l1_weight = 0.0;
    double l2_weight = 0.0;
    std::size_t epochs = 1;
    std::size_t batch_size = 1;
    // output activation is sigmoid and the loss is binary cross-entropy

    static NetworkConfig from_hypes(const Hypes& h, std::size_t input_width);
    std::size_t n_layers() const { return n_hidden_layers + 1; }
    Activation activation_of(std::size_t layer) const;
};

// Dense layer parameters; also reused for gradient and accumulator tensors.
struct LayerParams {
    std::size_t in = 0, out = 0;
    std::vector<double> w; // row-major, out x in
    std::vector<double> b;

    static LayerParams zeros(std::size_t in, std::size_t out) {
        LayerParams l;
        l.in = in;
        l.out = out;
        l.w.assign(in * out, 0.0);
        l.b.assign(out, 0.0);
        return l;
    }
};

struct Network {
    std::vector<LayerParams> layers; // hidden... then the single output unit
};

struct ForwardCache {
    // per layer: pre-activation, activation (after dropout when training)
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> dropout_mask; // empty when not training
    double output = 0.5;
};

struct OptimizerState {
    std::vector<LayerParams> first;  // velocity / first moment / accumulator
    std::vector<LayerParams> second; // second moment / infinity norm
    std::uint64_t step = 0;
    double epoch_lr = -1.0; // negative = use the config's base rate

    static OptimizerState for_network(const Network& net);
};

Network initialize(const NetworkConfig& config, std::uint64_t seed);

// Single-case forward pass. When training, dropout masks come from `rng`.
ForwardCache forward(const Network& net, const NetworkConfig& config,
                     std::span<const double> x, bool training, Rng* rng);

// Gradient of mean binary cross-entropy over the batch plus the L1/L2
// penalty terms on weights (biases unpenalized).
std::vector<LayerParams> backward(const Network& net, const NetworkConfig& config,
                                  std::span<const std::vector<double>> rows,
                                  std::span<const std::uint8_t> labels,
                                  std::span<const ForwardCache> caches);

// Loss the backward pass differentiates; used by the gradient checks.
double dfnn_loss(const Network& net, const NetworkConfig& config,
                 std::span<const std::vector<double>> rows,
                 std::span<const std::uint8_t> labels);

void optimizer_step(OptimizerState& state, const NetworkConfig& config, Network& net,
                    const std::vector<LayerParams>& grads);

double epoch_learning_rate(const NetworkConfig& config, std::size_t epoch);

Network train_network(const NetworkConfig& config,
                      std::span<const std::vector<double>> rows,
                      std::span<const std::uint8_t> labels, std::uint64_t seed);

std::shared_ptr<const Model> fit_dfnn(const Hypes& h, const Dataset& d, std::uint64_t seed);

// Inference wrapper around a trained network.
std::shared_ptr<const Model> make_dfnn_model(const NetworkConfig& config, Network net);

} // namespace rgs
