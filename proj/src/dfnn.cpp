#include "rgs/dfnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_factories.hpp"

namespace rgs {

using nlohmann::json;

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-7;

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

Activation parse_activation(const std::string& token) {
    if (token == "Relu") return Activation::Relu;
    if (token == "Sigmoid") return Activation::Sigmoid;
    if (token == "Softmax") return Activation::Softmax;
    if (token == "Tanh") return Activation::Tanh;
    throw DataError("unknown activation token: " + token);
}

Initializer parse_initializer(const std::string& token) {
    if (token == "Constant") return Initializer::Constant;
    if (token == "Glorot_normal") return Initializer::GlorotNormal;
    if (token == "Glorot_uniform") return Initializer::GlorotUniform;
    if (token == "He_normal") return Initializer::HeNormal;
    if (token == "He_uniform") return Initializer::HeUniform;
    throw DataError("unknown initializer token: " + token);
}

OptimizerKind parse_optimizer(const std::string& token) {
    if (token == "SGD") return OptimizerKind::SGD;
    if (token == "Adam") return OptimizerKind::Adam;
    if (token == "Adagrad") return OptimizerKind::Adagrad;
    if (token == "Nadam") return OptimizerKind::Nadam;
    if (token == "Adamax") return OptimizerKind::Adamax;
    throw DataError("unknown optimizer token: " + token);
}

NetworkConfig NetworkConfig::from_hypes(const Hypes& h, std::size_t input_width) {
    NetworkConfig c;
    c.input_width = input_width;
    c.epochs = static_cast<std::size_t>(h.integer("epochs"));
    c.batch_size = static_cast<std::size_t>(h.integer("batch_size"));
    c.learning_rate = h.num("learning_rate");
    c.dropout_rate = h.num("dropout_rate");
    c.momentum = h.num("momentum");
    c.decay = h.num("decay");
    c.l1_weight = h.num("l1_weight");
    c.l2_weight = h.num("l2_weight");
    c.n_hidden_layers = static_cast<std::size_t>(h.integer("n_hidden_layers"));
    c.n_hidden_nodes = static_cast<std::size_t>(h.integer("n_hidden_nodes"));
    c.optimizer = parse_optimizer(h.token("optimizer"));
    c.initializer = parse_initializer(h.token("initializer"));
    c.input_activation = parse_activation(h.token("input_activation"));
    c.hidden_activation = parse_activation(h.token("hidden_activation"));
    return c;
}

Activation NetworkConfig::activation_of(std::size_t layer) const {
    if (layer == 0) return input_activation;
    if (layer < n_hidden_layers) return hidden_activation;
    return Activation::Sigmoid; // output
}

OptimizerState OptimizerState::for_network(const Network& net) {
    OptimizerState s;
    for (const auto& l : net.layers) {
        s.first.push_back(LayerParams::zeros(l.in, l.out));
        s.second.push_back(LayerParams::zeros(l.in, l.out));
    }
    return s;
}

Network initialize(const NetworkConfig& config, std::uint64_t seed) {
    Network net;
    Rng rng(derive_seed(seed, 0xd1e7));
    std::size_t in = config.input_width;
    for (std::size_t layer = 0; layer <= config.n_hidden_layers; ++layer) {
        const std::size_t out = layer == config.n_hidden_layers ? 1 : config.n_hidden_nodes;
        LayerParams l = LayerParams::zeros(in, out);
        const double fan_in = static_cast<double>(in);
        const double fan_out = static_cast<double>(out);
        for (auto& w : l.w) {
            switch (config.initializer) {
                case Initializer::Constant:
                    w = 0.0;
                    break;
                case Initializer::GlorotUniform: {
                    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
                    w = rng.uniform(-bound, bound);
                    break;
                }
                case Initializer::GlorotNormal:
                    w = rng.normal() * std::sqrt(2.0 / (fan_in + fan_out));
                    break;
                case Initializer::HeNormal:
                    w = rng.normal() * std::sqrt(2.0 / fan_in);
                    break;
                case Initializer::HeUniform: {
                    const double bound = std::sqrt(6.0 / fan_in);
                    w = rng.uniform(-bound, bound);
                    break;
                }
            }
        }
        net.layers.push_back(std::move(l));
        in = out;
    }
    return net;
}

namespace {

void apply_activation(Activation act, std::span<const double> z, std::vector<double>& a) {
    a.resize(z.size());
    switch (act) {
        case Activation::Relu:
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0 ? z[i] : 0.0;
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = sigmoid(z[i]);
            break;
        case Activation::Tanh:
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = std::tanh(z[i]);
            break;
        case Activation::Softmax: {
            double m = z[0];
            for (double v : z) m = std::max(m, v);
            double sum = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                a[i] = std::exp(z[i] - m);
                sum += a[i];
            }
            for (auto& v : a) v /= sum;
            break;
        }
    }
}

} // namespace

ForwardCache forward(const Network& net, const NetworkConfig& config,
                     std::span<const double> x, bool training, Rng* rng) {
    if (x.size() != config.input_width)
        throw DataError("input width " + std::to_string(x.size()) + " does not match network input " +
                        std::to_string(config.input_width));
    ForwardCache cache;
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t layer = 0; layer < net.layers.size(); ++layer) {
        const auto& l = net.layers[layer];
        std::vector<double> z(l.out, 0.0);
        for (std::size_t o = 0; o < l.out; ++o) {
            double s = l.b[o];
            const double* wrow = &l.w[o * l.in];
            for (std::size_t i = 0; i < l.in; ++i) s += wrow[i] * cur[i];
            z[o] = s;
        }
        for (double v : z)
            if (!std::isfinite(v))
                throw NumericError("non-finite pre-activation at layer " +
                                   std::to_string(layer));
        std::vector<double> a;
        apply_activation(config.activation_of(layer), z, a);

        std::vector<double> mask;
        const bool hidden = layer < config.n_hidden_layers;
        if (training && hidden && config.dropout_rate > 0.0) {
            mask.resize(a.size());
            const double keep_scale = 1.0 / (1.0 - config.dropout_rate);
            for (std::size_t i = 0; i < a.size(); ++i) {
                mask[i] = rng->real01() >= config.dropout_rate ? keep_scale : 0.0;
                a[i] *= mask[i];
            }
        }
        cache.z.push_back(std::move(z));
        cache.dropout_mask.push_back(std::move(mask));
        cur = a;
        cache.a.push_back(std::move(a));
    }
    cache.output = cache.a.back()[0];
    return cache;
}

double dfnn_loss(const Network& net, const NetworkConfig& config,
                 std::span<const std::vector<double>> rows,
                 std::span<const std::uint8_t> labels) {
    double loss = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ForwardCache c = forward(net, config, rows[i], false, nullptr);
        const double z = c.z.back()[0];
        loss += std::max(z, 0.0) - z * labels[i] + std::log1p(std::exp(-std::abs(z)));
    }
    loss /= static_cast<double>(rows.size());
    for (const auto& l : net.layers) {
        for (double w : l.w)
            loss += config.l1_weight * std::abs(w) + config.l2_weight * w * w;
    }
    return loss;
}

std::vector<LayerParams> backward(const Network& net, const NetworkConfig& config,
                                  std::span<const std::vector<double>> rows,
                                  std::span<const std::uint8_t> labels,
                                  std::span<const ForwardCache> caches) {
    std::vector<LayerParams> grads;
    for (const auto& l : net.layers) grads.push_back(LayerParams::zeros(l.in, l.out));
    const double inv_batch = 1.0 / static_cast<double>(rows.size());

    for (std::size_t c = 0; c < rows.size(); ++c) {
        const ForwardCache& cache = caches[c];
        // delta at the output pre-activation: sigmoid + BCE collapse
        std::vector<double> delta = {(cache.output - labels[c]) * inv_batch};
        for (std::size_t layer = net.layers.size(); layer-- > 0;) {
            const auto& l = net.layers[layer];
            const std::vector<double>& input =
                layer == 0 ? rows[c] : cache.a[layer - 1];
            auto& g = grads[layer];
            for (std::size_t o = 0; o < l.out; ++o) {
                const double d = delta[o];
                g.b[o] += d;
                double* grow = &g.w[o * l.in];
                for (std::size_t i = 0; i < l.in; ++i) grow[i] += d * input[i];
            }
            if (layer == 0) break;

            // push delta through the weights to the previous activation
            std::vector<double> da(l.in, 0.0);
            for (std::size_t o = 0; o < l.out; ++o) {
                const double d = delta[o];
                const double* wrow = &l.w[o * l.in];
                for (std::size_t i = 0; i < l.in; ++i) da[i] += d * wrow[i];
            }
            const std::size_t prev = layer - 1;
            if (!cache.dropout_mask[prev].empty())
                for (std::size_t i = 0; i < da.size(); ++i)
                    da[i] *= cache.dropout_mask[prev][i];

            // then through the previous layer's activation
            const Activation act = config.activation_of(prev);
            std::vector<double> dz(da.size());
            switch (act) {
                case Activation::Relu:
                    for (std::size_t i = 0; i < da.size(); ++i)
                        dz[i] = cache.z[prev][i] > 0 ? da[i] : 0.0;
                    break;
                case Activation::Sigmoid:
                    for (std::size_t i = 0; i < da.size(); ++i) {
                        const double s = sigmoid(cache.z[prev][i]);
                        dz[i] = da[i] * s * (1.0 - s);
                    }
                    break;
                case Activation::Tanh:
                    for (std::size_t i = 0; i < da.size(); ++i) {
                        const double t = std::tanh(cache.z[prev][i]);
                        dz[i] = da[i] * (1.0 - t * t);
                    }
                    break;
                case Activation::Softmax: {
                    // s_i (da_i - sum_j da_j s_j); recover s from z directly
                    std::vector<double> s;
                    apply_activation(Activation::Softmax, cache.z[prev], s);
                    double dot = 0.0;
                    for (std::size_t i = 0; i < da.size(); ++i) dot += da[i] * s[i];
                    for (std::size_t i = 0; i < da.size(); ++i)
                        dz[i] = s[i] * (da[i] - dot);
                    break;
                }
            }
            delta = std::move(dz);
        }
    }

    if (config.l1_weight > 0.0 || config.l2_weight > 0.0) {
        for (std::size_t layer = 0; layer < net.layers.size(); ++layer) {
            const auto& l = net.layers[layer];
            auto& g = grads[layer];
            for (std::size_t i = 0; i < l.w.size(); ++i) {
                const double w = l.w[i];
                const double sign = w > 0 ? 1.0 : (w < 0 ? -1.0 : 0.0);
                g.w[i] += config.l1_weight * sign + 2.0 * config.l2_weight * w;
            }
        }
    }
    return grads;
}

double epoch_learning_rate(const NetworkConfig& config, std::size_t epoch) {
    return config.learning_rate / (1.0 + config.decay * static_cast<double>(epoch));
}

void optimizer_step(OptimizerState& state, const NetworkConfig& config, Network& net,
                    const std::vector<LayerParams>& grads) {
    state.step += 1;
    const double lr = state.epoch_lr >= 0.0 ? state.epoch_lr : config.learning_rate;
    const auto t = static_cast<double>(state.step);

    auto update = [&](double& w, double g, double& acc1, double& acc2) {
        switch (config.optimizer) {
            case OptimizerKind::SGD: {
                acc1 = config.momentum * acc1 - lr * g;
                w += acc1;
                break;
            }
            case OptimizerKind::Adagrad: {
                acc1 += g * g;
                w -= lr * g / (std::sqrt(acc1) + kEpsilon);
                break;
            }
            case OptimizerKind::Adam: {
                acc1 = kBeta1 * acc1 + (1.0 - kBeta1) * g;
                acc2 = kBeta2 * acc2 + (1.0 - kBeta2) * g * g;
                const double mh = acc1 / (1.0 - std::pow(kBeta1, t));
                const double vh = acc2 / (1.0 - std::pow(kBeta2, t));
                w -= lr * mh / (std::sqrt(vh) + kEpsilon);
                break;
            }
            case OptimizerKind::Adamax: {
                acc1 = kBeta1 * acc1 + (1.0 - kBeta1) * g;
                acc2 = std::max(kBeta2 * acc2, std::abs(g));
                w -= lr / (1.0 - std::pow(kBeta1, t)) * acc1 / (acc2 + kEpsilon);
                break;
            }
            case OptimizerKind::Nadam: {
                acc1 = kBeta1 * acc1 + (1.0 - kBeta1) * g;
                acc2 = kBeta2 * acc2 + (1.0 - kBeta2) * g * g;
                const double mh = acc1 / (1.0 - std::pow(kBeta1, t + 1.0));
                const double gh = g / (1.0 - std::pow(kBeta1, t));
                const double vh = acc2 / (1.0 - std::pow(kBeta2, t));
                w -= lr * (kBeta1 * mh + (1.0 - kBeta1) * gh) / (std::sqrt(vh) + kEpsilon);
                break;
            }
        }
    };

    for (std::size_t layer = 0; layer < net.layers.size(); ++layer) {
        auto& l = net.layers[layer];
        const auto& g = grads[layer];
        auto& a1 = state.first[layer];
        auto& a2 = state.second[layer];
        for (std::size_t i = 0; i < l.w.size(); ++i) update(l.w[i], g.w[i], a1.w[i], a2.w[i]);
        for (std::size_t i = 0; i < l.b.size(); ++i) update(l.b[i], g.b[i], a1.b[i], a2.b[i]);
    }
}

Network train_network(const NetworkConfig& config,
                      std::span<const std::vector<double>> rows,
                      std::span<const std::uint8_t> labels, std::uint64_t seed) {
    if (rows.empty()) throw DataError("empty training data");
    if (config.batch_size > rows.size())
        throw DataError("batch size " + std::to_string(config.batch_size) +
                        " exceeds " + std::to_string(rows.size()) + " training cases");

    Network net = initialize(config, derive_seed(seed, 0x1417));
    OptimizerState state = OptimizerState::for_network(net);
    Rng rng(derive_seed(seed, 0x7247));

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<double>> batch_rows;
    std::vector<std::uint8_t> batch_labels;
    std::vector<ForwardCache> caches;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        state.epoch_lr = epoch_learning_rate(config, epoch);
        rng.shuffle(order);
        for (std::size_t at = 0; at < order.size(); at += config.batch_size) {
            const std::size_t end = std::min(at + config.batch_size, order.size());
            batch_rows.clear();
            batch_labels.clear();
            caches.clear();
            for (std::size_t k = at; k < end; ++k) {
                batch_rows.push_back(rows[order[k]]);
                batch_labels.push_back(labels[order[k]]);
            }
            for (const auto& row : batch_rows)
                caches.push_back(forward(net, config, row, true, &rng));
            const auto grads = backward(net, config, batch_rows, batch_labels, caches);
            optimizer_step(state, config, net, grads);
        }
    }
    for (const auto& l : net.layers)
        for (double w : l.w)
            if (!std::isfinite(w)) throw NumericError("training diverged to non-finite weights");
    return net;
}

namespace {

class DfnnModel : public Model {
public:
    NetworkConfig config;
    Network net;

    double score(std::span<const double> row) const override {
        return forward(net, config, row, false, nullptr).output;
    }
    std::size_t input_width() const override { return config.input_width; }
    const char* kind() const override { return "dfnn"; }
    json params_json() const override {
        json j;
        j["input_width"] = config.input_width;
        j["n_hidden_layers"] = config.n_hidden_layers;
        j["n_hidden_nodes"] = config.n_hidden_nodes;
        j["input_activation"] = static_cast<int>(config.input_activation);
        j["hidden_activation"] = static_cast<int>(config.hidden_activation);
        j["layers"] = json::array();
        for (const auto& l : net.layers) {
            json jl;
            jl["in"] = l.in;
            jl["out"] = l.out;
            jl["w"] = l.w;
            jl["b"] = l.b;
            j["layers"].push_back(jl);
        }
        return j;
    }
};

} // namespace

std::shared_ptr<const Model> make_dfnn_model(const NetworkConfig& config, Network net) {
    auto m = std::make_shared<DfnnModel>();
    m->config = config;
    m->net = std::move(net);
    return m;
}

std::shared_ptr<const Model> fit_dfnn(const Hypes& h, const Dataset& d, std::uint64_t seed) {
    const EncodedMatrix X = encode(d, EncodeMode::OneHot);
    const NetworkConfig config = NetworkConfig::from_hypes(h, X.width);
    Network net = train_network(config, X.rows, d.outcomes(), seed);
    return make_dfnn_model(config, std::move(net));
}

namespace detail {

std::shared_ptr<const Model> dfnn_from_json(const json& j) {
    auto m = std::make_shared<DfnnModel>();
    m->config.input_width = j.at("input_width").get<std::size_t>();
    m->config.n_hidden_layers = j.at("n_hidden_layers").get<std::size_t>();
    m->config.n_hidden_nodes = j.at("n_hidden_nodes").get<std::size_t>();
    m->config.input_activation =
        static_cast<Activation>(j.at("input_activation").get<int>());
    m->config.hidden_activation =
        static_cast<Activation>(j.at("hidden_activation").get<int>());
    for (const auto& jl : j.at("layers")) {
        LayerParams l;
        l.in = jl.at("in").get<std::size_t>();
        l.out = jl.at("out").get<std::size_t>();
        l.w = jl.at("w").get<std::vector<double>>();
        l.b = jl.at("b").get<std::vector<double>>();
        m->net.layers.push_back(std::move(l));
    }
    return m;
}

} // namespace detail

} // namespace rgs
