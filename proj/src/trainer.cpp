#include "nn2rules/trainer.hpp"

#include <cmath>
#include <numeric>

#include "nn2rules/error.hpp"
#include "nn2rules/random.hpp"

namespace nn2rules {

namespace {

/// log(1 + exp(-z)) for y = 1, log(1 + exp(z)) for y = 0, without overflow.
double bce_with_logit(double z, Label y) {
    const double t = y ? -z : z;
    return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

struct Workspace {
    std::vector<std::vector<double>> activations; // input to each layer
    std::vector<std::vector<double>> pre;         // pre-activation of each layer
    std::vector<std::vector<double>> delta;
};

/// Adds the gradient of one sample's loss into grads; returns the loss.
double backprop(const std::vector<Layer>& layers, std::span<const double> x, Label y,
                Workspace& ws, Gradients& grads) {
    const std::size_t L = layers.size();
    ws.activations.resize(L);
    ws.pre.resize(L);
    ws.delta.resize(L);
    ws.activations[0].assign(x.begin(), x.end());
    for (std::size_t k = 0; k < L; ++k) {
        const auto& l = layers[k];
        auto& y_k = ws.pre[k];
        y_k.resize(l.outputs);
        const auto& in = ws.activations[k];
        for (std::size_t o = 0; o < l.outputs; ++o) {
            double s = 0.0;
            const double* row = l.weights.data() + o * l.inputs;
            for (std::size_t i = 0; i < l.inputs; ++i) s += row[i] * in[i];
            y_k[o] = s + l.biases[o];
        }
        if (k + 1 < L) {
            auto& next = ws.activations[k + 1];
            next.resize(l.outputs);
            for (std::size_t o = 0; o < l.outputs; ++o) next[o] = y_k[o] > 0.0 ? y_k[o] : 0.0;
        }
    }
    const double z = ws.pre[L - 1][0];
    const double loss = bce_with_logit(z, y);

    ws.delta[L - 1].assign(1, sigmoid(z) - static_cast<double>(y));
    for (std::size_t k = L; k-- > 0;) {
        const auto& l = layers[k];
        const auto& d = ws.delta[k];
        const auto& in = ws.activations[k];
        auto& gw = grads.weights[k];
        auto& gb = grads.biases[k];
        for (std::size_t o = 0; o < l.outputs; ++o) {
            if (d[o] == 0.0) continue;
            double* g = gw.data() + o * l.inputs;
            for (std::size_t i = 0; i < l.inputs; ++i) g[i] += d[o] * in[i];
            gb[o] += d[o];
        }
        if (k == 0) break;
        auto& prev = ws.delta[k - 1];
        prev.assign(l.inputs, 0.0);
        for (std::size_t o = 0; o < l.outputs; ++o) {
            if (d[o] == 0.0) continue;
            const double* row = l.weights.data() + o * l.inputs;
            for (std::size_t i = 0; i < l.inputs; ++i) prev[i] += d[o] * row[i];
        }
        // ReLU derivative, taken as 0 at y = 0.
        const auto& y_prev = ws.pre[k - 1];
        for (std::size_t i = 0; i < l.inputs; ++i)
            if (!(y_prev[i] > 0.0)) prev[i] = 0.0;
    }
    return loss;
}

Gradients zero_gradients(const std::vector<Layer>& layers) {
    Gradients g;
    for (const auto& l : layers) {
        g.weights.emplace_back(l.weights.size(), 0.0);
        g.biases.emplace_back(l.biases.size(), 0.0);
    }
    return g;
}

} // namespace

Network random_network(std::size_t input_width, std::span<const std::size_t> hidden_widths,
                       std::uint64_t seed) {
    if (input_width == 0) throw Error("network input width must be >= 1");
    Rng rng(seed);
    std::vector<Layer> layers;
    std::size_t inputs = input_width;
    std::vector<std::size_t> widths(hidden_widths.begin(), hidden_widths.end());
    widths.push_back(1);
    for (std::size_t k = 0; k < widths.size(); ++k) {
        if (widths[k] == 0) throw Error("hidden widths must be >= 1");
        Layer l;
        l.inputs = inputs;
        l.outputs = widths[k];
        l.activation = k + 1 == widths.size() ? Activation::sigmoid : Activation::relu;
        const double limit = std::sqrt(6.0 / static_cast<double>(l.inputs + l.outputs));
        l.weights.resize(l.inputs * l.outputs);
        for (auto& w : l.weights) w = rng.uniform(-limit, limit);
        l.biases.assign(l.outputs, 0.0);
        inputs = l.outputs;
        layers.push_back(std::move(l));
    }
    return Network(std::move(layers));
}

Gradients loss_gradients(const Network& net, std::span<const std::vector<double>> inputs,
                         std::span<const Label> labels) {
    if (inputs.size() != labels.size() || inputs.empty())
        throw Error("loss_gradients: need a non-empty batch with one label per row");
    auto grads = zero_gradients(net.layers());
    Workspace ws;
    double loss = 0.0;
    for (std::size_t r = 0; r < inputs.size(); ++r)
        loss += backprop(net.layers(), inputs[r], labels[r], ws, grads);
    const double scale = 1.0 / static_cast<double>(inputs.size());
    for (auto& g : grads.weights)
        for (auto& v : g) v *= scale;
    for (auto& g : grads.biases)
        for (auto& v : g) v *= scale;
    grads.loss = loss * scale;
    return grads;
}

Network train_network(const Dataset& data, std::span<const std::size_t> hidden_widths,
                      const TrainOptions& options) {
    if (data.empty()) throw Error("train: empty dataset");
    if (options.batch_size == 0) throw Error("train: batch size must be >= 1");
    if (!(options.learning_rate > 0.0)) throw Error("train: learning rate must be > 0");

    const auto& schema = data.schema;
    std::vector<std::vector<double>> inputs;
    inputs.reserve(data.size());
    for (const auto& inst : data.instances) inputs.push_back(encode_one_hot(inst, schema));

    auto init = random_network(schema.one_hot_width(), hidden_widths, options.seed);
    std::vector<Layer> layers = init.layers();

    Rng rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Workspace ws;
    auto grads = zero_gradients(layers);

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t end = std::min(order.size(), start + options.batch_size);
            for (auto& g : grads.weights) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : grads.biases) std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t r = start; r < end; ++r)
                epoch_loss += backprop(layers, inputs[order[r]], data.labels[order[r]], ws, grads);
            const double step = options.learning_rate / static_cast<double>(end - start);
            for (std::size_t k = 0; k < layers.size(); ++k) {
                for (std::size_t i = 0; i < layers[k].weights.size(); ++i)
                    layers[k].weights[i] -= step * grads.weights[k][i];
                for (std::size_t i = 0; i < layers[k].biases.size(); ++i)
                    layers[k].biases[i] -= step * grads.biases[k][i];
            }
        }
        if (!std::isfinite(epoch_loss))
            throw Error("train: loss diverged (non-finite) in epoch " + std::to_string(epoch) +
                        "; try a smaller learning rate");
    }
    return Network(std::move(layers));
}

double accuracy(const Network& net, const Dataset& data) {
    if (data.empty()) throw Error("accuracy: empty dataset");
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.size(); ++r)
        hits += net.predict(data.instances[r], data.schema) == data.labels[r];
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

} // namespace nn2rules
