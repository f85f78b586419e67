#include "nn2rules/network.hpp"

#include <cmath>

#include <json.hpp>

#include "nn2rules/error.hpp"
#include "text.hpp"

namespace nn2rules {

using nlohmann::json;

std::string to_string(Activation activation) {
    return activation == Activation::relu ? "relu" : "sigmoid";
}

Activation parse_activation(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    throw Error("unsupported activation '" + name + "'");
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw Error("network: no layers");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const auto& l = layers_[k];
        const auto where = "network layer " + std::to_string(k) + ": ";
        if (l.inputs == 0 || l.outputs == 0) throw Error(where + "zero width");
        if (k > 0 && l.inputs != layers_[k - 1].outputs)
            throw Error(where + "input width " + std::to_string(l.inputs) +
                        " does not match previous output width " +
                        std::to_string(layers_[k - 1].outputs));
        if (l.weights.size() != l.inputs * l.outputs || l.biases.size() != l.outputs)
            throw Error(where + "parameter shape mismatch");
        for (double w : l.weights)
            if (!std::isfinite(w)) throw Error(where + "non-finite weight");
        for (double b : l.biases)
            if (!std::isfinite(b)) throw Error(where + "non-finite bias");
        const bool last = k + 1 == layers_.size();
        if (last && (l.activation != Activation::sigmoid || l.outputs != 1))
            throw Error(where + "output layer must be a single sigmoid unit");
        if (!last && l.activation != Activation::relu)
            throw Error(where + "hidden layers must use relu");
    }
}

ForwardResult Network::forward(std::span<const double> x) const {
    if (x.size() != input_width())
        throw Error("forward: input width " + std::to_string(x.size()) + ", expected " +
                    std::to_string(input_width()));
    ForwardResult out;
    out.pre_activations.reserve(layers_.size());
    std::vector<double> input(x.begin(), x.end());
    for (const auto& l : layers_) {
        std::vector<double> y(l.outputs);
        for (std::size_t o = 0; o < l.outputs; ++o) {
            double s = 0.0;
            const auto row = l.row(o);
            for (std::size_t i = 0; i < l.inputs; ++i) s += row[i] * input[i];
            y[o] = s + l.biases[o];
        }
        input.resize(l.outputs);
        for (std::size_t o = 0; o < l.outputs; ++o) input[o] = y[o] > 0.0 ? y[o] : 0.0;
        out.pre_activations.push_back(std::move(y));
    }
    out.probability = sigmoid(out.logit());
    return out;
}

double Network::logit(std::span<const double> x) const { return forward(x).logit(); }

Label Network::predict(std::span<const double> x) const { return logit(x) >= 0.0 ? 1 : 0; }

Label Network::predict(const Instance& instance, const FeatureSchema& schema) const {
    return predict(encode_one_hot(instance, schema));
}

Network make_network(const std::vector<std::vector<std::vector<double>>>& weights,
                     const std::vector<std::vector<double>>& biases) {
    if (weights.size() != biases.size()) throw Error("make_network: layer count mismatch");
    std::vector<Layer> layers;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        Layer l;
        l.outputs = weights[k].size();
        l.inputs = l.outputs ? weights[k].front().size() : 0;
        for (const auto& row : weights[k]) {
            if (row.size() != l.inputs) throw Error("make_network: ragged weight matrix");
            l.weights.insert(l.weights.end(), row.begin(), row.end());
        }
        l.biases = biases[k];
        l.activation = k + 1 == weights.size() ? Activation::sigmoid : Activation::relu;
        layers.push_back(std::move(l));
    }
    return Network(std::move(layers));
}

std::string network_to_json(const Network& net) {
    json layers = json::array();
    for (const auto& l : net.layers()) {
        json rows = json::array();
        for (std::size_t o = 0; o < l.outputs; ++o) {
            auto r = l.row(o);
            rows.push_back(std::vector<double>(r.begin(), r.end()));
        }
        layers.push_back({{"weights", rows}, {"biases", l.biases}, {"activation", to_string(l.activation)}});
    }
    json doc = {{"input_width", net.input_width()}, {"layers", layers}};
    return doc.dump(1) + "\n";
}

Network network_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("weights: malformed JSON: ") + e.what());
    }
    try {
        const auto input_width = doc.at("input_width").get<std::size_t>();
        std::vector<Layer> layers;
        std::size_t inputs = input_width;
        for (const auto& jl : doc.at("layers")) {
            Layer l;
            l.activation = parse_activation(jl.at("activation").get<std::string>());
            const auto rows = jl.at("weights").get<std::vector<std::vector<double>>>();
            l.biases = jl.at("biases").get<std::vector<double>>();
            l.inputs = inputs;
            l.outputs = rows.size();
            for (const auto& row : rows) {
                if (row.size() != inputs)
                    throw Error("weights: layer " + std::to_string(layers.size()) +
                                " row width " + std::to_string(row.size()) + ", expected " +
                                std::to_string(inputs));
                l.weights.insert(l.weights.end(), row.begin(), row.end());
            }
            inputs = l.outputs;
            layers.push_back(std::move(l));
        }
        return Network(std::move(layers));
    } catch (const json::exception& e) {
        throw Error(std::string("weights: ") + e.what());
    }
}

void save_weights(const std::filesystem::path& path, const Network& net) {
    detail::write_file(path, network_to_json(net));
}

Network load_weights(const std::filesystem::path& path) {
    try {
        return network_from_json(detail::read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

Network load_weights(const std::filesystem::path& path, const FeatureSchema& schema) {
    auto net = load_weights(path);
    if (net.input_width() != schema.one_hot_width())
        throw Error(path.string() + ": input width " + std::to_string(net.input_width()) +
                    " does not match schema one-hot width " +
                    std::to_string(schema.one_hot_width()));
    return net;
}

} // namespace nn2rules
