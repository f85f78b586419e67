#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nn2rules/dataset.hpp"

namespace nn2rules {

enum class Activation { relu, sigmoid };

std::string to_string(Activation activation);
Activation parse_activation(const std::string& name);

/// Dense layer, weights stored row-major (outputs x inputs).
struct Layer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;
    Activation activation = Activation::relu;

    double weight(std::size_t out, std::size_t in) const { return weights[out * inputs + in]; }
    std::span<const double> row(std::size_t out) const {
        return {weights.data() + out * inputs, inputs};
    }

    bool operator==(const Layer&) const = default;
};

struct ForwardResult {
    /// Pre-activations y^k for every layer, in order.
    std::vector<std::vector<double>> pre_activations;
    double probability = 0.0;

    double logit() const { return pre_activations.back().front(); }
};

/// Feed-forward binary classifier: ReLU hidden layers and one sigmoid output.
class Network {
public:
    Network() = default;
    /// Throws Error unless the layer stack is a valid ReLU/sigmoid classifier.
    explicit Network(std::vector<Layer> layers);

    std::size_t input_width() const { return layers_.front().inputs; }
    std::size_t hidden_layer_count() const { return layers_.size() - 1; }
    const std::vector<Layer>& layers() const { return layers_; }

    ForwardResult forward(std::span<const double> x) const;
    /// Final pre-activation only.
    double logit(std::span<const double> x) const;
    /// Class 1 iff the final pre-activation is >= 0.
    Label predict(std::span<const double> x) const;
    Label predict(const Instance& instance, const FeatureSchema& schema) const;

    bool operator==(const Network&) const = default;

private:
    std::vector<Layer> layers_;
};

Network make_network(const std::vector<std::vector<std::vector<double>>>& weights,
                     const std::vector<std::vector<double>>& biases);

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);
void save_weights(const std::filesystem::path& path, const Network& net);
Network load_weights(const std::filesystem::path& path);
/// Also rejects networks whose input width differs from the schema's one-hot width.
Network load_weights(const std::filesystem::path& path, const FeatureSchema& schema);

double sigmoid(double z);

} // namespace nn2rules
