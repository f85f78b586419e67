#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nn2rules/dataset.hpp"
#include "nn2rules/network.hpp"

namespace nn2rules {

struct TrainOptions {
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::size_t epochs = 200;
    std::uint64_t seed = 42;
};

/// Glorot-uniform initialised ReLU/sigmoid network.
Network random_network(std::size_t input_width, std::span<const std::size_t> hidden_widths,
                       std::uint64_t seed);

/// Mini-batch gradient descent on mean binary cross-entropy. Single-threaded
/// and bit-reproducible for fixed (data, options).
Network train_network(const Dataset& data, std::span<const std::size_t> hidden_widths,
                      const TrainOptions& options = {});

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    double loss = 0.0;
};

/// Mean binary cross-entropy and its gradient over a batch of one-hot rows.
Gradients loss_gradients(const Network& net, std::span<const std::vector<double>> inputs,
                         std::span<const Label> labels);

double accuracy(const Network& net, const Dataset& data);

} // namespace nn2rules
