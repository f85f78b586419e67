#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nn2rules/dataset.hpp"
#include "nn2rules/network.hpp"

namespace nn2rules {

struct TreeParams {
    std::size_t max_depth = 8;
    std::size_t min_leaf = 5;
};

/// Multiway categorical decision tree: an internal node has one child per
/// value of its split feature.
class DecisionTree {
public:
    static constexpr std::size_t leaf = static_cast<std::size_t>(-1);

    struct Node {
        std::size_t feature = leaf;
        Label label = 0;
        std::array<std::size_t, 2> counts{0, 0};
        std::vector<std::size_t> children;

        bool is_leaf() const { return feature == leaf; }
    };

    DecisionTree() = default;
    DecisionTree(FeatureSchema schema, std::vector<Node> nodes)
        : schema_(std::move(schema)), nodes_(std::move(nodes)) {}

    Label predict(const Instance& instance) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& root() const { return nodes_.front(); }
    std::size_t depth() const;
    std::size_t leaf_count() const;
    std::size_t positive_leaf_count() const;

    /// Indented text, one node per line.
    std::string to_text() const;

private:
    FeatureSchema schema_;
    std::vector<Node> nodes_;
};

/// Greedy Gini splits on the unused feature with the largest impurity drop
/// (first feature on ties, zero drop allowed). A node stays a leaf at
/// max_depth, when pure, or when no feature both separates the rows and gives
/// every non-empty child at least min_leaf rows. Leaves predict the majority
/// class (ties go to 0); empty children inherit their parent's majority.
DecisionTree train_tree(const FeatureSchema& schema, std::span<const Instance> instances,
                        std::span<const Label> labels, const TreeParams& params = {});

/// Tree trained on the network's predictions for the training rows.
DecisionTree trepan_lite(const Network& net, const Dataset& train, const TreeParams& params = {});

} // namespace nn2rules
