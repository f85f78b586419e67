#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nn2rules/network.hpp"
#include "nn2rules/rules.hpp"
#include "nn2rules/schema.hpp"

namespace nn2rules {

/// Per-feature weights of a linear function, shifted so every bucket is
/// non-negative with minimum exactly 0 and sorted in descending order. Each
/// item remembers its original value index.
struct WeightBuckets {
    struct Item {
        ValueIndex value;
        double weight;
    };

    /// Feature of buckets[0]; buckets cover features first_feature..m-1.
    std::size_t first_feature = 0;
    std::vector<std::vector<Item>> buckets;
    double bias = 0.0;

    /// Canonical weight sum plus bias for an assignment of the covered features.
    double evaluate(std::span<const ValueIndex> values) const;
};

WeightBuckets canonicalize(const Behavior& behavior, const FeatureSchema& schema);

/// Canonical buckets of the behavior restricted to completions of `prefix`:
/// the prefix's weights move into the bias and only the free features remain.
WeightBuckets canonicalize_after(const Behavior& behavior, const FeatureSchema& schema,
                                 const Rule& prefix);

/// All minimal prefixes whose canonical weight sum S meets the threshold
/// (S >= threshold, or S > threshold when strict). Sums accumulate in feature
/// order. Rules are relative to buckets.first_feature and come back sorted.
std::vector<Rule> select_weights(const WeightBuckets& buckets, double threshold, bool strict);

/// Splits the space covered by the buckets by the sign of the canonical
/// function. `active` holds the minimal prefixes whose every completion has
/// value >= 0; `inactive` the minimal prefixes whose every completion is < 0.
/// Together they are a sorted, prefix-free cover.
struct SignSplit {
    std::vector<Rule> active;
    std::vector<Rule> inactive;
};

SignSplit split_by_sign(const WeightBuckets& buckets);

/// Rules where the ReLU of a first-layer neuron is active (annotated with the
/// neuron's own linear function) or inactive (annotated with zero).
NeuronRuleList lin_rule(const Behavior& behavior, const FeatureSchema& schema);

/// Inactive side computed by running select_weights on the negated function
/// with a strict threshold. Equal to lin_rule's inactive rules in exact
/// arithmetic; kept for differential checks.
std::vector<Rule> inactive_rules_by_negation(const Behavior& behavior,
                                             const FeatureSchema& schema);

/// Common refinement of several partitions. sources holds, for every output
/// rule, the index of the source entry in each input list (stride = list count).
struct MergedPartition {
    std::vector<Rule> rules;
    std::vector<std::uint32_t> sources;
    std::size_t list_count = 0;

    std::size_t size() const { return rules.size(); }
    std::span<const std::uint32_t> sources_of(std::size_t entry) const {
        return {sources.data() + entry * list_count, list_count};
    }
};

/// Pairwise two-pointer merges reduced tournament-style. Every input must be a
/// sorted prefix-free cover; violations throw InvariantViolation.
MergedPartition merge_partitions(std::span<const NeuronRuleList> lists,
                                 const FeatureSchema& schema);

/// sum_j coefficients[j] * behavior_j + bias, accumulated left to right.
Behavior combine_behaviors(std::span<const NeuronRuleList> lists,
                           std::span<const std::uint32_t> sources,
                           std::span<const double> coefficients, double bias,
                           std::size_t width);

NeuronRuleList merge_rule_lists(std::span<const NeuronRuleList> lists,
                                std::span<const double> coefficients, double bias,
                                const FeatureSchema& schema);

enum class NeuronRuleStrategy {
    /// Substitute each precondition into the combined behavior and split the
    /// remaining features only.
    restricted,
    /// Split the full combined behavior, then conjoin every produced rule with
    /// the precondition.
    literal,
};

NeuronRuleList neuron_rule(std::span<const double> weights, double bias,
                           std::span<const NeuronRuleList> inputs, const FeatureSchema& schema,
                           NeuronRuleStrategy strategy = NeuronRuleStrategy::restricted);

/// neuron_rule over an already merged input partition.
NeuronRuleList neuron_rule(std::span<const double> weights, double bias,
                           std::span<const NeuronRuleList> inputs, const MergedPartition& merged,
                           const FeatureSchema& schema, NeuronRuleStrategy strategy);

struct ExtractOptions {
    NeuronRuleStrategy strategy = NeuronRuleStrategy::restricted;
    /// Worker threads for the neurons of one layer; 0 or 1 runs inline.
    unsigned threads = 1;
    /// Called with every hidden neuron's list (layer is 0-based).
    std::function<void(std::size_t layer, std::size_t neuron, const NeuronRuleList&)> on_neuron;
    /// Called with the merged input partition of every layer after the first.
    std::function<void(std::size_t layer, const MergedPartition&)> on_merge;
    /// Called with the output neuron's list before labels are attached.
    std::function<void(const NeuronRuleList&)> on_output;
};

/// Rule list equivalent to net.predict: class 1 rules cover y >= 0 of the
/// output pre-activation, class 0 rules cover y < 0.
ClassRuleList extract(const Network& net, const FeatureSchema& schema,
                      const ExtractOptions& options = {});

} // namespace nn2rules
