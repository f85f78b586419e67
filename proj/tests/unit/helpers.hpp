#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nn2rules/dataset.hpp"
#include "nn2rules/extraction.hpp"
#include "nn2rules/network.hpp"
#include "nn2rules/random.hpp"
#include "nn2rules/rules.hpp"
#include "nn2rules/schema.hpp"
#include "nn2rules/trainer.hpp"

namespace testing {

using namespace nn2rules;

inline FeatureSchema tomato_schema() {
    return FeatureSchema({{"color", {"red", "yellow"}}, {"size", {"small", "medium", "big"}}});
}

// Two hidden ReLU neurons and a sigmoid output, one-hot order
// [red, yellow, small, medium, big].
inline Network tomato_net() {
    return make_network({{{4, 1, 1, 2, 2}, {3, 2, 2, 3, 3}}, {{1, 1}}}, {{-5, -5}, {-1}});
}

inline Instance inst(std::vector<ValueIndex> v) { return Instance{std::move(v)}; }
inline Rule rule(std::vector<ValueIndex> v) { return Rule(std::move(v)); }

inline std::vector<Instance> all_assignments(const FeatureSchema& schema) {
    std::vector<Instance> out;
    for (AssignmentCursor cur(schema); !cur.done(); cur.advance()) out.push_back(cur.current());
    return out;
}

inline FeatureSchema random_schema(Rng& rng, std::size_t max_features, std::size_t max_values) {
    const std::size_t m = 1 + rng.below(max_features);
    std::vector<Feature> features;
    for (std::size_t i = 0; i < m; ++i) {
        Feature f{"f" + std::to_string(i), {}};
        const std::size_t n = 2 + rng.below(max_values - 1);
        for (std::size_t j = 0; j < n; ++j) f.values.push_back("v" + std::to_string(j));
        features.push_back(std::move(f));
    }
    return FeatureSchema(std::move(features));
}

inline std::vector<std::size_t> random_widths(Rng& rng, std::size_t max_first, std::size_t max_second) {
    std::vector<std::size_t> w{1 + rng.below(max_first)};
    if (rng.below(2)) w.push_back(1 + rng.below(max_second));
    return w;
}

// Weights drawn from a few round values with random biases, so hidden neurons
// hit both signs and exact ties happen.
inline Network random_tie_network(std::size_t input_width, std::span<const std::size_t> widths, Rng& rng) {
    std::vector<Layer> layers;
    std::size_t inputs = input_width;
    std::vector<std::size_t> all(widths.begin(), widths.end());
    all.push_back(1);
    for (std::size_t k = 0; k < all.size(); ++k) {
        Layer l;
        l.inputs = inputs;
        l.outputs = all[k];
        l.activation = k + 1 == all.size() ? Activation::sigmoid : Activation::relu;
        for (std::size_t i = 0; i < l.inputs * l.outputs; ++i)
            l.weights.push_back(static_cast<double>(static_cast<int>(rng.below(7)) - 3) * 0.5);
        for (std::size_t o = 0; o < l.outputs; ++o)
            l.biases.push_back(static_cast<double>(static_cast<int>(rng.below(9)) - 4) * 0.5);
        inputs = l.outputs;
        layers.push_back(std::move(l));
    }
    return Network(std::move(layers));
}

// Minimal prefixes whose left-to-right canonical sum meets the threshold,
// found by enumerating every prefix of every length.
inline std::vector<Rule> minimal_prefix_oracle(const WeightBuckets& b, double tau, bool strict) {
    auto meets = [&](double s) { return strict ? s > tau : s >= tau; };
    auto weight_of = [&](std::size_t k, ValueIndex v) {
        for (const auto& item : b.buckets[k])
            if (item.value == v) return item.weight;
        throw std::logic_error("missing value");
    };
    std::vector<Rule> out;
    std::vector<std::vector<ValueIndex>> frontier{{}};
    for (std::size_t len = 0; len <= b.buckets.size(); ++len) {
        std::vector<std::vector<ValueIndex>> next;
        for (const auto& p : frontier) {
            double s = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k) s += weight_of(k, p[k]);
            double parent = 0.0;
            for (std::size_t k = 0; k + 1 < p.size(); ++k) parent += weight_of(k, p[k]);
            if (meets(s) && (p.empty() || !meets(parent))) out.emplace_back(p);
            if (len < b.buckets.size())
                for (const auto& item : b.buckets[len]) {
                    auto q = p;
                    q.push_back(item.value);
                    next.push_back(std::move(q));
                }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline double relu(double y) { return y > 0.0 ? y : 0.0; }

inline bool exhaustively_covers(const std::vector<Rule>& rules, const FeatureSchema& schema) {
    for (const auto& x : all_assignments(schema)) {
        int hits = 0;
        for (const auto& r : rules) hits += r.matches(x);
        if (hits != 1) return false;
    }
    return true;
}

template <class A>
std::vector<Rule> rules_of(const AnnotatedRuleList<A>& list) {
    std::vector<Rule> out;
    for (const auto& e : list) out.push_back(e.rule);
    return out;
}

inline bool same_lists(const NeuronRuleList& a, const NeuronRuleList& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t e = 0; e < a.size(); ++e) {
        if (!(a[e].rule == b[e].rule)) return false;
        if (a[e].annotation->weights != b[e].annotation->weights) return false;
        if (a[e].annotation->bias != b[e].annotation->bias) return false;
    }
    return true;
}

inline bool same_lists(const ClassRuleList& a, const ClassRuleList& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t e = 0; e < a.size(); ++e)
        if (!(a[e].rule == b[e].rule) || a[e].annotation != b[e].annotation) return false;
    return true;
}

// Random canonical buckets: shuffled value labels, non-negative descending
// weights with minimum 0, drawn from a small grid so ties are common.
inline WeightBuckets random_buckets(Rng& rng, bool grid) {
    WeightBuckets b;
    const std::size_t m = 1 + rng.below(5);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t n = 2 + rng.below(3);
        std::vector<ValueIndex> labels(n);
        for (std::size_t j = 0; j < n; ++j) labels[j] = static_cast<ValueIndex>(j);
        rng.shuffle(labels);
        std::vector<double> w(n);
        for (auto& x : w) x = grid ? static_cast<double>(rng.below(4)) * 0.5 : rng.uniform(0, 3);
        std::sort(w.begin(), w.end(), std::greater<>());
        const double low = w.back();
        std::vector<WeightBuckets::Item> items;
        for (std::size_t j = 0; j < n; ++j) items.push_back({labels[j], w[j] - low});
        b.buckets.push_back(items);
    }
    return b;
}

inline std::vector<double> reachable_prefix_sums(const WeightBuckets& b) {
    std::vector<double> sums{0.0};
    std::vector<double> frontier{0.0};
    for (const auto& bucket : b.buckets) {
        std::vector<double> next;
        for (double s : frontier)
            for (const auto& item : bucket) next.push_back(s + item.weight);
        sums.insert(sums.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return sums;
}

} // namespace testing
