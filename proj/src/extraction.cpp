#include "nn2rules/extraction.hpp"

#include <algorithm>
#include <thread>

#include "nn2rules/error.hpp"

namespace nn2rules {

namespace {

/// Largest value any completion can reach from partial sum `s` at bucket k,
/// accumulated in the same left-to-right order as a full assignment's sum.
/// Floating-point addition is monotone, so this bounds every completion and
/// is attained by picking each bucket's first (largest) item.
double max_completion(const WeightBuckets& b, std::size_t k, double s) {
    for (; k < b.buckets.size(); ++k) s += b.buckets[k].front().weight;
    return s;
}

template <class Meets>
void select_dfs(const WeightBuckets& b, Meets meets, std::size_t k, double s,
                std::vector<ValueIndex>& path, std::vector<Rule>& out) {
    if (meets(s)) {
        out.emplace_back(path);
        return;
    }
    if (k == b.buckets.size()) return;
    for (const auto& item : b.buckets[k]) {
        const double next = s + item.weight;
        // Items are sorted descending, so no later item can do better.
        if (!meets(max_completion(b, k + 1, next))) break;
        path.push_back(item.value);
        select_dfs(b, meets, k + 1, next, path, out);
        path.pop_back();
    }
}

void sign_dfs(const WeightBuckets& b, double threshold, std::size_t k, double s,
              std::vector<ValueIndex>& path, SignSplit& out) {
    if (s >= threshold) {
        out.active.emplace_back(path);
        return;
    }
    if (!(max_completion(b, k, s) >= threshold)) {
        out.inactive.emplace_back(path);
        return;
    }
    for (const auto& item : b.buckets[k]) {
        path.push_back(item.value);
        sign_dfs(b, threshold, k + 1, s + item.weight, path, out);
        path.pop_back();
    }
}

WeightBuckets make_buckets(const Behavior& behavior, const FeatureSchema& schema,
                           const Rule& prefix) {
    if (behavior.weights.size() != schema.one_hot_width())
        throw Error("canonicalize: behavior width " + std::to_string(behavior.weights.size()) +
                    " does not match schema width " + std::to_string(schema.one_hot_width()));
    check_rule(prefix, schema);
    WeightBuckets out;
    out.first_feature = prefix.size();
    out.bias = behavior.bias;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        out.bias += behavior.weights[schema.offset(i) + prefix[i]];
    for (std::size_t i = prefix.size(); i < schema.feature_count(); ++i) {
        std::vector<WeightBuckets::Item> items;
        items.reserve(schema.value_count(i));
        for (std::size_t j = 0; j < schema.value_count(i); ++j)
            items.push_back({static_cast<ValueIndex>(j), behavior.weights[schema.offset(i) + j]});
        std::stable_sort(items.begin(), items.end(),
                         [](const auto& a, const auto& c) { return a.weight > c.weight; });
        const double low = items.back().weight;
        for (auto& item : items) item.weight -= low;
        out.bias += low;
        out.buckets.push_back(std::move(items));
    }
    return out;
}

std::vector<RuleEntry<BehaviorRef>> annotate(const SignSplit& split, const Rule& prefix,
                                             const BehaviorRef& active, const BehaviorRef& inactive,
                                             std::vector<Label>* labels) {
    std::vector<RuleEntry<BehaviorRef>> out;
    out.reserve(split.active.size() + split.inactive.size());
    auto a = split.active.begin();
    auto z = split.inactive.begin();
    while (a != split.active.end() || z != split.inactive.end()) {
        const bool take_active =
            z == split.inactive.end() || (a != split.active.end() && *a < *z);
        const Rule& suffix = take_active ? *a++ : *z++;
        out.push_back({prefix.concatenated(suffix.values()), take_active ? active : inactive});
        if (labels) labels->push_back(take_active ? 1 : 0);
    }
    return out;
}

struct PartialMerge {
    std::vector<Rule> rules;
    std::vector<std::uint32_t> sources;
    std::size_t stride = 0;
};

PartialMerge merge_two(const PartialMerge& a, const PartialMerge& b) {
    PartialMerge out;
    out.stride = a.stride + b.stride;
    out.rules.reserve(std::max(a.rules.size(), b.rules.size()));
    std::size_t i = 0, j = 0;
    auto emit = [&](const Rule& rule) {
        out.rules.push_back(rule);
        out.sources.insert(out.sources.end(), a.sources.begin() + static_cast<std::ptrdiff_t>(i * a.stride),
                           a.sources.begin() + static_cast<std::ptrdiff_t>((i + 1) * a.stride));
        out.sources.insert(out.sources.end(), b.sources.begin() + static_cast<std::ptrdiff_t>(j * b.stride),
                           b.sources.begin() + static_cast<std::ptrdiff_t>((j + 1) * b.stride));
    };
    while (i < a.rules.size() && j < b.rules.size()) {
        const Rule& ra = a.rules[i];
        const Rule& rb = b.rules[j];
        if (ra.is_prefix_of(rb)) {
            emit(rb);
            if (ra.size() == rb.size()) ++i;
            ++j;
        } else if (rb.is_prefix_of(ra)) {
            emit(ra);
            ++i;
        } else if (ra < rb) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

template <class Fn>
void for_each_neuron(std::size_t count, unsigned threads, Fn fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t o = 0; o < count; ++o) fn(o);
        return;
    }
    const auto workers = std::min<std::size_t>(threads, count);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t o = t; o < count; o += workers) fn(o);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

NeuronRuleList neuron_rule_impl(std::span<const double> weights, double bias,
                                std::span<const NeuronRuleList> inputs,
                                const MergedPartition& merged, const FeatureSchema& schema,
                                NeuronRuleStrategy strategy, std::vector<Label>* labels) {
    if (weights.size() != inputs.size())
        throw Error("neuron_rule: " + std::to_string(weights.size()) + " weights for " +
                    std::to_string(inputs.size()) + " input lists");
    const std::size_t width = schema.one_hot_width();
    const auto zero = std::make_shared<const Behavior>(Behavior::zero(width));
    std::vector<RuleEntry<BehaviorRef>> entries;
    entries.reserve(merged.size());

    for (std::size_t e = 0; e < merged.size(); ++e) {
        const Rule& pre = merged.rules[e];
        auto combined = std::make_shared<const Behavior>(
            combine_behaviors(inputs, merged.sources_of(e), weights, bias, width));
        if (strategy == NeuronRuleStrategy::restricted) {
            const auto split = split_by_sign(canonicalize_after(*combined, schema, pre));
            auto part = annotate(split, pre, combined, zero, labels);
            std::move(part.begin(), part.end(), std::back_inserter(entries));
        } else {
            const auto split = split_by_sign(canonicalize(*combined, schema));
            std::vector<Label> part_labels;
            const auto part = annotate(split, Rule{}, combined, zero, &part_labels);
            for (std::size_t r = 0; r < part.size(); ++r) {
                auto joined = conjoin(pre, part[r].rule);
                if (!joined) continue;
                entries.push_back({std::move(*joined), part[r].annotation});
                if (labels) labels->push_back(part_labels[r]);
            }
        }
    }
    return NeuronRuleList(std::move(entries));
}

} // namespace

double WeightBuckets::evaluate(std::span<const ValueIndex> values) const {
    if (values.size() != buckets.size()) throw Error("WeightBuckets::evaluate: wrong length");
    double s = 0.0;
    for (std::size_t k = 0; k < buckets.size(); ++k) {
        auto it = std::find_if(buckets[k].begin(), buckets[k].end(),
                               [&](const Item& item) { return item.value == values[k]; });
        if (it == buckets[k].end()) throw Error("WeightBuckets::evaluate: unknown value");
        s += it->weight;
    }
    return s + bias;
}

WeightBuckets canonicalize(const Behavior& behavior, const FeatureSchema& schema) {
    return make_buckets(behavior, schema, Rule{});
}

WeightBuckets canonicalize_after(const Behavior& behavior, const FeatureSchema& schema,
                                 const Rule& prefix) {
    return make_buckets(behavior, schema, prefix);
}

std::vector<Rule> select_weights(const WeightBuckets& buckets, double threshold, bool strict) {
    std::vector<Rule> out;
    std::vector<ValueIndex> path;
    if (strict)
        select_dfs(buckets, [threshold](double s) { return s > threshold; }, 0, 0.0, path, out);
    else
        select_dfs(buckets, [threshold](double s) { return s >= threshold; }, 0, 0.0, path, out);
    std::sort(out.begin(), out.end());
    return out;
}

SignSplit split_by_sign(const WeightBuckets& buckets) {
    SignSplit out;
    std::vector<ValueIndex> path;
    sign_dfs(buckets, -buckets.bias, 0, 0.0, path, out);
    std::sort(out.active.begin(), out.active.end());
    std::sort(out.inactive.begin(), out.inactive.end());
    return out;
}

NeuronRuleList lin_rule(const Behavior& behavior, const FeatureSchema& schema) {
    const auto buckets = canonicalize(behavior, schema);
    const auto split = split_by_sign(buckets);
    auto active = std::make_shared<const Behavior>(behavior);
    auto zero = std::make_shared<const Behavior>(Behavior::zero(behavior.weights.size()));
    return NeuronRuleList(annotate(split, Rule{}, active, zero, nullptr));
}

std::vector<Rule> inactive_rules_by_negation(const Behavior& behavior,
                                             const FeatureSchema& schema) {
    Behavior negated = behavior;
    for (auto& w : negated.weights) w = -w;
    negated.bias = -negated.bias;
    const auto buckets = canonicalize(negated, schema);
    return select_weights(buckets, -buckets.bias, /*strict=*/true);
}

MergedPartition merge_partitions(std::span<const NeuronRuleList> lists,
                                 const FeatureSchema& schema) {
    if (lists.empty()) throw Error("merge_partitions: no input lists");
    std::vector<PartialMerge> level;
    level.reserve(lists.size());
    for (const auto& list : lists) {
        require_partition(check_partition(list, schema), "merge_partitions input");
        PartialMerge p;
        p.stride = 1;
        p.rules.reserve(list.size());
        p.sources.reserve(list.size());
        for (std::size_t e = 0; e < list.size(); ++e) {
            p.rules.push_back(list[e].rule);
            p.sources.push_back(static_cast<std::uint32_t>(e));
        }
        level.push_back(std::move(p));
    }
    while (level.size() > 1) {
        std::vector<PartialMerge> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(merge_two(level[i], level[i + 1]));
        if (level.size() % 2) next.push_back(std::move(level.back()));
        level = std::move(next);
    }
    MergedPartition out;
    out.rules = std::move(level.front().rules);
    out.sources = std::move(level.front().sources);
    out.list_count = lists.size();
    return out;
}

Behavior combine_behaviors(std::span<const NeuronRuleList> lists,
                           std::span<const std::uint32_t> sources,
                           std::span<const double> coefficients, double bias, std::size_t width) {
    if (lists.size() != sources.size() || lists.size() != coefficients.size())
        throw Error("combine_behaviors: list, source and coefficient counts differ");
    Behavior out = Behavior::zero(width);
    double acc = 0.0;
    for (std::size_t j = 0; j < lists.size(); ++j) {
        const Behavior& b = *lists[j][sources[j]].annotation;
        if (b.weights.size() != width) throw Error("combine_behaviors: behavior width mismatch");
        const double c = coefficients[j];
        for (std::size_t i = 0; i < width; ++i) out.weights[i] += c * b.weights[i];
        acc += c * b.bias;
    }
    out.bias = acc + bias;
    return out;
}

NeuronRuleList merge_rule_lists(std::span<const NeuronRuleList> lists,
                                std::span<const double> coefficients, double bias,
                                const FeatureSchema& schema) {
    const auto merged = merge_partitions(lists, schema);
    std::vector<RuleEntry<BehaviorRef>> entries;
    entries.reserve(merged.size());
    for (std::size_t e = 0; e < merged.size(); ++e)
        entries.push_back({merged.rules[e],
                           std::make_shared<const Behavior>(combine_behaviors(
                               lists, merged.sources_of(e), coefficients, bias,
                               schema.one_hot_width()))});
    return NeuronRuleList(std::move(entries));
}

NeuronRuleList neuron_rule(std::span<const double> weights, double bias,
                           std::span<const NeuronRuleList> inputs, const MergedPartition& merged,
                           const FeatureSchema& schema, NeuronRuleStrategy strategy) {
    return neuron_rule_impl(weights, bias, inputs, merged, schema, strategy, nullptr);
}

NeuronRuleList neuron_rule(std::span<const double> weights, double bias,
                           std::span<const NeuronRuleList> inputs, const FeatureSchema& schema,
                           NeuronRuleStrategy strategy) {
    const auto merged = merge_partitions(inputs, schema);
    return neuron_rule_impl(weights, bias, inputs, merged, schema, strategy, nullptr);
}

ClassRuleList extract(const Network& net, const FeatureSchema& schema,
                      const ExtractOptions& options) {
    if (net.input_width() != schema.one_hot_width())
        throw Error("extract: network input width " + std::to_string(net.input_width()) +
                    " does not match schema one-hot width " +
                    std::to_string(schema.one_hot_width()));
    const auto& layers = net.layers();
    const auto& output = layers.back();

    NeuronRuleList output_list;
    std::vector<Label> labels;

    if (layers.size() == 1) {
        Behavior b{std::vector<double>(output.row(0).begin(), output.row(0).end()), output.biases[0]};
        const auto split = split_by_sign(canonicalize(b, schema));
        auto active = std::make_shared<const Behavior>(b);
        auto zero = std::make_shared<const Behavior>(Behavior::zero(b.weights.size()));
        output_list = NeuronRuleList(annotate(split, Rule{}, active, zero, &labels));
    } else {
        std::vector<NeuronRuleList> current(layers.front().outputs);
        for_each_neuron(current.size(), options.threads, [&](std::size_t o) {
            const auto& l = layers.front();
            current[o] = lin_rule(Behavior{std::vector<double>(l.row(o).begin(), l.row(o).end()),
                                           l.biases[o]},
                                  schema);
        });
        if (options.on_neuron)
            for (std::size_t o = 0; o < current.size(); ++o) options.on_neuron(0, o, current[o]);

        for (std::size_t k = 1; k < layers.size(); ++k) {
            const auto& l = layers[k];
            const auto merged = merge_partitions(current, schema);
            if (options.on_merge) options.on_merge(k, merged);
            if (k + 1 == layers.size()) {
                output_list = neuron_rule_impl(l.row(0), l.biases[0], current, merged, schema,
                                               options.strategy, &labels);
                break;
            }
            std::vector<NeuronRuleList> next(l.outputs);
            for_each_neuron(next.size(), options.threads, [&](std::size_t o) {
                next[o] = neuron_rule_impl(l.row(o), l.biases[o], current, merged, schema,
                                           options.strategy, nullptr);
            });
            if (options.on_neuron)
                for (std::size_t o = 0; o < next.size(); ++o) options.on_neuron(k, o, next[o]);
            current = std::move(next);
        }
    }
    if (options.on_output) options.on_output(output_list);

    std::vector<RuleEntry<Label>> entries;
    entries.reserve(output_list.size());
    for (std::size_t e = 0; e < output_list.size(); ++e)
        entries.push_back({output_list[e].rule, labels[e]});
    ClassRuleList out(std::move(entries));
    require_partition(check_partition(out, schema), "extract output");
    return out;
}

} // namespace nn2rules
