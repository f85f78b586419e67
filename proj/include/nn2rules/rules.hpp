#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nn2rules/dataset.hpp"
#include "nn2rules/error.hpp"
#include "nn2rules/schema.hpp"

namespace nn2rules {

struct Term {
    std::size_t feature = 0;
    ValueIndex value = 0;

    bool operator==(const Term&) const = default;
};

/// Conjunction of feature=value terms assigning the first size() features in
/// schema order. The empty rule matches everything. Ordering is lexicographic
/// on value indices, so a rule sorts directly before its extensions.
class Rule {
public:
    Rule() = default;
    explicit Rule(std::vector<ValueIndex> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    ValueIndex operator[](std::size_t feature) const { return values_[feature]; }
    std::span<const ValueIndex> values() const { return values_; }

    std::vector<Term> terms() const;

    bool is_prefix_of(const Rule& other) const;
    bool is_prefix_of(const Instance& instance) const;
    bool matches(const Instance& instance) const { return is_prefix_of(instance); }

    Rule extended(ValueIndex value) const;
    Rule concatenated(std::span<const ValueIndex> suffix) const;

    auto operator<=>(const Rule&) const = default;
    bool operator==(const Rule&) const = default;

private:
    std::vector<ValueIndex> values_;
};

/// Throws Error if the rule has more terms than features or an out-of-range value.
void check_rule(const Rule& rule, const FeatureSchema& schema);

/// Longer rule when one is a prefix of the other, nullopt otherwise.
std::optional<Rule> conjoin(const Rule& a, const Rule& b);

/// Lexicographic comparison of a rule against a full assignment.
std::strong_ordering compare(const Rule& rule, const Instance& instance);

std::size_t support(const Rule& rule, const Dataset& data);

/// Linear function over the one-hot input.
struct Behavior {
    std::vector<double> weights;
    double bias = 0.0;

    static Behavior zero(std::size_t width) { return {std::vector<double>(width, 0.0), 0.0}; }

    double evaluate(std::span<const double> x) const;
    /// Same value as evaluate() on the one-hot encoding, summed in feature order.
    double evaluate(const Instance& instance, const FeatureSchema& schema) const;
    bool is_zero() const;

    bool operator==(const Behavior&) const = default;
};

using BehaviorRef = std::shared_ptr<const Behavior>;

template <class Annotation>
struct RuleEntry {
    Rule rule;
    Annotation annotation;
};

/// Sorted list of (rule, annotation) pairs. A well-formed list is prefix-free
/// and covers the product space, so every instance matches exactly one entry.
template <class Annotation>
class AnnotatedRuleList {
public:
    using Entry = RuleEntry<Annotation>;

    AnnotatedRuleList() = default;
    explicit AnnotatedRuleList(std::vector<Entry> entries) : entries_(std::move(entries)) {}

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<Entry>& mutable_entries() { return entries_; }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    void push_back(Entry entry) { entries_.push_back(std::move(entry)); }

    void sort() {
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const Entry& a, const Entry& b) { return a.rule < b.rule; });
    }

    /// Index of the entry whose rule matches, or nullopt. Binary search over
    /// sorted entries; assumes the list is sorted and prefix-free.
    std::optional<std::size_t> find(const Instance& instance) const {
        auto it = std::upper_bound(entries_.begin(), entries_.end(), instance,
                                   [](const Instance& x, const Entry& e) {
                                       return compare(e.rule, x) > 0;
                                   });
        if (it == entries_.begin()) return std::nullopt;
        --it;
        if (!it->rule.is_prefix_of(instance)) return std::nullopt;
        return static_cast<std::size_t>(it - entries_.begin());
    }

    /// Throws InvariantViolation when nothing matches.
    const Entry& lookup(const Instance& instance) const {
        auto index = find(instance);
        if (!index) throw InvariantViolation("rule list lookup: no rule matches instance");
        return entries_[*index];
    }

private:
    std::vector<Entry> entries_;
};

using NeuronRuleList = AnnotatedRuleList<BehaviorRef>;
using ClassRuleList = AnnotatedRuleList<Label>;

struct PartitionReport {
    bool sorted = true;
    bool prefix_free = true;
    bool covering = true;
    std::string message;

    bool ok() const { return sorted && prefix_free && covering; }
};

/// Checks ordering, prefix-freeness and coverage of a sorted rule sequence.
/// Coverage is checked by counting: a prefix-free list covers the space iff
/// the completions of its rules add up to the product-space size.
PartitionReport check_partition(std::span<const Rule> rules, const FeatureSchema& schema);

template <class Annotation>
PartitionReport check_partition(const AnnotatedRuleList<Annotation>& list,
                                const FeatureSchema& schema) {
    std::vector<Rule> rules;
    rules.reserve(list.size());
    for (const auto& e : list) rules.push_back(e.rule);
    return check_partition(rules, schema);
}

/// Throws InvariantViolation with the report message if the check fails.
void require_partition(const PartitionReport& report, const char* what);

} // namespace nn2rules
