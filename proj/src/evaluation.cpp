#include "nn2rules/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nn2rules/error.hpp"
#include "nn2rules/random.hpp"

namespace nn2rules {

Label predict(const ClassRuleList& rules, const Instance& instance) {
    return rules.lookup(instance).annotation;
}

double fidelity(const Predictor& predictor, const Network& net, const Dataset& data) {
    if (data.empty()) throw Error("fidelity: empty instance set");
    std::size_t agree = 0;
    for (const auto& inst : data.instances) agree += predictor(inst) == net.predict(inst, data.schema);
    return static_cast<double>(agree) / static_cast<double>(data.size());
}

double fidelity(const ClassRuleList& rules, const Network& net, const Dataset& data) {
    return fidelity([&](const Instance& x) { return predict(rules, x); }, net, data);
}

double accuracy(const Predictor& predictor, const Dataset& data) {
    if (data.empty()) throw Error("accuracy: empty instance set");
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.size(); ++r) hits += predictor(data.instances[r]) == data.labels[r];
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

ErrorSetFidelity error_set_fidelity(const Predictor& predictor, const Network& net,
                                    const Dataset& test) {
    if (test.empty()) throw Error("error_set_fidelity: empty test set");
    ErrorSetFidelity out;
    std::size_t agree = 0;
    for (std::size_t r = 0; r < test.size(); ++r) {
        const Label y_net = net.predict(test.instances[r], test.schema);
        if (y_net == test.labels[r]) continue;
        ++out.error_count;
        agree += predictor(test.instances[r]) == y_net;
    }
    if (out.error_count == 0) {
        out.no_errors = true;
        out.value = 1.0;
    } else {
        out.value = static_cast<double>(agree) / static_cast<double>(out.error_count);
    }
    return out;
}

VerifyResult verify_exhaustive(const ClassRuleList& rules, const Network& net,
                               const FeatureSchema& schema, const VerifyOptions& options) {
    if (net.input_width() != schema.one_hot_width())
        throw Error("verify: network width does not match schema");
    VerifyResult result;
    std::vector<double> x(schema.one_hot_width());
    auto check = [&](const Instance& inst) {
        encode_one_hot(inst, schema, x);
        const Label y_net = net.predict(std::span<const double>(x));
        const auto idx = rules.find(inst);
        if (!idx) throw InvariantViolation("verify: rule list does not cover an assignment");
        const Label y_rule = rules[*idx].annotation;
        ++result.checked;
        if (y_rule != y_net) {
            ++result.mismatches;
            if (result.counterexamples.size() < options.max_counterexamples)
                result.counterexamples.push_back({inst, y_rule, y_net});
        }
    };

    const auto total = schema.assignment_count();
    if (total <= options.cap) {
        for (AssignmentCursor cur(schema); !cur.done(); cur.advance()) check(cur.current());
    } else if (options.sample_over_cap) {
        result.exhaustive = false;
        Rng rng(options.seed);
        Instance inst;
        inst.values.resize(schema.feature_count());
        for (std::uint64_t s = 0; s < options.samples; ++s) {
            for (std::size_t i = 0; i < schema.feature_count(); ++i)
                inst.values[i] = static_cast<ValueIndex>(rng.below(schema.value_count(i)));
            check(inst);
        }
    } else {
        throw Error("verify: product space has " + std::to_string(total) +
                    " assignments, above the cap of " + std::to_string(options.cap) +
                    "; raise the cap or enable sampling");
    }
    result.passed = result.mismatches == 0;
    return result;
}

std::vector<RankedRule> rank_by_support(const ClassRuleList& rules, const Dataset& train) {
    std::vector<RankedRule> ranked;
    std::vector<std::size_t> positive;
    for (std::size_t e = 0; e < rules.size(); ++e)
        if (rules[e].annotation == 1) positive.push_back(e);
    std::vector<std::size_t> counts(rules.size(), 0);
    // Rules partition the space, so one lookup per row finds its only match.
    for (const auto& inst : train.instances)
        if (auto idx = rules.find(inst)) ++counts[*idx];
    ranked.reserve(positive.size());
    for (auto e : positive) ranked.push_back({rules[e].rule, counts[e]});
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedRule& a, const RankedRule& b) {
        if (a.support != b.support) return a.support > b.support;
        return a.rule < b.rule;
    });
    return ranked;
}

std::vector<RankedRule> prune_by_support(const ClassRuleList& rules, const Dataset& train) {
    auto ranked = rank_by_support(rules, train);
    ranked.erase(std::remove_if(ranked.begin(), ranked.end(),
                                [](const RankedRule& r) { return r.support == 0; }),
                 ranked.end());
    return ranked;
}

TopRulesPredictor::TopRulesPredictor(std::span<const RankedRule> ranked, std::size_t count)
    : count_(std::min(count, ranked.size())) {
    sorted_.reserve(ranked.size());
    for (std::size_t r = 0; r < ranked.size(); ++r) sorted_.emplace_back(ranked[r].rule, r);
    std::sort(sorted_.begin(), sorted_.end());
    for (std::size_t r = 1; r < sorted_.size(); ++r)
        if (sorted_[r - 1].first.is_prefix_of(sorted_[r].first))
            throw InvariantViolation("ranked rules are not prefix-free");
}

std::optional<std::size_t> TopRulesPredictor::rank_of(const Instance& instance) const {
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), instance,
                               [](const Instance& x, const auto& e) { return compare(e.first, x) > 0; });
    if (it == sorted_.begin()) return std::nullopt;
    --it;
    if (!it->first.is_prefix_of(instance)) return std::nullopt;
    return it->second;
}

Label TopRulesPredictor::operator()(const Instance& instance) const {
    const auto rank = rank_of(instance);
    return rank && *rank < count_ ? 1 : 0;
}

std::vector<CurvePoint> tradeoff_curve(std::span<const RankedRule> ranked, const Network& net,
                                       const Dataset& data, std::span<const double> percents) {
    if (data.empty()) throw Error("tradeoff_curve: empty instance set");
    const TopRulesPredictor index(ranked, ranked.size());
    const std::size_t none = ranked.size();
    std::vector<std::size_t> rank(data.size());
    std::vector<Label> y_net(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) {
        rank[r] = index.rank_of(data.instances[r]).value_or(none);
        y_net[r] = net.predict(data.instances[r], data.schema);
    }
    std::vector<CurvePoint> out;
    for (double p : percents) {
        if (p < 0.0 || p > 100.0) throw Error("tradeoff_curve: percent outside [0, 100]");
        const auto k = static_cast<std::size_t>(
            std::floor(p * static_cast<double>(ranked.size()) / 100.0 + 0.5));
        std::size_t agree = 0, hits = 0;
        for (std::size_t r = 0; r < data.size(); ++r) {
            const Label y = rank[r] < k ? 1 : 0;
            agree += y == y_net[r];
            hits += y == data.labels[r];
        }
        const double n = static_cast<double>(data.size());
        out.push_back({p, k, static_cast<double>(agree) / n, static_cast<double>(hits) / n});
    }
    return out;
}

std::vector<double> percent_grid(double step) {
    if (!(step > 0.0) || step > 100.0) throw Error("curve step must be in (0, 100]");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor(100.0 / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(std::min(100.0, static_cast<double>(i) * step));
    if (out.back() != 100.0) out.push_back(100.0);
    return out;
}

std::uint64_t num_rules_max(const FeatureSchema& schema) { return schema.assignment_count(); }

std::size_t num_rules_memorization(const Dataset& train) {
    std::set<std::vector<ValueIndex>> unique;
    for (std::size_t r = 0; r < train.size(); ++r)
        if (train.labels[r] == 1) unique.insert(train.instances[r].values);
    return unique.size();
}

} // namespace nn2rules
