#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nn2rules/dataset.hpp"
#include "nn2rules/network.hpp"
#include "nn2rules/rules.hpp"

namespace nn2rules {

using Predictor = std::function<Label(const Instance&)>;

Label predict(const ClassRuleList& rules, const Instance& instance);

/// Fraction of instances where the predictor agrees with net.predict.
/// Throws Error on an empty instance set.
double fidelity(const Predictor& predictor, const Network& net, const Dataset& data);
double fidelity(const ClassRuleList& rules, const Network& net, const Dataset& data);

/// Fraction of instances where the predictor agrees with the dataset labels.
double accuracy(const Predictor& predictor, const Dataset& data);

struct ErrorSetFidelity {
    double value = 1.0;
    std::size_t error_count = 0;
    /// The network made no mistakes; value is reported as 1.0.
    bool no_errors = false;
};

/// Fidelity restricted to rows where net.predict disagrees with the label.
ErrorSetFidelity error_set_fidelity(const Predictor& predictor, const Network& net,
                                    const Dataset& test);

struct Counterexample {
    Instance instance;
    Label rule_class = 0;
    Label network_class = 0;
};

struct VerifyOptions {
    std::uint64_t cap = 1'000'000;
    /// Over the cap, check this many uniform random assignments instead of refusing.
    bool sample_over_cap = false;
    std::uint64_t samples = 100'000;
    std::uint64_t seed = 42;
    std::size_t max_counterexamples = 100;
};

struct VerifyResult {
    bool passed = false;
    bool exhaustive = true;
    std::uint64_t checked = 0;
    std::uint64_t mismatches = 0;
    std::vector<Counterexample> counterexamples;
};

/// Compares the rule list with net.predict on every assignment of the
/// schema's product space. Throws Error when the space exceeds the cap and
/// sampling is off.
VerifyResult verify_exhaustive(const ClassRuleList& rules, const Network& net,
                               const FeatureSchema& schema, const VerifyOptions& options = {});

struct RankedRule {
    Rule rule;
    std::size_t support = 0;
};

/// Class-1 rules sorted by descending training support, ties broken by rule order.
std::vector<RankedRule> rank_by_support(const ClassRuleList& rules, const Dataset& train);

/// rank_by_support without the zero-support rules.
std::vector<RankedRule> prune_by_support(const ClassRuleList& rules, const Dataset& train);

/// Class 1 iff the instance matches one of the first `count` ranked rules.
class TopRulesPredictor {
public:
    TopRulesPredictor(std::span<const RankedRule> ranked, std::size_t count);

    Label operator()(const Instance& instance) const;
    /// Rank of the matching rule among all ranked rules, if any.
    std::optional<std::size_t> rank_of(const Instance& instance) const;

private:
    std::vector<std::pair<Rule, std::size_t>> sorted_;
    std::size_t count_ = 0;
};

struct CurvePoint {
    double percent = 0.0;
    std::size_t rules = 0;
    double fidelity = 0.0;
    double accuracy = 0.0;
};

/// Fidelity and accuracy of the top-k predictor for k = round(p * K / 100) at
/// each percentage p, where K is the number of ranked rules.
std::vector<CurvePoint> tradeoff_curve(std::span<const RankedRule> ranked, const Network& net,
                                       const Dataset& data, std::span<const double> percents);

/// 0, step, 2*step, ..., 100.
std::vector<double> percent_grid(double step);

std::uint64_t num_rules_max(const FeatureSchema& schema);
/// Distinct class-1 instances in the training data.
std::size_t num_rules_memorization(const Dataset& train);

} // namespace nn2rules
