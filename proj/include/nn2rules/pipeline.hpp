#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "nn2rules/dataset.hpp"
#include "nn2rules/evaluation.hpp"
#include "nn2rules/extraction.hpp"
#include "nn2rules/network.hpp"
#include "nn2rules/trainer.hpp"
#include "nn2rules/tree.hpp"

namespace nn2rules {

struct MethodMetrics {
    std::string method;
    double fidelity = 0.0;
    double accuracy = 0.0;
    double error_set_fidelity = 0.0;
    bool no_errors = false;
    /// Positive-class rules (or positive leaves for the trees).
    std::size_t rule_count = 0;
};

struct MetricsReport {
    std::string dataset;
    double network_train_accuracy = 0.0;
    double network_test_accuracy = 0.0;
    std::vector<MethodMetrics> methods;
    std::size_t rule_count_full = 0;
    std::size_t rule_count_support = 0;
    std::size_t entry_count_full = 0;
    std::uint64_t num_rules_max = 0;
    std::size_t num_rules_memorization = 0;
    std::vector<CurvePoint> curve;

    const MethodMetrics& method(const std::string& name) const;
};

struct EvaluateOptions {
    TreeParams tree;
    double curve_step = 5.0;
};

/// Metrics for NN2Rules(Full), NN2Rules(Support), the decision tree and
/// TREPAN-lite, plus the test-set tradeoff curve.
MetricsReport evaluate_methods(const std::string& name, const Network& net,
                               const ClassRuleList& rules, const Dataset& train,
                               const Dataset& test, const EvaluateOptions& options = {});

std::string metrics_csv_header();
std::string metrics_csv_rows(const MetricsReport& report);
std::string curve_csv(const std::vector<CurvePoint>& curve);

/// Loads data/<name>/{schema.txt,train.csv,test.csv}.
struct PreparedData {
    std::string name;
    Dataset train;
    Dataset test;
};
PreparedData load_prepared(const std::filesystem::path& dir);

} // namespace nn2rules
