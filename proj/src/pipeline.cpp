#include "nn2rules/pipeline.hpp"

#include <sstream>

#include "nn2rules/error.hpp"
#include "text.hpp"

namespace nn2rules {

const MethodMetrics& MetricsReport::method(const std::string& name) const {
    for (const auto& m : methods)
        if (m.method == name) return m;
    throw Error("no metrics for method '" + name + "'");
}

MetricsReport evaluate_methods(const std::string& name, const Network& net,
                               const ClassRuleList& rules, const Dataset& train,
                               const Dataset& test, const EvaluateOptions& options) {
    MetricsReport report;
    report.dataset = name;
    report.network_train_accuracy = accuracy(net, train);
    report.network_test_accuracy = accuracy(net, test);
    report.num_rules_max = num_rules_max(train.schema);
    report.num_rules_memorization = num_rules_memorization(train);
    report.entry_count_full = rules.size();

    const auto ranked = rank_by_support(rules, train);
    const auto kept = prune_by_support(rules, train);
    report.rule_count_full = ranked.size();
    report.rule_count_support = kept.size();

    auto add = [&](const std::string& method, const Predictor& p, std::size_t count) {
        const auto es = error_set_fidelity(p, net, test);
        report.methods.push_back(
            {method, fidelity(p, net, test), accuracy(p, test), es.value, es.no_errors, count});
    };

    add("nn2rules_full", [&](const Instance& x) { return predict(rules, x); }, ranked.size());
    const TopRulesPredictor support(kept, kept.size());
    add("nn2rules_support", [&](const Instance& x) { return support(x); }, kept.size());
    const auto tree = train_tree(train.schema, train.instances, train.labels, options.tree);
    add("decision_tree", [&](const Instance& x) { return tree.predict(x); }, tree.positive_leaf_count());
    const auto trepan = trepan_lite(net, train, options.tree);
    add("trepan_lite", [&](const Instance& x) { return trepan.predict(x); }, trepan.positive_leaf_count());

    const auto grid = percent_grid(options.curve_step);
    report.curve = tradeoff_curve(ranked, net, test, grid);
    return report;
}

std::string metrics_csv_header() {
    return "dataset,method,fidelity,accuracy,error_set_fidelity,no_errors,rule_count,"
           "network_test_accuracy,num_rules_max,num_rules_memorization\n";
}

std::string metrics_csv_rows(const MetricsReport& report) {
    std::ostringstream out;
    for (const auto& m : report.methods) {
        out << report.dataset << ',' << m.method << ',' << detail::format_double(m.fidelity) << ','
            << detail::format_double(m.accuracy) << ',' << detail::format_double(m.error_set_fidelity)
            << ',' << (m.no_errors ? 1 : 0) << ',' << m.rule_count << ','
            << detail::format_double(report.network_test_accuracy) << ',' << report.num_rules_max
            << ',' << report.num_rules_memorization << '\n';
    }
    return out.str();
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream out;
    out << "percent,rules,fidelity,accuracy\n";
    for (const auto& p : curve)
        out << detail::format_double(p.percent) << ',' << p.rules << ','
            << detail::format_double(p.fidelity) << ',' << detail::format_double(p.accuracy) << '\n';
    return out.str();
}

PreparedData load_prepared(const std::filesystem::path& dir) {
    PreparedData out;
    out.name = dir.filename().string();
    if (out.name.empty()) out.name = dir.parent_path().filename().string();
    const auto schema = load_schema(dir / "schema.txt");
    out.train = load_csv(dir / "train.csv", schema);
    out.train.split = Split::train;
    out.test = load_csv(dir / "test.csv", schema);
    out.test.split = Split::test;
    return out;
}

} // namespace nn2rules
