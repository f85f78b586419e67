#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nn2rules/error.hpp"
#include "nn2rules/evaluation.hpp"
#include "nn2rules/extraction.hpp"
#include "nn2rules/network.hpp"
#include "nn2rules/pipeline.hpp"
#include "nn2rules/rule_io.hpp"
#include "nn2rules/trainer.hpp"

namespace py = pybind11;
using namespace nn2rules;

namespace {

// A rule list carries its schema so it can print and parse itself.
struct PyRuleList {
    ClassRuleList rules;
    FeatureSchema schema;
};

Instance to_instance(const FeatureSchema& schema, const std::vector<std::string>& values) {
    if (values.size() != schema.feature_count())
        throw Error("expected " + std::to_string(schema.feature_count()) + " values, got " +
                    std::to_string(values.size()));
    Instance x;
    for (std::size_t f = 0; f < values.size(); ++f) {
        const auto v = schema.find_value(f, values[f]);
        if (v == schema.value_count(f))
            throw Error("unknown value '" + values[f] + "' for feature '" + schema.feature(f).name + "'");
        x.values.push_back(static_cast<ValueIndex>(v));
    }
    return x;
}

NeuronRuleStrategy strategy_of(const std::string& s) {
    if (s == "restricted") return NeuronRuleStrategy::restricted;
    if (s == "literal") return NeuronRuleStrategy::literal;
    throw Error("unknown strategy '" + s + "'");
}

py::dict metrics_dict(const MethodMetrics& m) {
    py::dict d;
    d["fidelity"] = m.fidelity;
    d["accuracy"] = m.accuracy;
    d["error_set_fidelity"] = m.error_set_fidelity;
    d["no_errors"] = m.no_errors;
    d["rule_count"] = m.rule_count;
    return d;
}

} // namespace

PYBIND11_MODULE(_nn2rules, m) {
    m.doc() = "Exact rule extraction from ReLU networks over categorical features";

    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_AssertionError);
    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    py::class_<FeatureSchema>(m, "Schema")
        .def_static("parse", [](const std::string& text) { return parse_schema(text); })
        .def_static("load", [](const std::filesystem::path& p) { return load_schema(p); })
        .def_property_readonly("feature_names", [](const FeatureSchema& s) {
            std::vector<std::string> out;
            for (const auto& f : s.features()) out.push_back(f.name);
            return out;
        })
        .def("values", [](const FeatureSchema& s, std::size_t f) { return s.feature(f).values; })
        .def_property_readonly("value_counts", [](const FeatureSchema& s) {
            std::vector<std::size_t> out;
            for (std::size_t f = 0; f < s.feature_count(); ++f) out.push_back(s.value_count(f));
            return out;
        })
        .def_property_readonly("assignment_count", &FeatureSchema::assignment_count)
        .def_property_readonly("one_hot_width", &FeatureSchema::one_hot_width)
        .def("encode", [](const FeatureSchema& s, const std::vector<std::string>& values) {
            return encode_one_hot(to_instance(s, values), s);
        })
        .def("__str__", [](const FeatureSchema& s) { return format_schema(s); });

    py::class_<Dataset>(m, "Dataset")
        .def_static("load", [](const std::filesystem::path& p, const FeatureSchema& s) { return load_csv(p, s); })
        .def("__len__", &Dataset::size)
        .def_property_readonly("schema", [](const Dataset& d) { return d.schema; })
        .def_property_readonly("labels", [](const Dataset& d) {
            return std::vector<int>(d.labels.begin(), d.labels.end());
        });

    m.def("load_prepared", [](const std::filesystem::path& dir) {
        auto p = load_prepared(dir);
        return py::make_tuple(p.train, p.test);
    }, py::arg("directory"), "Train and test sets of a prepared dataset directory.");

    py::class_<Network>(m, "Network")
        .def_static("load", [](const std::filesystem::path& p) { return load_weights(p); })
        .def_static("from_json", &network_from_json)
        .def_static("from_layers", &make_network, py::arg("weights"), py::arg("biases"))
        .def("to_json", &network_to_json)
        .def("save", [](const Network& n, const std::filesystem::path& p) { save_weights(p, n); })
        .def_property_readonly("input_width", &Network::input_width)
        .def("logit", [](const Network& n, const std::vector<double>& x) { return n.logit(x); })
        .def("probability", [](const Network& n, const std::vector<double>& x) { return n.forward(x).probability; })
        .def("predict", [](const Network& n, const std::vector<double>& x) { return int(n.predict(x)); })
        .def("accuracy", [](const Network& n, const Dataset& d) { return accuracy(n, d); });

    m.def("train", [](const Dataset& data, std::vector<std::size_t> widths, double learning_rate,
                      std::size_t batch_size, std::size_t epochs, std::uint64_t seed) {
        TrainOptions o{learning_rate, batch_size, epochs, seed};
        py::gil_scoped_release release;
        return train_network(data, widths, o);
    }, py::arg("data"), py::arg("widths") = std::vector<std::size_t>{6, 3}, py::arg("learning_rate") = 0.05,
       py::arg("batch_size") = 32, py::arg("epochs") = 200, py::arg("seed") = 42);

    m.def("random_network", [](std::size_t input_width, std::vector<std::size_t> widths, std::uint64_t seed) {
        return random_network(input_width, widths, seed);
    }, py::arg("input_width"), py::arg("widths"), py::arg("seed") = 42);

    py::class_<PyRuleList>(m, "RuleList")
        .def_static("load", [](const std::filesystem::path& p, const FeatureSchema& s) {
            return PyRuleList{load_rule_list(p, s), s};
        })
        .def_static("parse", [](const std::string& text, const FeatureSchema& s) {
            return PyRuleList{parse_rule_list(text, s), s};
        })
        .def("__len__", [](const PyRuleList& r) { return r.rules.size(); })
        .def("entries", [](const PyRuleList& r) {
            std::vector<std::pair<std::string, int>> out;
            for (const auto& e : r.rules) out.emplace_back(format_rule(e.rule, r.schema), e.annotation);
            return out;
        }, "(rule text, class) pairs in canonical order.")
        .def("positive_rules", [](const PyRuleList& r) {
            std::vector<std::string> out;
            for (const auto& e : r.rules)
                if (e.annotation == 1) out.push_back(format_rule(e.rule, r.schema));
            return out;
        })
        .def("predict", [](const PyRuleList& r, const std::vector<std::string>& values) {
            return int(predict(r.rules, to_instance(r.schema, values)));
        })
        .def("to_text", [](const PyRuleList& r) { return format_rule_list(r.rules, r.schema); })
        .def("to_json", [](const PyRuleList& r) { return rule_list_to_json(r.rules, r.schema); })
        .def("save", [](const PyRuleList& r, const std::filesystem::path& p) { save_rule_list(p, r.rules, r.schema); });

    m.def("extract", [](const Network& net, const FeatureSchema& schema, const std::string& strategy,
                        unsigned threads) {
        ExtractOptions o;
        o.strategy = strategy_of(strategy);
        o.threads = threads;
        py::gil_scoped_release release;
        return PyRuleList{extract(net, schema, o), schema};
    }, py::arg("net"), py::arg("schema"), py::arg("strategy") = "restricted", py::arg("threads") = 1);

    m.def("verify", [](const PyRuleList& rules, const Network& net, std::uint64_t cap, bool sample) {
        VerifyOptions o;
        o.cap = cap;
        o.sample_over_cap = sample;
        VerifyResult r;
        {
            py::gil_scoped_release release;
            r = verify_exhaustive(rules.rules, net, rules.schema, o);
        }
        py::dict d;
        d["passed"] = r.passed;
        d["exhaustive"] = r.exhaustive;
        d["checked"] = r.checked;
        d["mismatches"] = r.mismatches;
        py::list ce;
        for (const auto& c : r.counterexamples) {
            std::vector<std::string> values;
            for (std::size_t f = 0; f < c.instance.values.size(); ++f)
                values.push_back(rules.schema.feature(f).values[c.instance.values[f]]);
            ce.append(py::make_tuple(values, int(c.rule_class), int(c.network_class)));
        }
        d["counterexamples"] = ce;
        return d;
    }, py::arg("rules"), py::arg("net"), py::arg("cap") = 1'000'000, py::arg("sample") = false);

    m.def("evaluate", [](const std::string& name, const Network& net, const PyRuleList& rules, const Dataset& train,
                         const Dataset& test, double curve_step, std::size_t max_depth, std::size_t min_leaf) {
        EvaluateOptions o;
        o.curve_step = curve_step;
        o.tree = {max_depth, min_leaf};
        MetricsReport r;
        {
            py::gil_scoped_release release;
            r = evaluate_methods(name, net, rules.rules, train, test, o);
        }
        py::dict d;
        d["dataset"] = r.dataset;
        d["network_train_accuracy"] = r.network_train_accuracy;
        d["network_test_accuracy"] = r.network_test_accuracy;
        py::dict methods;
        for (const auto& mm : r.methods) methods[py::str(mm.method)] = metrics_dict(mm);
        d["methods"] = methods;
        d["rule_count_full"] = r.rule_count_full;
        d["rule_count_support"] = r.rule_count_support;
        d["num_rules_max"] = r.num_rules_max;
        d["num_rules_memorization"] = r.num_rules_memorization;
        py::list curve;
        for (const auto& c : r.curve) {
            py::dict p;
            p["percent"] = c.percent;
            p["rules"] = c.rules;
            p["fidelity"] = c.fidelity;
            p["accuracy"] = c.accuracy;
            curve.append(p);
        }
        d["curve"] = curve;
        return d;
    }, py::arg("name"), py::arg("net"), py::arg("rules"), py::arg("train"), py::arg("test"),
       py::arg("curve_step") = 5.0, py::arg("max_depth") = 8, py::arg("min_leaf") = 5);
}
