#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nn2rules/discretize.hpp"
#include "nn2rules/error.hpp"
#include "nn2rules/evaluation.hpp"
#include "nn2rules/extraction.hpp"
#include "nn2rules/pipeline.hpp"
#include "nn2rules/rule_io.hpp"
#include "nn2rules/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nn2rules;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << text;
}

std::vector<std::size_t> parse_widths(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(part, &used);
        } catch (const std::exception&) {
            throw Error("bad width '" + part + "'");
        }
        if (used != part.size() || v < 1) throw Error("hidden widths must be positive integers, got '" + part + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw Error("at least one hidden width is required");
    return out;
}

NeuronRuleStrategy parse_strategy(const std::string& s) {
    if (s == "restricted") return NeuronRuleStrategy::restricted;
    if (s == "literal") return NeuronRuleStrategy::literal;
    throw Error("unknown strategy '" + s + "' (expected restricted or literal)");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Train/test pair from either an explicit test file or an on-the-fly split.
std::pair<Dataset, Dataset> load_train_test(const FeatureSchema& schema, const std::string& data,
                                            const std::string& test_data, double split,
                                            std::uint64_t seed) {
    auto all = load_csv(data, schema);
    if (!test_data.empty()) {
        all.split = Split::train;
        auto test = load_csv(test_data, schema);
        test.split = Split::test;
        return {std::move(all), std::move(test)};
    }
    if (split >= 1.0) {
        Dataset test = all;
        all.split = Split::train;
        test.split = Split::test;
        return {std::move(all), std::move(test)};
    }
    return split_dataset(all, split, seed);
}

json train_options_json(const TrainOptions& o, const std::vector<std::size_t>& widths) {
    return {{"widths", widths},
            {"learning_rate", o.learning_rate},
            {"batch_size", o.batch_size},
            {"epochs", o.epochs},
            {"seed", o.seed}};
}

std::vector<std::size_t> supports_of(const ClassRuleList& rules, const Dataset& train) {
    std::vector<std::size_t> out(rules.size(), 0);
    for (const auto& x : train.instances)
        if (auto idx = rules.find(x)) ++out[*idx];
    return out;
}

void write_counterexamples(const fs::path& path, const VerifyResult& res, const FeatureSchema& schema) {
    std::ostringstream out;
    for (std::size_t i = 0; i < schema.feature_count(); ++i) out << schema.feature(i).name << ',';
    out << "rule_class,network_class\n";
    for (const auto& c : res.counterexamples) {
        for (std::size_t i = 0; i < schema.feature_count(); ++i)
            out << schema.feature(i).values[c.instance.values[i]] << ',';
        out << int(c.rule_class) << ',' << int(c.network_class) << '\n';
    }
    write_text(path, out.str());
}

// ---- prepare ------------------------------------------------------------

struct PrepareArgs {
    std::string raw, spec, out, label = "label", positive;
    double split = 0.8;
    std::uint64_t seed = 42;
};

int cmd_prepare(const PrepareArgs& a) {
    const auto table = read_csv(a.raw);
    const auto specs = load_feature_spec(a.spec);
    const auto label_col = table.column(a.label);
    auto [train_rows, test_rows] = split_indices(table.rows.size(), a.split, a.seed);

    std::vector<Feature> features;
    EdgeTable edges;
    CsvTable out_train, out_test;
    for (const auto& s : specs) {
        out_train.header.push_back(s.name);
        out_test.header.push_back(s.name);
    }
    out_train.header.push_back("label");
    out_test.header.push_back("label");
    out_train.rows.assign(train_rows.size(), {});
    out_test.rows.assign(test_rows.size(), {});

    for (const auto& s : specs) {
        const auto col = table.column(s.name);
        if (!s.is_numeric()) {
            features.push_back({s.name, s.values});
            for (std::size_t r = 0; r < train_rows.size(); ++r) out_train.rows[r].push_back(table.rows[train_rows[r]][col]);
            for (std::size_t r = 0; r < test_rows.size(); ++r) out_test.rows[r].push_back(table.rows[test_rows[r]][col]);
            continue;
        }
        auto numeric = [&](std::size_t row) {
            double v = 0;
            const auto& cell = table.rows[row][col];
            std::size_t used = 0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cell.size())
                throw Error("row " + std::to_string(row + 1) + ", column '" + s.name + "': not a number '" + cell + "'");
            return v;
        };
        std::vector<double> fit;
        for (auto r : train_rows) fit.push_back(numeric(r));
        const auto d = discretize_numeric(fit, s.numeric_bins);
        const auto labels = d.edges.labels();
        if (labels.size() < 2) throw Error("column '" + s.name + "' is constant on the training rows");
        features.push_back({s.name, labels});
        edges[s.name] = d.edges;
        for (std::size_t r = 0; r < train_rows.size(); ++r) out_train.rows[r].push_back(labels[d.indices[r]]);
        for (std::size_t r = 0; r < test_rows.size(); ++r)
            out_test.rows[r].push_back(labels[d.edges.bin_of(numeric(test_rows[r]))]);
    }
    auto label_of = [&](std::size_t row) -> std::string {
        const auto& cell = table.rows[row][label_col];
        if (!a.positive.empty()) return cell == a.positive ? "1" : "0";
        if (cell != "0" && cell != "1")
            throw Error("row " + std::to_string(row + 1) + ": label must be 0 or 1, got '" + cell + "'");
        return cell;
    };
    for (std::size_t r = 0; r < train_rows.size(); ++r) out_train.rows[r].push_back(label_of(train_rows[r]));
    for (std::size_t r = 0; r < test_rows.size(); ++r) out_test.rows[r].push_back(label_of(test_rows[r]));

    const FeatureSchema schema(features);
    const fs::path out(a.out);
    fs::create_directories(out);
    write_text(out / "schema.txt", format_schema(schema));
    write_text(out / "edges.txt", format_edges(edges));
    write_csv(out / "train.csv", out_train);
    write_csv(out / "test.csv", out_test);
    // Validate what was written against the schema.
    const auto check = load_prepared(out);
    json manifest = {{"command", "prepare"}, {"raw", a.raw}, {"spec", a.spec}, {"label", a.label},
                     {"positive", a.positive}, {"split", a.split}, {"seed", a.seed},
                     {"train_rows", check.train.size()}, {"test_rows", check.test.size()},
                     {"assignments", schema.assignment_count()}};
    write_text(out / "prepare_manifest.json", manifest.dump(2) + "\n");
    std::cout << "prepared " << check.train.size() << " train / " << check.test.size() << " test rows, "
              << schema.feature_count() << " features, " << schema.assignment_count() << " assignments\n";
    return exit_ok;
}

// ---- train --------------------------------------------------------------

struct DataArgs {
    std::string schema, data, test_data;
    double split = 0.8;
    std::uint64_t seed = 42;
};

struct TrainArgs {
    DataArgs data;
    std::string widths = "6,3", out;
    TrainOptions options;
};

int cmd_train(TrainArgs a) {
    const auto widths = parse_widths(a.widths);
    const auto schema = load_schema(a.data.schema);
    auto [train, test] = load_train_test(schema, a.data.data, a.data.test_data, a.data.split, a.data.seed);
    a.options.seed = a.data.seed;
    const auto t0 = std::chrono::steady_clock::now();
    const auto net = train_network(train, widths, a.options);
    const double secs = seconds_since(t0);
    const fs::path out(a.out);
    save_weights(out / "weights.json", net);
    json manifest = {{"command", "train"},
                     {"schema", a.data.schema},
                     {"data", a.data.data},
                     {"test_data", a.data.test_data},
                     {"split", a.data.split},
                     {"train", train_options_json(a.options, widths)},
                     {"train_rows", train.size()},
                     {"test_rows", test.size()},
                     {"train_accuracy", accuracy(net, train)},
                     {"test_accuracy", test.empty() ? json(nullptr) : json(accuracy(net, test))}};
    write_text(out / "train_manifest.json", manifest.dump(2) + "\n");
    std::cout << "trained in " << secs << " s; train accuracy " << manifest["train_accuracy"]
              << ", test accuracy " << manifest["test_accuracy"] << "\n";
    return exit_ok;
}

// ---- extract ------------------------------------------------------------

struct ExtractArgs {
    std::string schema, weights, data, out, strategy = "restricted";
    unsigned threads = 1;
};

int cmd_extract(const ExtractArgs& a) {
    const auto schema = load_schema(a.schema);
    const auto net = load_weights(a.weights, schema);
    ExtractOptions opt;
    opt.strategy = parse_strategy(a.strategy);
    opt.threads = a.threads;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rules = extract(net, schema, opt);
    const double secs = seconds_since(t0);
    Supports sup;
    if (!a.data.empty()) sup = supports_of(rules, load_csv(a.data, schema));
    fs::path out(a.out);
    save_rule_list(out, rules, schema, sup);
    auto json_path = out;
    json_path.replace_extension(".json");
    if (json_path != out) save_rule_list(json_path, rules, schema, sup);
    std::size_t positive = 0;
    for (const auto& e : rules) positive += e.annotation;
    std::cout << "extracted " << rules.size() << " rules (" << positive << " class 1) in " << secs
              << " s; product space " << schema.assignment_count() << "\n";
    return exit_ok;
}

// ---- verify -------------------------------------------------------------

struct VerifyArgs {
    std::string schema, weights, rules, out;
    VerifyOptions options;
};

int cmd_verify(const VerifyArgs& a) {
    const auto schema = load_schema(a.schema);
    const auto net = load_weights(a.weights, schema);
    const auto rules = load_rule_list(a.rules, schema);
    const auto res = verify_exhaustive(rules, net, schema, a.options);
    std::cout << (res.passed ? "PASS" : "FAIL") << ": " << res.checked << " assignments checked"
              << (res.exhaustive ? " (exhaustive)" : " (sampled)") << ", " << res.mismatches << " mismatches\n";
    if (!res.passed) {
        fs::path path = fs::path(a.rules).replace_extension(".counterexamples.csv");
        if (!a.out.empty()) {
            fs::create_directories(a.out);
            path = fs::path(a.out) / "counterexamples.csv";
        }
        write_counterexamples(path, res, schema);
        std::cout << "counterexamples written to " << path.string() << "\n";
        for (std::size_t i = 0; i < std::min<std::size_t>(res.counterexamples.size(), 5); ++i) {
            const auto& c = res.counterexamples[i];
            std::cout << "  ";
            for (std::size_t f = 0; f < schema.feature_count(); ++f)
                std::cout << (f ? ", " : "") << schema.feature(f).name << '=' << schema.feature(f).values[c.instance.values[f]];
            std::cout << ": rules " << int(c.rule_class) << ", network " << int(c.network_class) << "\n";
        }
        return exit_failed;
    }
    return exit_ok;
}

// ---- evaluate -----------------------------------------------------------

struct EvaluateArgs {
    DataArgs data;
    std::string weights, rules, out, name;
    EvaluateOptions options;
};

json report_json(const MetricsReport& r) {
    json methods = json::array();
    for (const auto& m : r.methods)
        methods.push_back({{"method", m.method}, {"fidelity", m.fidelity}, {"accuracy", m.accuracy},
                           {"error_set_fidelity", m.error_set_fidelity}, {"no_errors", m.no_errors},
                           {"rule_count", m.rule_count}});
    return {{"dataset", r.dataset},
            {"network_train_accuracy", r.network_train_accuracy},
            {"network_test_accuracy", r.network_test_accuracy},
            {"rule_count_full", r.rule_count_full},
            {"rule_count_support", r.rule_count_support},
            {"entry_count_full", r.entry_count_full},
            {"num_rules_max", r.num_rules_max},
            {"num_rules_memorization", r.num_rules_memorization},
            {"methods", methods}};
}

int cmd_evaluate(const EvaluateArgs& a) {
    const auto schema = load_schema(a.data.schema);
    const auto net = load_weights(a.weights, schema);
    auto [train, test] = load_train_test(schema, a.data.data, a.data.test_data, a.data.split, a.data.seed);
    const auto rules = a.rules.empty() ? extract(net, schema) : load_rule_list(a.rules, schema);
    const std::string name = a.name.empty() ? fs::path(a.data.schema).parent_path().filename().string() : a.name;
    const auto report = evaluate_methods(name.empty() ? "dataset" : name, net, rules, train, test, a.options);
    const fs::path out(a.out);
    write_text(out / "metrics.csv", metrics_csv_header() + metrics_csv_rows(report));
    write_text(out / "curve.csv", curve_csv(report.curve));
    auto manifest = report_json(report);
    manifest["config"] = {{"schema", a.data.schema}, {"data", a.data.data}, {"test_data", a.data.test_data},
                          {"split", a.data.split}, {"seed", a.data.seed}, {"weights", a.weights}, {"rules", a.rules},
                          {"curve_step", a.options.curve_step}, {"max_depth", a.options.tree.max_depth},
                          {"min_leaf", a.options.tree.min_leaf}};
    write_text(out / "evaluate_manifest.json", manifest.dump(2) + "\n");
    std::cout << metrics_csv_header() << metrics_csv_rows(report);
    return exit_ok;
}

// ---- reproduce ----------------------------------------------------------

struct ReproduceArgs {
    std::string data_root = "data", out = "results", datasets = "cars,nursery,contraception,adult";
    std::string widths = "6,3";
    TrainOptions train;
    EvaluateOptions eval;
    VerifyOptions verify;
    unsigned threads = 1;
};

int cmd_reproduce(ReproduceArgs a) {
    const auto widths = parse_widths(a.widths);
    const fs::path out(a.out);
    std::string metrics = metrics_csv_header();
    json report = {{"config", {{"data_root", a.data_root}, {"train", train_options_json(a.train, widths)},
                               {"curve_step", a.eval.curve_step}, {"max_depth", a.eval.tree.max_depth},
                               {"min_leaf", a.eval.tree.min_leaf}, {"verify_cap", a.verify.cap}}},
                   {"datasets", json::array()}};
    bool all_passed = true;
    std::stringstream names(a.datasets);
    std::string name;
    while (std::getline(names, name, ',')) {
        const auto data = load_prepared(fs::path(a.data_root) / name);
        const auto dir = out / name;
        std::cout << "[" << name << "] training " << a.widths << " on " << data.train.size() << " rows" << std::endl;
        auto t0 = std::chrono::steady_clock::now();
        const auto net = train_network(data.train, widths, a.train);
        const double train_s = seconds_since(t0);
        save_weights(dir / "weights.json", net);

        ExtractOptions eo;
        eo.threads = a.threads;
        t0 = std::chrono::steady_clock::now();
        const auto rules = extract(net, data.train.schema, eo);
        const double extract_s = seconds_since(t0);
        const auto sup = supports_of(rules, data.train);
        save_rule_list(dir / "rules.txt", rules, data.train.schema, sup);
        save_rule_list(dir / "rules.json", rules, data.train.schema, sup);

        t0 = std::chrono::steady_clock::now();
        const auto ver = verify_exhaustive(rules, net, data.train.schema, a.verify);
        const double verify_s = seconds_since(t0);
        if (!ver.passed) {
            all_passed = false;
            write_counterexamples(dir / "counterexamples.csv", ver, data.train.schema);
        }
        const auto m = evaluate_methods(name, net, rules, data.train, data.test, a.eval);
        metrics += metrics_csv_rows(m);
        write_text(dir / "metrics.csv", metrics_csv_header() + metrics_csv_rows(m));
        write_text(dir / "curve.csv", curve_csv(m.curve));

        auto entry = report_json(m);
        entry["verify"] = {{"passed", ver.passed}, {"exhaustive", ver.exhaustive}, {"checked", ver.checked},
                           {"mismatches", ver.mismatches}};
        entry["seconds"] = {{"train", train_s}, {"extract", extract_s}, {"verify", verify_s}};
        report["datasets"].push_back(entry);
        std::cout << "[" << name << "] " << rules.size() << " rules, verify " << (ver.passed ? "PASS" : "FAIL")
                  << " over " << ver.checked << " assignments; full fidelity "
                  << m.method("nn2rules_full").fidelity << ", support fidelity "
                  << m.method("nn2rules_support").fidelity << " with " << m.rule_count_support << "/"
                  << m.rule_count_full << " rules" << std::endl;
    }
    write_text(out / "metrics.csv", metrics);
    write_text(out / "report.json", report.dump(2) + "\n");
    return all_passed ? exit_ok : exit_failed;
}

void add_data_options(CLI::App* cmd, DataArgs& d) {
    cmd->add_option("--schema", d.schema, "Schema file")->required();
    cmd->add_option("--data", d.data, "Training CSV (split on the fly unless --test-data is given)")->required();
    cmd->add_option("--test-data", d.test_data, "Test CSV");
    cmd->add_option("--split", d.split, "Train fraction for on-the-fly splitting (1 = no split)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", d.seed, "Seed for splitting and training");
}

void add_train_options(CLI::App* cmd, TrainOptions& t) {
    cmd->add_option("--lr", t.learning_rate, "Learning rate");
    cmd->add_option("--batch", t.batch_size, "Mini-batch size");
    cmd->add_option("--epochs", t.epochs, "Training epochs");
}

void add_eval_options(CLI::App* cmd, EvaluateOptions& e) {
    cmd->add_option("--curve-step", e.curve_step, "Tradeoff curve step in percent");
    cmd->add_option("--max-depth", e.tree.max_depth, "Decision tree depth limit");
    cmd->add_option("--min-leaf", e.tree.min_leaf, "Decision tree minimum rows per child");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact rule extraction from ReLU networks over categorical features"};
    app.require_subcommand(1);

    PrepareArgs prep;
    auto* p = app.add_subcommand("prepare", "Split, bin and encode a raw CSV into a dataset directory");
    p->add_option("--raw", prep.raw, "Raw CSV with a header")->required();
    p->add_option("--spec", prep.spec, "Feature spec file")->required();
    p->add_option("--out", prep.out, "Output directory")->required();
    p->add_option("--label", prep.label, "Label column");
    p->add_option("--positive", prep.positive, "Label value counted as class 1");
    p->add_option("--split", prep.split, "Train fraction")->check(CLI::Range(0.0, 1.0));
    p->add_option("--seed", prep.seed, "Split seed");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train a network and write weights.json");
    add_data_options(t, tr.data);
    t->add_option("--widths", tr.widths, "Hidden layer widths, comma separated");
    add_train_options(t, tr.options);
    t->add_option("--out", tr.out, "Output directory")->required();

    ExtractArgs ex;
    auto* e = app.add_subcommand("extract", "Extract the rule list of a network");
    e->add_option("--schema", ex.schema, "Schema file")->required();
    e->add_option("--weights", ex.weights, "Weight file")->required();
    e->add_option("--data", ex.data, "Training CSV for per-rule support");
    e->add_option("--out", ex.out, "Rule file (.txt; a .json mirror is written alongside)")->required();
    e->add_option("--strategy", ex.strategy, "restricted or literal");
    e->add_option("--threads", ex.threads, "Worker threads per layer");

    VerifyArgs ve;
    auto* v = app.add_subcommand("verify", "Check a rule list against the network on every assignment");
    v->add_option("--schema", ve.schema, "Schema file")->required();
    v->add_option("--weights", ve.weights, "Weight file")->required();
    v->add_option("--rules", ve.rules, "Rule file")->required();
    v->add_option("--cap", ve.options.cap, "Largest product space to enumerate");
    v->add_flag("--sample", ve.options.sample_over_cap, "Sample instead of refusing above the cap");
    v->add_option("--samples", ve.options.samples, "Samples when over the cap");
    v->add_option("--out", ve.out, "Directory for counterexamples.csv (default: next to the rule file)");

    EvaluateArgs ev;
    auto* m = app.add_subcommand("evaluate", "Metrics for all methods plus the tradeoff curve");
    add_data_options(m, ev.data);
    m->add_option("--weights", ev.weights, "Weight file")->required();
    m->add_option("--rules", ev.rules, "Rule file (extracted on the fly if omitted)");
    m->add_option("--name", ev.name, "Dataset name for the report");
    m->add_option("--out", ev.out, "Output directory")->required();
    add_eval_options(m, ev.options);

    ReproduceArgs re;
    auto* r = app.add_subcommand("reproduce", "Train, extract, verify and evaluate every prepared dataset");
    r->add_option("--data-root", re.data_root, "Directory holding the prepared datasets");
    r->add_option("--datasets", re.datasets, "Comma-separated dataset names");
    r->add_option("--out", re.out, "Output directory");
    r->add_option("--widths", re.widths, "Hidden layer widths");
    r->add_option("--seed", re.train.seed, "Training seed");
    r->add_option("--threads", re.threads, "Worker threads per layer");
    r->add_option("--cap", re.verify.cap, "Largest product space to enumerate");
    add_train_options(r, re.train);
    add_eval_options(r, re.eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*p) return cmd_prepare(prep);
        if (*t) return cmd_train(tr);
        if (*e) return cmd_extract(ex);
        if (*v) return cmd_verify(ve);
        if (*m) return cmd_evaluate(ev);
        if (*r) return cmd_reproduce(re);
    } catch (const InvariantViolation& err) {
        std::cerr << "invariant violated: " << err.what() << "\n";
        return exit_failed;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_usage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
