// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fails.
// Usage: acceptance [data-root]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "nn2rules/evaluation.hpp"
#include "nn2rules/pipeline.hpp"

using namespace nn2rules;
using namespace testing;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds.
constexpr double golden_seconds = 1.0;
constexpr double exhaustive_seconds = 600.0;
constexpr int random_nets_per_schema = 50;
constexpr std::size_t max_random_first = 8, max_random_second = 4;
constexpr int oracle_instances = 1000;
constexpr double soundness_tolerance = 1e-9;
constexpr std::uint64_t soundness_max_assignments = 20'000;
constexpr double support_fidelity_min = 0.90;
constexpr double contraction_min = 2.0;
constexpr int differential_nets = 100;
const std::vector<std::string> datasets{"cars", "nursery", "contraception", "adult"};
const std::vector<std::uint64_t> expected_sizes{1728, 12960, 18432, 108864};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
}

struct Trained {
    PreparedData data;
    Network net;
    ClassRuleList rules;
};

// Every assignment extends exactly one rule. Prefix hits are counted through a
// dense table indexed by (prefix length, mixed-radix index of the prefix).
struct ExhaustiveCover {
    const FeatureSchema& schema;
    std::vector<std::size_t> offsets;

    explicit ExhaustiveCover(const FeatureSchema& s) : schema(s) {
        std::size_t total = 0, block = 1;
        for (std::size_t len = 0; len <= s.feature_count(); ++len) {
            offsets.push_back(total);
            total += block;
            if (len < s.feature_count()) block *= s.value_count(len);
        }
        offsets.push_back(total);
    }

    bool check(std::span<const Rule> rules) const {
        std::vector<std::uint8_t> marked(offsets.back(), 0);
        for (const auto& r : rules) {
            std::size_t idx = 0;
            for (std::size_t k = 0; k < r.size(); ++k) idx = idx * schema.value_count(k) + r.values()[k];
            if (marked[offsets[r.size()] + idx]++) return false;  // duplicate rule
        }
        for (AssignmentCursor c(schema); !c.done(); c.advance()) {
            const auto& x = c.current().values;
            std::size_t idx = 0;
            int hits = marked[offsets[0]];
            for (std::size_t k = 0; k < x.size(); ++k) {
                idx = idx * schema.value_count(k) + x[k];
                hits += marked[offsets[k + 1] + idx];
            }
            if (hits != 1) return false;
        }
        return true;
    }
};

std::vector<Rule> rules_of_merge(const MergedPartition& m) { return m.rules; }

// ---- criterion 1 ----------------------------------------------------------

void golden() {
    const auto s = tomato_schema();
    const auto t0 = std::chrono::steady_clock::now();
    const auto rules = extract(tomato_net(), s);
    const double secs = seconds_since(t0);
    std::vector<Rule> positive;
    for (const auto& e : rules)
        if (e.annotation == 1) positive.push_back(e.rule);
    bool ok = positive == std::vector<Rule>{rule({0, 1}), rule({0, 2})};
    for (const auto& x : all_assignments(s)) {
        const Label want = x.values[0] == 0 && x.values[1] >= 1;
        ok = ok && predict(rules, x) == want;
    }
    std::ostringstream d;
    d << "tomato class-1 rules {red AND medium, red AND big}, others class 0; " << secs << " s";
    report(1, ok && secs < golden_seconds, d.str());
}

// ---- criteria 2, 3 and 5 -----------------------------------------------------

struct PartitionStats {
    std::size_t lists = 0, bad_lists = 0, neurons_checked = 0;
    double worst_soundness = 0.0;
};

// Extraction with every intermediate list checked exhaustively.
void check_intermediates(const Network& net, const FeatureSchema& s, PartitionStats& st) {
    const ExhaustiveCover cover(s);
    const bool sound = s.assignment_count() <= soundness_max_assignments;
    std::vector<Instance> all;
    std::vector<std::vector<double>> onehot;
    std::vector<ForwardResult> fw;
    if (sound) {
        all = all_assignments(s);
        for (const auto& x : all) {
            onehot.push_back(encode_one_hot(x, s));
            fw.push_back(net.forward(onehot.back()));
        }
    }
    ExtractOptions opt;
    opt.on_neuron = [&](std::size_t layer, std::size_t neuron, const NeuronRuleList& list) {
        ++st.lists;
        if (!cover.check(rules_of(list))) ++st.bad_lists;
        if (!sound) return;
        ++st.neurons_checked;
        for (std::size_t a = 0; a < all.size(); ++a) {
            const double want = relu(fw[a].pre_activations[layer][neuron]);
            const double got = list.lookup(all[a]).annotation->evaluate(onehot[a]);
            st.worst_soundness = std::max(st.worst_soundness, std::abs(got - want));
        }
    };
    opt.on_merge = [&](std::size_t, const MergedPartition& m) {
        ++st.lists;
        if (!cover.check(rules_of_merge(m))) ++st.bad_lists;
    };
    opt.on_output = [&](const NeuronRuleList& list) {
        ++st.lists;
        if (!cover.check(rules_of(list))) ++st.bad_lists;
    };
    const auto rules = extract(net, s, opt);
    ++st.lists;
    if (!cover.check(rules_of(rules))) ++st.bad_lists;
}

Network random_net_for(const FeatureSchema& s, int trial, Rng& rng) {
    std::vector<std::size_t> widths{max_random_first, max_random_second};
    if (trial > 0) widths = {1 + rng.below(max_random_first), 1 + rng.below(max_random_second)};
    return random_network(s.one_hot_width(), widths, 5000 + static_cast<std::uint64_t>(trial));
}

std::vector<Trained> exhaustive_fidelity(const fs::path& root) {
    std::vector<Trained> trained;
    bool ok = true;
    std::ostringstream d;
    std::uint64_t mismatches = 0;
    std::size_t random_passed = 0, random_total = 0;
    bool sizes_ok = true;

    bool identity = true;
    std::size_t identity_runs = 0;
    std::ostringstream identity_detail;

    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        auto data = load_prepared(root / datasets[i]);
        const auto& s = data.train.schema;
        sizes_ok = sizes_ok && s.assignment_count() == expected_sizes[i];
        const std::vector<std::size_t> widths{6, 3};
        auto net = train_network(data.train, widths, TrainOptions{});
        auto rules = extract(net, s);
        const auto v = verify_exhaustive(rules, net, s);
        mismatches += v.mismatches;
        ok = ok && v.passed && v.exhaustive && v.checked == s.assignment_count();

        const double net_acc = accuracy(net, data.test);
        const double rule_acc = accuracy([&](const Instance& x) { return predict(rules, x); }, data.test);
        identity = identity && net_acc == rule_acc;
        ++identity_runs;
        identity_detail << datasets[i] << " " << net_acc << (net_acc == rule_acc ? " == " : " != ") << rule_acc << "; ";

        Rng rng(77 + i);
        for (int trial = 0; trial < random_nets_per_schema; ++trial) {
            const auto rnet = random_net_for(s, trial, rng);
            const auto rrules = extract(rnet, s);
            const auto rv = verify_exhaustive(rrules, rnet, s);
            ++random_total;
            mismatches += rv.mismatches;
            if (rv.passed && rv.exhaustive) ++random_passed;
            const double a = accuracy(rnet, data.test);
            const double b = accuracy([&](const Instance& x) { return predict(rrules, x); }, data.test);
            identity = identity && a == b;
            ++identity_runs;
        }
        trained.push_back({std::move(data), std::move(net), std::move(rules)});
    }
    const double secs = seconds_since(t0);
    ok = ok && sizes_ok && random_passed == random_total;
    d << "4 trained [6,3] nets and " << random_passed << "/" << random_total
      << " random nets verified exhaustively over 1728/12960/18432/108864 assignments, "
      << mismatches << " mismatches; " << secs << " s (limit " << exhaustive_seconds << " s)";
    if (!sizes_ok) d << "; schema sizes differ from the expected products";
    report(2, ok && secs < exhaustive_seconds, d.str());
    identity_detail << identity_runs << " runs compared exactly";
    report(3, identity, identity_detail.str());
    return trained;
}

void partition_suite(const std::vector<Trained>& trained) {
    PartitionStats st;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < trained.size(); ++i) {
        const auto& s = trained[i].data.train.schema;
        check_intermediates(trained[i].net, s, st);
        Rng rng(77 + i);
        for (int trial = 0; trial < random_nets_per_schema; ++trial)
            check_intermediates(random_net_for(s, trial, rng), s, st);
    }
    std::ostringstream d;
    d << st.lists - st.bad_lists << "/" << st.lists << " intermediate lists prefix-free and covering; "
      << st.neurons_checked << " hidden neurons sound, worst |behavior - ReLU| = " << st.worst_soundness
      << " (tolerance " << soundness_tolerance << "); " << seconds_since(t0) << " s";
    report(5, st.bad_lists == 0 && st.worst_soundness <= soundness_tolerance && st.neurons_checked > 0, d.str());
}

// ---- criterion 4 ----------------------------------------------------------

void select_weights_oracle() {
    Rng rng(4);
    int compared = 0, equal = 0, on_sum = 0, tie_instances = 0;
    for (int t = 0; t < oracle_instances; ++t) {
        const bool grid = t % 4 != 3;  // grid weights make ties common
        const auto b = random_buckets(rng, grid);
        bool has_tie = false;
        for (const auto& bucket : b.buckets)
            for (std::size_t j = 1; j < bucket.size(); ++j) has_tie = has_tie || bucket[j].weight == bucket[j - 1].weight;
        tie_instances += has_tie;
        const auto sums = reachable_prefix_sums(b);
        const double taus[] = {sums[rng.below(sums.size())], rng.uniform(-0.5, 6.0)};
        for (int q = 0; q < 2; ++q) {
            on_sum += q == 0;
            for (bool strict : {false, true}) {
                ++compared;
                equal += select_weights(b, taus[q], strict) == minimal_prefix_oracle(b, taus[q], strict);
            }
        }
    }
    std::ostringstream d;
    d << equal << "/" << compared << " selections equal the brute-force oracle over " << oracle_instances
      << " bucket instances (" << tie_instances << " with tied weights, " << on_sum
      << " thresholds on a reachable sum)";
    report(4, equal == compared && compared >= oracle_instances, d.str());
}

// ---- criteria 6 and 7 -------------------------------------------------------

void curves_and_reproduction(const std::vector<Trained>& trained) {
    bool endpoints = true;
    std::ostringstream d6, d7;
    bool repro = true;
    for (const auto& t : trained) {
        const auto m = evaluate_methods(t.data.name, t.net, t.rules, t.data.train, t.data.test);
        std::size_t negatives = 0;
        for (const auto& x : t.data.test.instances) negatives += t.net.predict(x, t.data.test.schema) == 0;
        const double negative_rate =
            static_cast<double>(negatives) / static_cast<double>(t.data.test.size());
        const auto& first = m.curve.front();
        const auto& last = m.curve.back();
        const bool ok = first.percent == 0.0 && last.percent == 100.0 && last.fidelity == 1.0 &&
                        first.fidelity == negative_rate;
        endpoints = endpoints && ok;
        d6 << t.data.name << " 0%=" << first.fidelity << " (negative rate " << negative_rate << "), 100%="
           << last.fidelity << "; ";

        if (t.data.name == "adult" || t.data.name == "contraception") {
            const double fid = m.method("nn2rules_support").fidelity;
            const double contraction = m.rule_count_support == 0
                                           ? 0.0
                                           : static_cast<double>(m.rule_count_full) /
                                                 static_cast<double>(m.rule_count_support);
            const bool pass = fid >= support_fidelity_min && contraction >= contraction_min;
            repro = repro && pass;
            d7 << t.data.name << " support fidelity " << fid << " (min " << support_fidelity_min << "), rules "
               << m.rule_count_full << " -> " << m.rule_count_support << " (" << contraction << "x, min "
               << contraction_min << "x); ";
        }
    }
    report(6, endpoints, d6.str());
    report(7, repro, d7.str());
}

// ---- criterion 8 ----------------------------------------------------------

void differential() {
    Rng rng(8);
    int same = 0;
    for (int t = 0; t < differential_nets; ++t) {
        const auto s = random_schema(rng, 5, 4);
        const auto widths = random_widths(rng, 6, 4);
        const auto net = t % 2 ? random_tie_network(s.one_hot_width(), widths, rng)
                               : random_network(s.one_hot_width(), widths, 8000 + static_cast<std::uint64_t>(t));
        ExtractOptions literal;
        literal.strategy = NeuronRuleStrategy::literal;
        same += same_lists(extract(net, s), extract(net, s, literal));
    }
    std::ostringstream d;
    d << same << "/" << differential_nets << " random small nets give identical lists for both strategies";
    report(8, same == differential_nets, d.str());
}

} // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path(NN2RULES_DATA_DIR);
    std::cout.precision(6);
    golden();
    std::vector<Trained> trained;
    try {
        trained = exhaustive_fidelity(root);
    } catch (const std::exception& e) {
        report(2, false, std::string("error: ") + e.what());
        report(3, false, "no trained networks");
    }
    select_weights_oracle();
    if (trained.size() == datasets.size()) {
        partition_suite(trained);
        curves_and_reproduction(trained);
    } else {
        report(5, false, "no trained networks");
        report(6, false, "no trained networks");
        report(7, false, "no trained networks");
    }
    differential();
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria" << std::endl;
    return failures ? 1 : 0;
}
