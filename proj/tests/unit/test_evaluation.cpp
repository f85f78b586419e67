#include <doctest.h>

#include "helpers.hpp"
#include "nn2rules/error.hpp"
#include "nn2rules/evaluation.hpp"
#include "nn2rules/pipeline.hpp"

using namespace nn2rules;
using namespace testing;

namespace {

Dataset tomato_all(std::vector<Label> labels) {
    const auto t = tomato_schema();
    return Dataset{t, all_assignments(t), std::move(labels), Split::test};
}

Predictor constant(Label c) {
    return [c](const Instance&) { return c; };
}

} // namespace

TEST_CASE("fidelity examples") {
    const auto t = tomato_schema();
    const auto net = tomato_net();
    const auto data = tomato_all({0, 1, 1, 0, 0, 0});
    CHECK(fidelity(extract(net, t), net, data) == 1.0);

    const auto always_one = make_network({{{0, 0, 0, 0, 0}}}, {{1}});
    CHECK(fidelity(constant(0), always_one, data) == 0.0);

    // Agrees with the tomato net on 3 of 4 rows.
    Dataset four{t, {inst({0, 1}), inst({0, 2}), inst({1, 0}), inst({1, 1})}, {1, 1, 0, 0}, Split::test};
    const Predictor three_of_four = [](const Instance& x) { return x.values == std::vector<ValueIndex>{1, 1} ? Label{1} : Label{x.values[0] == 0}; };
    CHECK(fidelity(three_of_four, net, four) == 0.75);

    Dataset empty{t, {}, {}, Split::test};
    CHECK_THROWS_AS(fidelity(constant(0), net, empty), Error);
}

TEST_CASE("full rule list accuracy equals network accuracy") {
    Rng rng(71);
    for (int trial = 0; trial < 40; ++trial) {
        const auto s = random_schema(rng, 4, 4);
        const auto widths = random_widths(rng, 5, 3);
        const auto net = random_network(s.one_hot_width(), widths, 40 + trial);
        Dataset d{s, {}, {}, Split::test};
        for (const auto& x : all_assignments(s)) {
            d.instances.push_back(x);
            d.labels.push_back(static_cast<Label>(rng.below(2)));
        }
        const auto rules = extract(net, s);
        CHECK(accuracy([&](const Instance& x) { return predict(rules, x); }, d) == accuracy(net, d));
    }
}

TEST_CASE("exhaustive verification") {
    const auto t = tomato_schema();
    const auto net = tomato_net();
    auto rules = extract(net, t);
    const auto ok = verify_exhaustive(rules, net, t);
    CHECK(ok.passed);
    CHECK(ok.exhaustive);
    CHECK(ok.checked == 6);

    // Flip one label: exactly the assignments under that rule become counterexamples.
    auto entries = rules.entries();
    std::size_t flipped = 0;
    for (std::size_t e = 0; e < entries.size(); ++e)
        if (entries[e].rule == rule({0, 2})) {
            entries[e].annotation ^= 1;
            flipped = e;
        }
    const ClassRuleList bad(entries);
    const auto res = verify_exhaustive(bad, net, t);
    CHECK_FALSE(res.passed);
    REQUIRE(res.counterexamples.size() == 1);
    CHECK(res.counterexamples[0].instance == inst({0, 2}));
    CHECK(res.counterexamples[0].rule_class == 0);
    CHECK(res.counterexamples[0].network_class == 1);
    CHECK(flipped > 0);

    VerifyOptions tight;
    tight.cap = 5;
    CHECK_THROWS_AS(verify_exhaustive(rules, net, t, tight), Error);
    tight.sample_over_cap = true;
    tight.samples = 200;
    const auto sampled = verify_exhaustive(rules, net, t, tight);
    CHECK(sampled.passed);
    CHECK_FALSE(sampled.exhaustive);
    CHECK(sampled.checked == 200);
}

TEST_CASE("support pruning") {
    const auto t = tomato_schema();
    const auto rules = extract(tomato_net(), t);
    Dataset train{t, {inst({0, 2}), inst({1, 0})}, {1, 0}, Split::train};
    const auto kept = prune_by_support(rules, train);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].rule == rule({0, 2}));
    CHECK(kept[0].support == 1);

    const auto ranked = rank_by_support(rules, train);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[1].rule == rule({0, 1}));
    CHECK(ranked[1].support == 0);

    Dataset none{t, {inst({1, 0}), inst({1, 1})}, {0, 0}, Split::train};
    const auto empty = prune_by_support(rules, none);
    CHECK(empty.empty());
    const TopRulesPredictor p(empty, empty.size());
    for (const auto& x : all_assignments(t)) CHECK(p(x) == 0);
}

TEST_CASE("support ranking order and retention property") {
    Rng rng(73);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = random_schema(rng, 4, 4);
        const auto net = random_tie_network(s.one_hot_width(), random_widths(rng, 5, 3), rng);
        const auto rules = extract(net, s);
        Dataset train{s, {}, {}, Split::train};
        for (int r = 0; r < 60; ++r) {
            Instance x;
            for (std::size_t i = 0; i < s.feature_count(); ++i)
                x.values.push_back(static_cast<ValueIndex>(rng.below(s.value_count(i))));
            train.instances.push_back(x);
            train.labels.push_back(static_cast<Label>(rng.below(2)));
        }
        const auto ranked = rank_by_support(rules, train);
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            CHECK(ranked[r].support == support(ranked[r].rule, train));
            if (r) {
                CHECK(ranked[r - 1].support >= ranked[r].support);
                if (ranked[r - 1].support == ranked[r].support) CHECK(ranked[r - 1].rule < ranked[r].rule);
            }
        }
        const auto kept = prune_by_support(rules, train);
        const TopRulesPredictor all(kept, kept.size());
        const double full_fid = fidelity(all, net, train);
        for (std::size_t drop = 0; drop < kept.size(); ++drop) {
            auto fewer = kept;
            fewer.erase(fewer.begin() + static_cast<long>(drop));
            const TopRulesPredictor p(fewer, fewer.size());
            CHECK(fidelity(p, net, train) <= full_fid);
        }
    }
}

TEST_CASE("error-set fidelity") {
    const auto t = tomato_schema();
    const auto net = tomato_net();
    const auto rules = extract(net, t);
    const Predictor full = [&](const Instance& x) { return predict(rules, x); };

    // Labels equal to the network's predictions: no errors.
    const auto clean = tomato_all({0, 1, 1, 0, 0, 0});
    const auto none = error_set_fidelity(full, net, clean);
    CHECK(none.no_errors);
    CHECK(none.value == 1.0);

    // Four error rows; a predictor that matches the net on exactly two of them.
    const auto noisy = tomato_all({1, 0, 0, 1, 0, 0});
    const Predictor half = [](const Instance& x) {
        return x.values == std::vector<ValueIndex>{0, 1} ? Label{1}
             : x.values == std::vector<ValueIndex>{0, 0} ? Label{0}
             : x.values == std::vector<ValueIndex>{0, 2} ? Label{0}
                                                         : Label{1};
    };
    const auto es = error_set_fidelity(half, net, noisy);
    CHECK(es.error_count == 4);
    CHECK(es.value == 0.5);
    CHECK(error_set_fidelity(full, net, noisy).value == 1.0);
}

TEST_CASE("tradeoff curve endpoints") {
    Rng rng(79);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = random_schema(rng, 4, 4);
        const auto net = random_network(s.one_hot_width(), random_widths(rng, 5, 3), 70 + trial);
        const auto rules = extract(net, s);
        Dataset d{s, all_assignments(s), {}, Split::test};
        for (std::size_t r = 0; r < d.size(); ++r) d.labels.push_back(static_cast<Label>(rng.below(2)));
        const auto ranked = rank_by_support(rules, d);
        const auto grid = percent_grid(5);
        REQUIRE(grid.size() == 21);
        const auto curve = tradeoff_curve(ranked, net, d, grid);
        std::size_t negatives = 0;
        for (const auto& x : d.instances) negatives += net.predict(x, s) == 0;
        CHECK(curve.front().rules == 0);
        CHECK(curve.front().fidelity == static_cast<double>(negatives) / static_cast<double>(d.size()));
        CHECK(curve.back().rules == ranked.size());
        CHECK(curve.back().fidelity == 1.0);
        CHECK(curve.back().accuracy == accuracy(net, d));
        for (const auto& p : curve) {
            const TopRulesPredictor top(ranked, p.rules);
            CHECK(p.fidelity == fidelity(top, net, d));
        }
    }
    CHECK(percent_grid(25) == std::vector<double>{0, 25, 50, 75, 100});
    CHECK(percent_grid(30) == std::vector<double>{0, 30, 60, 90, 100});
    CHECK_THROWS_AS(percent_grid(0), Error);
}

TEST_CASE("rule count references") {
    const auto t = tomato_schema();
    CHECK(num_rules_max(t) == 6);
    Dataset d{t, {inst({0, 1}), inst({0, 1}), inst({0, 2}), inst({1, 1})}, {1, 1, 1, 0}, Split::train};
    CHECK(num_rules_memorization(d) == 2);
    const FeatureSchema cars({{"safety", {"a", "b", "c"}}, {"lug", {"a", "b", "c"}}, {"doors", {"a", "b", "c", "d"}},
                              {"persons", {"a", "b", "c"}}, {"maint", {"a", "b", "c", "d"}}, {"buying", {"a", "b", "c", "d"}}});
    CHECK(num_rules_max(cars) == 3 * 3 * 4 * 3 * 4 * 4);
}

TEST_CASE("metrics report over all methods") {
    const auto t = tomato_schema();
    const auto net = tomato_net();
    Dataset train{t, {}, {}, Split::train};
    for (int rep = 0; rep < 10; ++rep)
        for (const auto& x : all_assignments(t)) {
            train.instances.push_back(x);
            train.labels.push_back(net.predict(x, t));
        }
    const auto test = tomato_all({0, 1, 1, 0, 0, 1});
    const auto rules = extract(net, t);
    EvaluateOptions opt;
    opt.tree.min_leaf = 1;
    const auto report = evaluate_methods("tomato", net, rules, train, test, opt);
    CHECK(report.method("nn2rules_full").fidelity == 1.0);
    CHECK(report.method("nn2rules_full").error_set_fidelity == 1.0);
    CHECK(report.method("nn2rules_full").accuracy == report.network_test_accuracy);
    CHECK(report.method("trepan_lite").fidelity == 1.0);
    CHECK(report.rule_count_full == 2);
    CHECK(report.num_rules_max == 6);
    CHECK(report.curve.back().fidelity == 1.0);
    const auto csv = metrics_csv_header() + metrics_csv_rows(report);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK_THROWS_AS(report.method("nope"), Error);
}
