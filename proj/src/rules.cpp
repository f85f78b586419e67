#include "nn2rules/rules.hpp"

#include <limits>

namespace nn2rules {

std::vector<Term> Rule::terms() const {
    std::vector<Term> out;
    out.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out.push_back({i, values_[i]});
    return out;
}

bool Rule::is_prefix_of(const Rule& other) const {
    return size() <= other.size() && std::equal(values_.begin(), values_.end(), other.values_.begin());
}

bool Rule::is_prefix_of(const Instance& instance) const {
    return size() <= instance.values.size() &&
           std::equal(values_.begin(), values_.end(), instance.values.begin());
}

Rule Rule::extended(ValueIndex value) const {
    auto v = values_;
    v.push_back(value);
    return Rule(std::move(v));
}

Rule Rule::concatenated(std::span<const ValueIndex> suffix) const {
    std::vector<ValueIndex> v;
    v.reserve(values_.size() + suffix.size());
    v.insert(v.end(), values_.begin(), values_.end());
    v.insert(v.end(), suffix.begin(), suffix.end());
    return Rule(std::move(v));
}

void check_rule(const Rule& rule, const FeatureSchema& schema) {
    if (rule.size() > schema.feature_count()) throw Error("rule has more terms than features");
    for (std::size_t i = 0; i < rule.size(); ++i)
        if (rule[i] >= schema.value_count(i))
            throw Error("rule value out of range for feature '" + schema.feature(i).name + "'");
}

std::optional<Rule> conjoin(const Rule& a, const Rule& b) {
    if (a.is_prefix_of(b)) return b;
    if (b.is_prefix_of(a)) return a;
    return std::nullopt;
}

std::strong_ordering compare(const Rule& rule, const Instance& instance) {
    const auto v = rule.values();
    return std::lexicographical_compare_three_way(v.begin(), v.end(), instance.values.begin(),
                                                  instance.values.end());
}

std::size_t support(const Rule& rule, const Dataset& data) {
    std::size_t n = 0;
    for (const auto& inst : data.instances) n += rule.matches(inst);
    return n;
}

double Behavior::evaluate(std::span<const double> x) const {
    if (x.size() != weights.size())
        throw Error("behavior: input width " + std::to_string(x.size()) + ", expected " +
                    std::to_string(weights.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i];
    return s + bias;
}

double Behavior::evaluate(const Instance& instance, const FeatureSchema& schema) const {
    if (weights.size() != schema.one_hot_width()) throw Error("behavior: schema width mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < instance.values.size(); ++i)
        s += weights[schema.offset(i) + instance.values[i]];
    return s + bias;
}

bool Behavior::is_zero() const {
    if (bias != 0.0) return false;
    for (double w : weights)
        if (w != 0.0) return false;
    return true;
}

PartitionReport check_partition(std::span<const Rule> rules, const FeatureSchema& schema) {
    PartitionReport report;
    const std::size_t m = schema.feature_count();
    // completions[k] = number of full assignments extending a length-k rule.
    std::vector<unsigned __int128> completions(m + 1, 1);
    for (std::size_t k = m; k-- > 0;) completions[k] = completions[k + 1] * schema.value_count(k);

    unsigned __int128 covered = 0;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const auto& rule = rules[r];
        if (rule.size() > m) {
            report.covering = false;
            report.message = "rule " + std::to_string(r) + " is longer than the schema";
            return report;
        }
        for (std::size_t i = 0; i < rule.size(); ++i) {
            if (rule[i] >= schema.value_count(i)) {
                report.covering = false;
                report.message = "rule " + std::to_string(r) + " has an out-of-range value";
                return report;
            }
        }
        covered += completions[rule.size()];
        if (r == 0) continue;
        const auto& prev = rules[r - 1];
        if (!(prev < rule)) {
            report.sorted = false;
            if (report.message.empty())
                report.message = "rules " + std::to_string(r - 1) + " and " + std::to_string(r) +
                                 " are out of order or duplicated";
        }
        if (prev.is_prefix_of(rule)) {
            report.prefix_free = false;
            if (report.message.empty())
                report.message = "rule " + std::to_string(r - 1) + " is a prefix of rule " +
                                 std::to_string(r);
        }
    }
    if (report.sorted && report.prefix_free && covered != completions[0]) {
        report.covering = false;
        report.message = "rules do not cover the product space";
    }
    return report;
}

void require_partition(const PartitionReport& report, const char* what) {
    if (!report.ok()) throw InvariantViolation(std::string(what) + ": " + report.message);
}

} // namespace nn2rules
