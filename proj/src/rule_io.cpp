#include "nn2rules/rule_io.hpp"

#include <json.hpp>

#include "nn2rules/error.hpp"
#include "text.hpp"

namespace nn2rules {

using nlohmann::json;

std::string format_rule(const Rule& rule, const FeatureSchema& schema) {
    check_rule(rule, schema);
    if (rule.size() == 0) return "TRUE";
    std::string out;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        if (i) out += " AND ";
        out += schema.feature(i).name + "=" + schema.feature(i).values[rule[i]];
    }
    return out;
}

Rule parse_rule(std::string_view text, const FeatureSchema& schema) {
    text = detail::trim(text);
    if (text == "TRUE") return Rule{};
    std::vector<ValueIndex> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto next = text.find(" AND ", pos);
        const auto term = detail::trim(text.substr(pos, next == std::string_view::npos ? text.npos : next - pos));
        const auto eq = term.find('=');
        if (eq == std::string_view::npos) throw Error("rule term without '=': '" + std::string(term) + "'");
        const auto name = detail::trim(term.substr(0, eq));
        const auto value = detail::trim(term.substr(eq + 1));
        const auto f = schema.feature_index(name);
        if (f != values.size())
            throw Error("rule terms must assign features in schema order; got '" + std::string(name) + "'");
        const auto v = schema.find_value(f, value);
        if (v == schema.value_count(f))
            throw Error("unknown value '" + std::string(value) + "' for feature '" + std::string(name) + "'");
        values.push_back(static_cast<ValueIndex>(v));
        if (next == std::string_view::npos) break;
        pos = next + 5;
    }
    return Rule(std::move(values));
}

namespace {

void check_supports(const ClassRuleList& rules, const Supports& supports) {
    if (supports && supports->size() != rules.size())
        throw Error("support vector length does not match the rule list");
}

ClassRuleList finish(ClassRuleList list, const FeatureSchema& schema) {
    list.sort();
    require_partition(check_partition(list, schema), "loaded rule list");
    return list;
}

} // namespace

std::string format_rule_list(const ClassRuleList& rules, const FeatureSchema& schema,
                             const Supports& supports) {
    check_supports(rules, supports);
    std::string out;
    for (std::size_t e = 0; e < rules.size(); ++e) {
        out += format_rule(rules[e].rule, schema);
        out += " => ";
        out += std::to_string(int(rules[e].annotation));
        if (supports) out += " (support=" + std::to_string((*supports)[e]) + ")";
        out += '\n';
    }
    return out;
}

ClassRuleList parse_rule_list(std::string_view text, const FeatureSchema& schema) {
    ClassRuleList list;
    std::size_t lineno = 0;
    for (auto line : detail::lines(text)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto arrow = line.find("=>");
        if (arrow == std::string_view::npos)
            throw Error("rule list line " + std::to_string(lineno) + ": missing '=>'");
        auto rhs = detail::trim(line.substr(arrow + 2));
        if (auto paren = rhs.find('('); paren != std::string_view::npos) rhs = detail::trim(rhs.substr(0, paren));
        if (rhs != "0" && rhs != "1")
            throw Error("rule list line " + std::to_string(lineno) + ": class must be 0 or 1");
        try {
            list.push_back({parse_rule(line.substr(0, arrow), schema), static_cast<Label>(rhs == "1")});
        } catch (const Error& e) {
            throw Error("rule list line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return finish(std::move(list), schema);
}

std::string rule_list_to_json(const ClassRuleList& rules, const FeatureSchema& schema,
                              const Supports& supports) {
    check_supports(rules, supports);
    json arr = json::array();
    for (std::size_t e = 0; e < rules.size(); ++e) {
        json ordered = json::array();
        for (std::size_t i = 0; i < rules[e].rule.size(); ++i)
            ordered.push_back({{"feature", schema.feature(i).name},
                               {"value", schema.feature(i).values[rules[e].rule[i]]}});
        json entry = {{"terms", ordered}, {"class", int(rules[e].annotation)}};
        if (supports) entry["support"] = (*supports)[e];
        arr.push_back(std::move(entry));
    }
    json doc = {{"features", json::array()}, {"rules", arr}};
    for (const auto& f : schema.features()) doc["features"].push_back(f.name);
    return doc.dump(1);
}

ClassRuleList rule_list_from_json(std::string_view text, const FeatureSchema& schema) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("rule list JSON: ") + e.what());
    }
    ClassRuleList list;
    try {
        for (const auto& entry : doc.at("rules")) {
            std::vector<ValueIndex> values;
            for (const auto& term : entry.at("terms")) {
                const auto name = term.at("feature").get<std::string>();
                const auto f = schema.feature_index(name);
                if (f != values.size()) throw Error("rule terms out of schema order at '" + name + "'");
                const auto value = term.at("value").get<std::string>();
                const auto v = schema.find_value(f, value);
                if (v == schema.value_count(f))
                    throw Error("unknown value '" + value + "' for feature '" + name + "'");
                values.push_back(static_cast<ValueIndex>(v));
            }
            const int cls = entry.at("class").get<int>();
            if (cls != 0 && cls != 1) throw Error("rule class must be 0 or 1");
            list.push_back({Rule(std::move(values)), static_cast<Label>(cls)});
        }
    } catch (const json::exception& e) {
        throw Error(std::string("rule list JSON: ") + e.what());
    }
    return finish(std::move(list), schema);
}

void save_rule_list(const std::filesystem::path& path, const ClassRuleList& rules,
                    const FeatureSchema& schema, const Supports& supports) {
    const bool as_json = path.extension() == ".json";
    detail::write_file(path, as_json ? rule_list_to_json(rules, schema, supports)
                                     : format_rule_list(rules, schema, supports));
}

ClassRuleList load_rule_list(const std::filesystem::path& path, const FeatureSchema& schema) {
    const auto text = detail::read_file(path);
    const auto body = detail::trim(text);
    if (!body.empty() && body.front() == '{') return rule_list_from_json(text, schema);
    return parse_rule_list(text, schema);
}

} // namespace nn2rules
