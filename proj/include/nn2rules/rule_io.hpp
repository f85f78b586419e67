#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nn2rules/rules.hpp"

namespace nn2rules {

/// `color=red AND size=big`; the empty rule prints as `TRUE`.
std::string format_rule(const Rule& rule, const FeatureSchema& schema);
Rule parse_rule(std::string_view text, const FeatureSchema& schema);

/// Per-entry training support, parallel to the list's entries.
using Supports = std::optional<std::vector<std::size_t>>;

/// One rule per line: `<rule> => <class>` plus ` (support=S)` when supports are given.
std::string format_rule_list(const ClassRuleList& rules, const FeatureSchema& schema,
                             const Supports& supports = std::nullopt);
ClassRuleList parse_rule_list(std::string_view text, const FeatureSchema& schema);

/// JSON mirror of the text format for programmatic reload.
std::string rule_list_to_json(const ClassRuleList& rules, const FeatureSchema& schema,
                              const Supports& supports = std::nullopt);
ClassRuleList rule_list_from_json(std::string_view text, const FeatureSchema& schema);

void save_rule_list(const std::filesystem::path& path, const ClassRuleList& rules,
                    const FeatureSchema& schema, const Supports& supports = std::nullopt);
/// Picks JSON or text by content.
ClassRuleList load_rule_list(const std::filesystem::path& path, const FeatureSchema& schema);

} // namespace nn2rules
