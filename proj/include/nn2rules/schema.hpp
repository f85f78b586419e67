#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nn2rules {

using ValueIndex = std::uint16_t;

struct Feature {
    std::string name;
    std::vector<std::string> values;

    bool operator==(const Feature&) const = default;
};

/// Ordered categorical features. The feature order is the canonical order
/// every rule follows; value order fixes the one-hot layout inside a block.
class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<Feature> features);

    std::size_t feature_count() const { return features_.size(); }
    std::size_t value_count(std::size_t feature) const { return features_[feature].values.size(); }
    std::size_t one_hot_width() const { return width_; }
    std::size_t offset(std::size_t feature) const { return offsets_[feature]; }

    const Feature& feature(std::size_t i) const { return features_[i]; }
    const std::vector<Feature>& features() const { return features_; }

    /// Size of the full product space, saturating at SIZE_MAX.
    std::uint64_t assignment_count() const;

    /// Throws Error if the name is unknown.
    std::size_t feature_index(std::string_view name) const;
    /// Returns value_count(feature) if the value is unknown.
    std::size_t find_value(std::size_t feature, std::string_view value) const;

    bool operator==(const FeatureSchema&) const = default;

private:
    std::vector<Feature> features_;
    std::vector<std::size_t> offsets_;
    std::size_t width_ = 0;
};

/// One value index per feature.
struct Instance {
    std::vector<ValueIndex> values;

    bool operator==(const Instance&) const = default;
};

FeatureSchema parse_schema(std::string_view text);
FeatureSchema load_schema(const std::filesystem::path& path);
std::string format_schema(const FeatureSchema& schema);

bool is_valid(const Instance& instance, const FeatureSchema& schema);
std::vector<double> encode_one_hot(const Instance& instance, const FeatureSchema& schema);
void encode_one_hot(const Instance& instance, const FeatureSchema& schema, std::span<double> out);
/// Inverse of encode_one_hot; throws Error unless every block holds exactly one 1.
Instance decode_one_hot(std::span<const double> x, const FeatureSchema& schema);

/// Mixed-radix walk over the full product space, last feature fastest.
class AssignmentCursor {
public:
    explicit AssignmentCursor(const FeatureSchema& schema);

    const Instance& current() const { return current_; }
    bool done() const { return done_; }
    void advance();

private:
    const FeatureSchema* schema_;
    Instance current_;
    bool done_ = false;
};

} // namespace nn2rules
