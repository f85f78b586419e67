#include "nn2rules/schema.hpp"

#include <limits>
#include <set>

#include "nn2rules/error.hpp"
#include "text.hpp"

namespace nn2rules {

FeatureSchema::FeatureSchema(std::vector<Feature> features) : features_(std::move(features)) {
    std::set<std::string> names;
    offsets_.reserve(features_.size());
    for (const auto& f : features_) {
        if (f.name.empty()) throw Error("schema: empty feature name");
        if (!names.insert(f.name).second) throw Error("schema: duplicate feature '" + f.name + "'");
        if (f.values.size() < 2)
            throw Error("schema: feature '" + f.name + "' needs at least 2 values");
        if (f.values.size() > std::numeric_limits<ValueIndex>::max())
            throw Error("schema: feature '" + f.name + "' has too many values");
        std::set<std::string> seen;
        for (const auto& v : f.values) {
            if (v.empty()) throw Error("schema: empty value in feature '" + f.name + "'");
            if (!seen.insert(v).second)
                throw Error("schema: duplicate value '" + v + "' in feature '" + f.name + "'");
        }
        offsets_.push_back(width_);
        width_ += f.values.size();
    }
}

std::uint64_t FeatureSchema::assignment_count() const {
    std::uint64_t total = 1;
    for (const auto& f : features_) {
        const auto n = static_cast<std::uint64_t>(f.values.size());
        if (total > std::numeric_limits<std::uint64_t>::max() / n)
            return std::numeric_limits<std::uint64_t>::max();
        total *= n;
    }
    return total;
}

std::size_t FeatureSchema::feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].name == name) return i;
    throw Error("schema: unknown feature '" + std::string(name) + "'");
}

std::size_t FeatureSchema::find_value(std::size_t feature, std::string_view value) const {
    const auto& values = features_[feature].values;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (values[j] == value) return j;
    return values.size();
}

FeatureSchema parse_schema(std::string_view text) {
    std::vector<Feature> features;
    std::size_t line_no = 0;
    for (auto raw : detail::lines(text)) {
        ++line_no;
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw Error("schema line " + std::to_string(line_no) + ": expected 'name: v1, v2, ...'");
        Feature f;
        f.name = std::string(detail::trim(line.substr(0, colon)));
        f.values = detail::split(line.substr(colon + 1), ',');
        features.push_back(std::move(f));
    }
    if (features.empty()) throw Error("schema: no features");
    return FeatureSchema(std::move(features));
}

FeatureSchema load_schema(const std::filesystem::path& path) {
    try {
        return parse_schema(detail::read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string format_schema(const FeatureSchema& schema) {
    std::string out;
    for (const auto& f : schema.features()) {
        out += f.name + ": ";
        for (std::size_t j = 0; j < f.values.size(); ++j) {
            if (j) out += ", ";
            out += f.values[j];
        }
        out += '\n';
    }
    return out;
}

bool is_valid(const Instance& instance, const FeatureSchema& schema) {
    if (instance.values.size() != schema.feature_count()) return false;
    for (std::size_t i = 0; i < instance.values.size(); ++i)
        if (instance.values[i] >= schema.value_count(i)) return false;
    return true;
}

void encode_one_hot(const Instance& instance, const FeatureSchema& schema, std::span<double> out) {
    if (!is_valid(instance, schema)) throw Error("encode_one_hot: instance does not fit schema");
    if (out.size() != schema.one_hot_width()) throw Error("encode_one_hot: output width mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < instance.values.size(); ++i)
        out[schema.offset(i) + instance.values[i]] = 1.0;
}

std::vector<double> encode_one_hot(const Instance& instance, const FeatureSchema& schema) {
    std::vector<double> x(schema.one_hot_width());
    encode_one_hot(instance, schema, x);
    return x;
}

Instance decode_one_hot(std::span<const double> x, const FeatureSchema& schema) {
    if (x.size() != schema.one_hot_width()) throw Error("decode_one_hot: width mismatch");
    Instance out;
    out.values.reserve(schema.feature_count());
    for (std::size_t i = 0; i < schema.feature_count(); ++i) {
        std::size_t hot = schema.value_count(i);
        for (std::size_t j = 0; j < schema.value_count(i); ++j) {
            const double v = x[schema.offset(i) + j];
            if (v == 1.0) {
                if (hot != schema.value_count(i))
                    throw Error("decode_one_hot: several ones in block " + schema.feature(i).name);
                hot = j;
            } else if (v != 0.0) {
                throw Error("decode_one_hot: non-binary entry");
            }
        }
        if (hot == schema.value_count(i))
            throw Error("decode_one_hot: no one in block " + schema.feature(i).name);
        out.values.push_back(static_cast<ValueIndex>(hot));
    }
    return out;
}

AssignmentCursor::AssignmentCursor(const FeatureSchema& schema) : schema_(&schema) {
    current_.values.assign(schema.feature_count(), 0);
}

void AssignmentCursor::advance() {
    auto& v = current_.values;
    for (std::size_t i = v.size(); i-- > 0;) {
        if (++v[i] < schema_->value_count(i)) return;
        v[i] = 0;
    }
    done_ = true;
}

} // namespace nn2rules
