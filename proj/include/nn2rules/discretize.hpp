#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nn2rules/schema.hpp"

namespace nn2rules {

/// Left-closed, right-open bins: value x lands in bin #{edges e : e <= x}.
/// Values below the first edge go to bin 0, values at or above the last edge
/// go to the last bin.
struct BinEdges {
    std::vector<double> edges;

    std::size_t bin_count() const { return edges.size() + 1; }
    std::size_t bin_of(double x) const;
    std::vector<std::string> labels() const;
};

struct Discretization {
    BinEdges edges;
    std::vector<ValueIndex> indices;
    std::optional<std::string> warning;
};

/// Equal-frequency binning. Edges are placed one at a time: each edge is the
/// 1/r quantile (linear interpolation) of the values not yet binned, where r
/// is the number of bins still to place. An edge that would leave its bin
/// empty moves up to the next distinct value. Columns with fewer distinct
/// values than bins fall back to one bin per distinct value.
Discretization discretize_numeric(std::span<const double> column, std::size_t bins);

/// One line of a feature spec file: either a categorical feature with its
/// values (schema syntax) or `name: numeric, bins=K`.
struct FeatureSpec {
    std::string name;
    std::vector<std::string> values;
    std::size_t numeric_bins = 0;

    bool is_numeric() const { return numeric_bins != 0; }
};

std::vector<FeatureSpec> parse_feature_spec(std::string_view text);
std::vector<FeatureSpec> load_feature_spec(const std::filesystem::path& path);

using EdgeTable = std::map<std::string, BinEdges>;

/// `name: e1, e2, ...` lines; numbers use round-trip precision.
std::string format_edges(const EdgeTable& edges);
EdgeTable parse_edges(std::string_view text);

} // namespace nn2rules
