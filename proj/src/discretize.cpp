#include "nn2rules/discretize.hpp"

#include <algorithm>
#include <cmath>

#include "nn2rules/error.hpp"
#include "text.hpp"

namespace nn2rules {

namespace {

/// Linear-interpolation quantile of a sorted, non-empty range.
double quantile(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

std::size_t BinEdges::bin_of(double x) const {
    return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

std::vector<std::string> BinEdges::labels() const {
    if (edges.empty()) return {"all"};
    std::vector<std::string> out;
    out.push_back("lt_" + detail::format_double(edges.front()));
    for (std::size_t i = 1; i < edges.size(); ++i)
        out.push_back(detail::format_double(edges[i - 1]) + "_to_" + detail::format_double(edges[i]));
    out.push_back("ge_" + detail::format_double(edges.back()));
    return out;
}

Discretization discretize_numeric(std::span<const double> column, std::size_t bins) {
    if (bins < 2) throw Error("discretize: bins must be >= 2");
    if (column.empty()) throw Error("discretize: empty column");
    for (double v : column)
        if (!std::isfinite(v)) throw Error("discretize: non-finite value");

    std::vector<double> sorted(column.begin(), column.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    Discretization out;
    if (distinct.size() < bins) {
        out.edges.edges.assign(distinct.begin() + 1, distinct.end());
        out.warning = "column has " + std::to_string(distinct.size()) +
                      " distinct value(s), fewer than " + std::to_string(bins) +
                      " bins; using one bin per distinct value";
    } else {
        std::span<const double> rest(sorted);
        for (std::size_t k = 1; k < bins; ++k) {
            const auto remaining_bins = bins - k + 1;
            double edge = quantile(rest, 1.0 / static_cast<double>(remaining_bins));
            if (edge <= rest.front()) {
                auto above = std::upper_bound(rest.begin(), rest.end(), rest.front());
                if (above == rest.end()) break;
                edge = *above;
            }
            out.edges.edges.push_back(edge);
            auto first = std::lower_bound(rest.begin(), rest.end(), edge);
            rest = rest.subspan(static_cast<std::size_t>(first - rest.begin()));
        }
        if (out.edges.bin_count() < bins)
            out.warning = "column mass too concentrated for " + std::to_string(bins) +
                          " bins; using " + std::to_string(out.edges.bin_count());
    }
    out.indices.reserve(column.size());
    for (double v : column) out.indices.push_back(static_cast<ValueIndex>(out.edges.bin_of(v)));
    if (out.warning) warn("discretize: " + *out.warning);
    return out;
}

std::vector<FeatureSpec> parse_feature_spec(std::string_view text) {
    std::vector<FeatureSpec> out;
    std::size_t line_no = 0;
    for (auto raw : detail::lines(text)) {
        ++line_no;
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw Error("feature spec line " + std::to_string(line_no) + ": missing ':'");
        FeatureSpec spec;
        spec.name = std::string(detail::trim(line.substr(0, colon)));
        auto parts = detail::split(line.substr(colon + 1), ',');
        if (parts.size() == 2 && parts[0] == "numeric" && parts[1].rfind("bins=", 0) == 0) {
            double bins = 0;
            if (!detail::parse_double(std::string_view(parts[1]).substr(5), bins) || bins < 2 ||
                bins != std::floor(bins))
                throw Error("feature spec line " + std::to_string(line_no) + ": bad bin count");
            spec.numeric_bins = static_cast<std::size_t>(bins);
        } else {
            if (parts.size() < 2)
                throw Error("feature spec line " + std::to_string(line_no) +
                            ": categorical feature needs at least 2 values");
            spec.values = std::move(parts);
        }
        out.push_back(std::move(spec));
    }
    return out;
}

std::vector<FeatureSpec> load_feature_spec(const std::filesystem::path& path) {
    return parse_feature_spec(detail::read_file(path));
}

std::string format_edges(const EdgeTable& edges) {
    std::string out;
    for (const auto& [name, e] : edges) {
        out += name + ":";
        for (std::size_t i = 0; i < e.edges.size(); ++i)
            out += (i ? ", " : " ") + detail::format_double(e.edges[i]);
        out += '\n';
    }
    return out;
}

EdgeTable parse_edges(std::string_view text) {
    EdgeTable out;
    for (auto raw : detail::lines(text)) {
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) throw Error("edges: missing ':'");
        BinEdges e;
        auto rest = detail::trim(line.substr(colon + 1));
        if (!rest.empty()) {
            for (const auto& cell : detail::split(rest, ',')) {
                double v = 0;
                if (!detail::parse_double(cell, v)) throw Error("edges: bad number '" + cell + "'");
                e.edges.push_back(v);
            }
        }
        if (!std::is_sorted(e.edges.begin(), e.edges.end()) ||
            std::adjacent_find(e.edges.begin(), e.edges.end()) != e.edges.end())
            throw Error("edges: values must be strictly increasing");
        out.emplace(std::string(detail::trim(line.substr(0, colon))), std::move(e));
    }
    return out;
}

} // namespace nn2rules
