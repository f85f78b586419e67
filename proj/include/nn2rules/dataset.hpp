#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nn2rules/schema.hpp"

namespace nn2rules {

enum class Split { train, test, all };

using Label = std::uint8_t;

struct Dataset {
    FeatureSchema schema;
    std::vector<Instance> instances;
    std::vector<Label> labels;
    Split split = Split::all;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }
};

struct CsvOptions {
    std::string label_column = "label";
    /// When set, labels equal to this string are class 1 and anything else is
    /// class 0. Otherwise labels must be "0" or "1".
    std::optional<std::string> positive_label;
};

/// Raw CSV table: header plus rows of trimmed string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

Dataset dataset_from_table(const CsvTable& table, const FeatureSchema& schema,
                           const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                 const CsvOptions& options = {});
void save_csv(const std::filesystem::path& path, const Dataset& data,
              const std::string& label_column = "label");

/// Deterministic shuffled split; the first round(ratio * size) shuffled rows
/// become the training set.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_ratio,
                                          std::uint64_t seed);

/// Same permutation as split_dataset, applied to row indices of any table.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t rows, double train_ratio, std::uint64_t seed);

} // namespace nn2rules
